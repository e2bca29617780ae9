#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvsne/affinity.hpp"
#include "mvsne/classify.hpp"
#include "mvsne/sne.hpp"

#include "json.hpp"

namespace mvsne {

struct KnnConfig {
    std::optional<std::size_t> k;  // fixed k; unset = grid search
    std::vector<std::size_t> k_grid = kDefaultKGrid;
    std::size_t cv_folds = kDefaultCvFolds;
};

/// Every knob of the embed/benchmark pipeline. Precedence when assembling:
/// CLI flags > config file > these defaults; the resolved result is echoed
/// into every output artifact.
struct PipelineConfig {
    std::optional<double> perplexity;              // fixed value wins over the grid
    std::vector<double> perplexity_grid = {2, 10, 20, 50, 80, 100, 200};
    double pca_variance = 0.8;
    bool pca = true;                               // false = embed the raw views
    OptimizerConfig optimizer;
    std::vector<double> weights;                   // empty = equal over all views
    KnnConfig knn;
    std::vector<double> rates = {0.1, 0.2, 0.5, 0.8};
    std::size_t n_iter = 100;                      // benchmark split/embed repeats
    std::uint64_t seed = 0;
    AffinityMode affinity_mode = AffinityMode::Joint;
    std::string output_dir = ".";

    void validate() const;
    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

/// Overlays the keys present in `j` onto `cfg` (unknown keys are an error).
void apply_json(PipelineConfig& cfg, const nlohmann::json& j);

const char* affinity_mode_name(AffinityMode m);
AffinityMode parse_affinity_mode(const std::string& s);

}  // namespace mvsne
