#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvsne/config.hpp"
#include "mvsne/dataset.hpp"

#include "json.hpp"

namespace mvsne {

struct EvalReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t n_test = 0;
    std::vector<std::vector<std::size_t>> confusion;  // [true class][predicted class]

    nlohmann::json to_json() const;
};

struct SetMetrics {
    double accuracy = 0.0;   // mean |T n P| / |T u P|
    double precision = 0.0;  // mean |T n P| / |T|
    double recall = 0.0;     // mean |T n P| / |P|
};

/// Set-based metric core over per-sample true/predicted label sets; the
/// single-label wrappers below reduce every metric to the match fraction but
/// keep the general formulas intact.
SetMetrics set_metrics(const std::vector<std::vector<int>>& truth_sets,
                       const std::vector<std::vector<int>>& predicted_sets);

EvalReport compute_metrics(const std::vector<int>& true_classes,
                           const std::vector<int>& predicted_classes, std::size_t n_classes);

struct RepeatResult {
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    EvalReport report;
    double perplexity = 0.0;        // run perplexity used
    double label_perplexity = 0.0;  // after the masked-view cap
    std::size_t k_used = 0;
    double cv_accuracy = 0.0;

    nlohmann::json to_json() const;
};

/// Mean test accuracy of one perplexity candidate at one rate.
struct GridScore {
    double perplexity = 0.0;
    double mean_accuracy = 0.0;
    std::size_t n_failed = 0;
};

struct RateBlock {
    double rate = 0.0;
    double chosen_perplexity = 0.0;  // grid winner (or the fixed value)
    std::vector<GridScore> grid_scores;  // every candidate evaluated at this rate
    std::vector<RepeatResult> repeats;   // the winner's repeats
    std::size_t n_failed = 0;
    double mean_accuracy = 0.0, sd_accuracy = 0.0;
    double mean_precision = 0.0, sd_precision = 0.0;
    double mean_recall = 0.0, sd_recall = 0.0;

    nlohmann::json to_json() const;
};

struct BenchmarkReport {
    std::vector<RateBlock> rate_blocks;
    std::uint64_t base_seed = 0;
    std::size_t n_iter = 0;
    nlohmann::json config_echo;

    nlohmann::json to_json() const;
    /// Aligned "mean (sd)" text table, one row per rate.
    std::string summary_table() const;
};

/// The full repeated-split benchmark: per (rate, repeat) — seeded stratified
/// split -> label view -> affinities -> optimize -> grid-searched KNN ->
/// metrics. Repeat r uses seed base_seed + r for split, initialization, and
/// CV folds, so the splits are paired across perplexity candidates. With a
/// perplexity grid, every feasible value is evaluated over all repeats and
/// the rate reports the value with the best mean test accuracy (ties to the
/// smaller value); all candidate scores are kept in the block. Failed repeats
/// are recorded with their error and excluded from the aggregates.
BenchmarkReport run_benchmark(const MultiViewDataset& dataset, const std::vector<double>& rates,
                              std::size_t n_iter, std::uint64_t base_seed,
                              const PipelineConfig& pipeline);

}  // namespace mvsne
