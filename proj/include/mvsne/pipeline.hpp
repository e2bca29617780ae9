#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mvsne/config.hpp"
#include "mvsne/dataset.hpp"
#include "mvsne/pca.hpp"
#include "mvsne/sne.hpp"

namespace mvsne {

/// Preprocessed state shared by every embed run over one dataset: PCA-reduced
/// feature views plus calibrated feature-view affinities cached per (view,
/// effective perplexity) — both are split-independent, so benchmark repeats
/// reuse them.
struct EmbedContext {
    const MultiViewDataset* dataset = nullptr;
    PipelineConfig cfg;
    std::vector<Mat> reduced;          // PCA scores per feature view
    std::vector<std::size_t> components_kept;
    std::vector<double> variance_explained;

    static EmbedContext prepare(const MultiViewDataset& dataset, const PipelineConfig& cfg);

    /// Effective per-view perplexity: views with a partial observation mask
    /// (and the label view) are capped at max(2, (n_active - 1) / 3) so small
    /// active sets stay calibratable; fully observed views use the run value
    /// unchanged (and error if it is infeasible).
    double effective_perplexity(std::size_t n_active, bool masked, double run_perplexity) const;

    /// True when every fully observed feature view can calibrate at this
    /// perplexity (capped views always can).
    bool feasible(double run_perplexity) const;

    const AffinityMatrix& feature_affinity(std::size_t view, double run_perplexity);

private:
    std::map<std::pair<std::size_t, double>, AffinityMatrix> cache_;
};

struct EmbedResult {
    Embedding embedding;
    std::optional<SplitSpec> split;
    double perplexity = 0.0;        // run perplexity
    double label_perplexity = 0.0;  // after the masked-view cap (0 when no label view)
    std::size_t k_used = 0;
    double cv_accuracy = 0.0;       // stratified-CV KNN accuracy on train rows
    std::vector<int> predicted;     // per entry of split->test_indices
};

/// One full embed run: feature affinities (+ label view when `split` is
/// given) -> optimize -> optional grid-searched KNN classification of the
/// test rows. The seed governs initialization and CV folds; the split is the
/// caller's (drawn with the same seed in the benchmark).
EmbedResult run_embed(EmbedContext& ctx, double run_perplexity, const SplitSpec* split,
                      std::uint64_t seed, bool classify);

}  // namespace mvsne
