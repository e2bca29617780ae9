#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "mvsne/pipeline.hpp"

using namespace mvsne;

namespace {

/// Three well-separated classes over two feature views, all views observed.
MultiViewDataset blobs3(std::size_t per_class, std::uint64_t seed) {
    const std::size_t n = 3 * per_class;
    Rng rng(seed);
    MultiViewDataset ds;
    ds.views.assign(2, Mat());
    ds.views[0] = Mat(n, 4);
    ds.views[1] = Mat(n, 6);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int c = static_cast<int>(i / per_class);
        labels[i] = c;
        for (std::size_t j = 0; j < 4; ++j)
            ds.views[0](i, j) = rng.gaussian() * 0.4 + (j == static_cast<std::size_t>(c) ? 5.0 : 0.0);
        for (std::size_t j = 0; j < 6; ++j)
            ds.views[1](i, j) = rng.gaussian() * 0.4 + (j == static_cast<std::size_t>(c) + 3 ? 5.0 : 0.0);
        ds.sample_ids.push_back("s" + std::to_string(i));
    }
    ds.labels = labels;
    ds.class_names = {"a", "b", "c"};
    ds.observed.assign(2, std::vector<std::uint8_t>(n, 1));
    ds.validate();
    return ds;
}

PipelineConfig quick_config() {
    PipelineConfig cfg;
    cfg.optimizer.iterations = 120;
    cfg.optimizer.exaggeration_iters = 40;
    cfg.optimizer.momentum_switch = 40;
    cfg.knn.k_grid = {1, 3};
    cfg.knn.cv_folds = 3;
    return cfg;
}

bool mats_equal(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(), a.rows() * a.cols() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("prepare: PCA reduces every view and records the explained share") {
    const MultiViewDataset ds = blobs3(12, 1);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    REQUIRE(ctx.reduced.size() == 2);
    REQUIRE(ctx.components_kept.size() == 2);
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(ctx.reduced[v].rows() == ds.n_samples());
        CHECK(ctx.reduced[v].cols() == ctx.components_kept[v]);
        CHECK(ctx.components_kept[v] >= 1);
        CHECK(ctx.components_kept[v] <= ds.views[v].cols());
        CHECK(ctx.variance_explained[v] >= 0.8);
        CHECK(ctx.variance_explained[v] <= 1.0 + 1e-12);
    }
}

TEST_CASE("prepare: disabling PCA passes the raw views through") {
    const MultiViewDataset ds = blobs3(10, 2);
    PipelineConfig cfg = quick_config();
    cfg.pca = false;
    EmbedContext ctx = EmbedContext::prepare(ds, cfg);
    for (std::size_t v = 0; v < 2; ++v) {
        CHECK(mats_equal(ctx.reduced[v], ds.views[v]));
        CHECK(ctx.components_kept[v] == ds.views[v].cols());
        CHECK(ctx.variance_explained[v] == 1.0);
    }
}

TEST_CASE("effective perplexity: masked views are capped, full views are not") {
    const MultiViewDataset ds = blobs3(10, 3);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());

    CHECK(ctx.effective_perplexity(30, false, 20.0) == 20.0);
    // Masked view with 10 active rows: cap at max(2, (10-1)/3) = 3.
    CHECK(ctx.effective_perplexity(10, true, 20.0) == 3.0);
    // Tiny active sets keep the floor of 2.
    CHECK(ctx.effective_perplexity(4, true, 20.0) == 2.0);
    // Below the cap the run value is kept.
    CHECK(ctx.effective_perplexity(100, true, 5.0) == 5.0);
}

TEST_CASE("feasibility gates on the fully observed views") {
    const MultiViewDataset ds = blobs3(10, 4);  // 30 samples
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    CHECK(ctx.feasible(5.0));
    CHECK(ctx.feasible(29.0));   // max achievable: n_active - 1
    CHECK_FALSE(ctx.feasible(30.0));
    CHECK_FALSE(ctx.feasible(200.0));
}

TEST_CASE("feature affinities are cached per view and perplexity") {
    const MultiViewDataset ds = blobs3(10, 5);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    const AffinityMatrix& a1 = ctx.feature_affinity(0, 5.0);
    const AffinityMatrix& a2 = ctx.feature_affinity(0, 5.0);
    CHECK(&a1 == &a2);  // same object, not a recomputation
    const AffinityMatrix& b = ctx.feature_affinity(0, 8.0);
    CHECK(&a1 != &b);
    CHECK(a1.perplexity_target == 5.0);
    CHECK(b.perplexity_target == 8.0);
}

TEST_CASE("run_embed without a split: unsupervised embedding, no predictions") {
    const MultiViewDataset ds = blobs3(10, 6);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    const EmbedResult r = run_embed(ctx, 5.0, nullptr, 9, false);
    CHECK(r.embedding.coords.rows() == 30);
    CHECK(r.embedding.coords.cols() == 2);
    CHECK(r.embedding.cost_trace.size() == 120);
    CHECK_FALSE(r.split.has_value());
    CHECK(r.label_perplexity == 0.0);
    CHECK(r.predicted.empty());
    CHECK(r.k_used == 0);
}

TEST_CASE("run_embed with a split: label view, grid-searched k, predictions") {
    const MultiViewDataset ds = blobs3(12, 7);
    PipelineConfig cfg = quick_config();
    cfg.optimizer.iterations = 400;  // long enough for the map to settle
    cfg.optimizer.exaggeration_iters = 100;
    cfg.optimizer.momentum_switch = 100;
    EmbedContext ctx = EmbedContext::prepare(ds, cfg);
    const SplitSpec split = stratified_split(ds, 0.5, 4);
    const EmbedResult r = run_embed(ctx, 5.0, &split, 4, true);

    CHECK(r.split.has_value());
    CHECK(r.perplexity == 5.0);
    // Label view spans the 18 train rows: cap = max(2, 17/3) = 5.
    CHECK(r.label_perplexity == 5.0);
    CHECK(r.predicted.size() == split.test_indices.size());
    CHECK((r.k_used == 1 || r.k_used == 3));
    CHECK(r.cv_accuracy > 0.5);  // classes are far apart; CV should be easy
    for (int p : r.predicted) {
        CHECK(p >= 0);
        CHECK(p < 3);
    }

    // Well-separated blobs embed into a nearly perfectly classifiable map.
    std::size_t hits = 0;
    for (std::size_t t = 0; t < split.test_indices.size(); ++t)
        if (r.predicted[t] == (*ds.labels)[split.test_indices[t]]) ++hits;
    CHECK(static_cast<double>(hits) / split.test_indices.size() > 0.8);
}

TEST_CASE("run_embed: deterministic for a fixed seed, sensitive to it") {
    const MultiViewDataset ds = blobs3(8, 8);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    const SplitSpec split = stratified_split(ds, 0.5, 1);
    const EmbedResult r1 = run_embed(ctx, 4.0, &split, 6, true);
    const EmbedResult r2 = run_embed(ctx, 4.0, &split, 6, true);
    CHECK(mats_equal(r1.embedding.coords, r2.embedding.coords));
    CHECK(r1.embedding.cost_trace == r2.embedding.cost_trace);
    CHECK(r1.predicted == r2.predicted);
    CHECK(r1.k_used == r2.k_used);

    const EmbedResult r3 = run_embed(ctx, 4.0, &split, 7, true);
    CHECK_FALSE(mats_equal(r1.embedding.coords, r3.embedding.coords));
}

TEST_CASE("run_embed: fixed k skips the grid search") {
    const MultiViewDataset ds = blobs3(8, 10);
    PipelineConfig cfg = quick_config();
    cfg.knn.k = 1;
    EmbedContext ctx = EmbedContext::prepare(ds, cfg);
    const SplitSpec split = stratified_split(ds, 0.5, 2);
    const EmbedResult r = run_embed(ctx, 4.0, &split, 3, true);
    CHECK(r.k_used == 1);
}

TEST_CASE("run_embed: classify=false leaves the classification fields empty") {
    const MultiViewDataset ds = blobs3(8, 11);
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    const SplitSpec split = stratified_split(ds, 0.5, 3);
    const EmbedResult r = run_embed(ctx, 4.0, &split, 3, false);
    CHECK(r.split.has_value());
    CHECK(r.label_perplexity > 0.0);  // the label view still joins the cost
    CHECK(r.predicted.empty());
    CHECK(r.k_used == 0);
}

TEST_CASE("run_embed: explicit view weights are honoured and validated") {
    const MultiViewDataset ds = blobs3(8, 12);
    PipelineConfig cfg = quick_config();
    cfg.weights = {0.9, 0.1};
    EmbedContext ctx = EmbedContext::prepare(ds, cfg);
    CHECK_NOTHROW(run_embed(ctx, 4.0, nullptr, 1, false));

    // With a split the label view joins, so a 2-entry weight vector no longer
    // matches the 3 views in play.
    const SplitSpec split = stratified_split(ds, 0.5, 5);
    CHECK_THROWS_AS(run_embed(ctx, 4.0, &split, 1, false), ConfigError);

    PipelineConfig bad = quick_config();
    bad.weights = {0.9, 0.2};
    CHECK_THROWS_AS(EmbedContext::prepare(ds, bad), ConfigError);
}

TEST_CASE("run_embed: infeasible perplexity errors cleanly") {
    const MultiViewDataset ds = blobs3(5, 13);  // 15 samples
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    CHECK_THROWS_AS(run_embed(ctx, 50.0, nullptr, 1, false), DataError);
}

TEST_CASE("run_embed: partially observed views get indicator masks") {
    MultiViewDataset ds = blobs3(10, 14);
    // Drop the second view for a third of the samples.
    for (std::size_t i = 0; i < 30; i += 3) ds.observed[1][i] = 0;
    ds.validate();
    EmbedContext ctx = EmbedContext::prepare(ds, quick_config());
    const EmbedResult r = run_embed(ctx, 5.0, nullptr, 2, false);
    CHECK(r.embedding.coords.rows() == 30);
    CHECK(r.embedding.coords.all_finite());

    // Determinism holds on the masked path too.
    const EmbedResult r2 = run_embed(ctx, 5.0, nullptr, 2, false);
    CHECK(mats_equal(r.embedding.coords, r2.embedding.coords));
}
