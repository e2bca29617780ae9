#include "mvsne/pipeline.hpp"

#include <algorithm>

#include "mvsne/classify.hpp"

namespace mvsne {

EmbedContext EmbedContext::prepare(const MultiViewDataset& dataset, const PipelineConfig& cfg) {
    dataset.validate();
    cfg.validate();
    EmbedContext ctx;
    ctx.dataset = &dataset;
    ctx.cfg = cfg;
    for (std::size_t m = 0; m < dataset.n_views(); ++m) {
        if (cfg.pca) {
            ReducedView rv = pca_reduce(dataset.views[m], cfg.pca_variance);
            ctx.components_kept.push_back(rv.components_kept);
            ctx.variance_explained.push_back(rv.variance_explained);
            ctx.reduced.push_back(std::move(rv.scores));
        } else {
            ctx.components_kept.push_back(dataset.views[m].cols());
            ctx.variance_explained.push_back(1.0);
            ctx.reduced.push_back(dataset.views[m]);
        }
    }
    return ctx;
}

double EmbedContext::effective_perplexity(std::size_t n_active, bool masked,
                                          double run_perplexity) const {
    if (!masked) return run_perplexity;
    const double cap = std::max(2.0, (static_cast<double>(n_active) - 1.0) / 3.0);
    return std::min(run_perplexity, cap);
}

bool EmbedContext::feasible(double run_perplexity) const {
    for (std::size_t m = 0; m < dataset->n_views(); ++m) {
        std::size_t n_active = 0;
        for (auto f : dataset->observed[m]) n_active += f ? 1 : 0;
        const bool masked = n_active != dataset->n_samples();
        if (!masked && run_perplexity > static_cast<double>(n_active) - 1.0) return false;
    }
    return true;
}

const AffinityMatrix& EmbedContext::feature_affinity(std::size_t view, double run_perplexity) {
    std::size_t n_active = 0;
    for (auto f : dataset->observed[view]) n_active += f ? 1 : 0;
    const bool masked = n_active != dataset->n_samples();
    const double eff = effective_perplexity(n_active, masked, run_perplexity);
    const auto key = std::make_pair(view, eff);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        AffinityMatrix aff = compute_view_affinities(
            reduced[view], eff, cfg.affinity_mode, masked ? &dataset->observed[view] : nullptr,
            cfg.optimizer.threads);
        it = cache_.emplace(key, std::move(aff)).first;
    }
    return it->second;
}

EmbedResult run_embed(EmbedContext& ctx, double run_perplexity, const SplitSpec* split,
                      std::uint64_t seed, bool classify) {
    const MultiViewDataset& ds = *ctx.dataset;
    const std::size_t n = ds.n_samples();
    const std::size_t m_feat = ds.n_views();

    EmbedResult out;
    out.perplexity = run_perplexity;

    std::vector<AffinityMatrix> affs;
    std::vector<IndicatorMatrix> mask_store(m_feat + 1);
    std::vector<const IndicatorMatrix*> masks;
    bool any_mask = false;
    for (std::size_t m = 0; m < m_feat; ++m) {
        affs.push_back(ctx.feature_affinity(m, run_perplexity));
        std::size_t n_active = 0;
        for (auto f : ds.observed[m]) n_active += f ? 1 : 0;
        if (n_active != n) {
            mask_store[m] = build_indicator(ds.observed[m]);
            masks.push_back(&mask_store[m]);
            any_mask = true;
        } else {
            masks.push_back(nullptr);
        }
    }

    LabelView lv;
    if (split) {
        if (!ds.labels) throw DataError("semi-supervised run needs labels");
        split->validate(n);
        lv = build_label_view(ds, *split);
        out.label_perplexity =
            ctx.effective_perplexity(split->train_indices.size(), true, run_perplexity);
        affs.push_back(compute_view_affinities(lv.matrix, out.label_perplexity,
                                               ctx.cfg.affinity_mode, &lv.labelled_mask,
                                               ctx.cfg.optimizer.threads));
        mask_store[m_feat] = build_indicator(lv.labelled_mask);
        masks.push_back(&mask_store[m_feat]);
        any_mask = true;
        out.split = *split;
    }
    if (!any_mask) masks.clear();

    ViewWeights w;
    if (ctx.cfg.weights.empty()) {
        w = ViewWeights::equal(affs.size());
    } else {
        if (ctx.cfg.weights.size() != affs.size())
            throw ConfigError("config lists " + std::to_string(ctx.cfg.weights.size()) +
                              " weights but the run has " + std::to_string(affs.size()) +
                              " views");
        w.weights = ctx.cfg.weights;
        w.validate();
    }

    out.embedding = optimize(affs, w, ctx.cfg.optimizer, seed, masks, &ds.sample_ids);

    if (split && classify) {
        const Mat& y = out.embedding.coords;
        const std::size_t d = y.cols();
        Mat train(split->train_indices.size(), d);
        Mat test(split->test_indices.size(), d);
        std::vector<int> train_labels(split->train_indices.size());
        for (std::size_t i = 0; i < split->train_indices.size(); ++i) {
            const std::size_t r = split->train_indices[i];
            std::copy(y.row(r), y.row(r) + d, train.row(i));
            train_labels[i] = (*ds.labels)[r];
        }
        for (std::size_t i = 0; i < split->test_indices.size(); ++i) {
            const std::size_t r = split->test_indices[i];
            std::copy(y.row(r), y.row(r) + d, test.row(i));
        }

        if (ctx.cfg.knn.k) {
            const GridSearchResult gs = grid_search_k(
                train, train_labels, {*ctx.cfg.knn.k}, ctx.cfg.knn.cv_folds, seed);
            out.k_used = gs.k;
            out.cv_accuracy = gs.cv_accuracy;
        } else {
            const GridSearchResult gs = grid_search_k(train, train_labels, ctx.cfg.knn.k_grid,
                                                      ctx.cfg.knn.cv_folds, seed);
            out.k_used = gs.k;
            out.cv_accuracy = gs.cv_accuracy;
        }
        out.predicted = knn_predict(train, train_labels, test, out.k_used).predicted_classes;
    }
    return out;
}

}  // namespace mvsne
