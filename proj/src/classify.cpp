#include "mvsne/classify.hpp"

#include <algorithm>
#include <cmath>

#include "mvsne/kernels.hpp"

namespace mvsne {

Prediction knn_predict(const Mat& train_coords, const std::vector<int>& train_classes,
                       const Mat& test_coords, std::size_t k) {
    const std::size_t n_tr = train_coords.rows();
    const std::size_t d = train_coords.cols();
    if (n_tr == 0) throw DataError("empty training set");
    if (train_classes.size() != n_tr) throw DataError("training class count mismatch");
    if (k == 0 || k > n_tr)
        throw ConfigError("k must lie in [1, " + std::to_string(n_tr) + "], got " +
                          std::to_string(k));
    if (test_coords.cols() != d) throw DataError("train/test dimension mismatch");
    int n_classes = 0;
    for (int c : train_classes) {
        if (c < 0) throw DataError("negative class index");
        n_classes = std::max(n_classes, c + 1);
    }

    const auto& ops = kern::ops_for(kern::Mode::Auto);
    Prediction out;
    out.k_used = k;
    std::vector<std::pair<double, std::size_t>> dist(n_tr);
    std::vector<std::size_t> votes(static_cast<std::size_t>(n_classes));
    for (std::size_t t = 0; t < test_coords.rows(); ++t) {
        for (std::size_t i = 0; i < n_tr; ++i)
            dist[i] = {ops.sqdist(test_coords.row(t), train_coords.row(i), d), i};
        // pair ordering breaks distance ties by training index
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                          dist.end());
        std::fill(votes.begin(), votes.end(), 0);
        for (std::size_t i = 0; i < k; ++i)
            ++votes[static_cast<std::size_t>(train_classes[dist[i].second])];
        int best = 0;
        for (int c = 1; c < n_classes; ++c)
            if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)])
                best = c;  // strict: vote ties keep the smaller class
        out.test_indices.push_back(t);
        out.predicted_classes.push_back(best);
    }
    return out;
}

GridSearchResult grid_search_k(const Mat& train_coords, const std::vector<int>& train_classes,
                               const std::vector<std::size_t>& k_grid, std::size_t folds,
                               std::uint64_t seed) {
    const std::size_t n = train_coords.rows();
    if (k_grid.empty()) throw ConfigError("empty k grid");
    if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
    if (train_classes.size() != n) throw DataError("training class count mismatch");
    if (n < folds) throw DataError("fewer samples than folds");

    int n_classes = 0;
    for (int c : train_classes) n_classes = std::max(n_classes, c + 1);

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<std::size_t> fold_of(n);
    Rng rng = Rng::derived(seed, 0x43564f4c44ull);  // "CVFOLD"
    for (int c = 0; c < n_classes; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (train_classes[i] == c) idx.push_back(i);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % folds;
    }

    std::vector<std::size_t> grid(k_grid);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::size_t min_fold_train = n;
    for (std::size_t f = 0; f < folds; ++f) {
        std::size_t held = 0;
        for (std::size_t i = 0; i < n; ++i) held += fold_of[i] == f ? 1 : 0;
        min_fold_train = std::min(min_fold_train, n - held);
    }

    GridSearchResult best{0, -1.0};
    for (std::size_t k : grid) {
        if (k == 0 || k > min_fold_train) continue;  // infeasible on some fold
        double correct = 0.0, total = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> tr, te;
            for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
            if (te.empty()) continue;
            Mat trc(tr.size(), train_coords.cols());
            Mat tec(te.size(), train_coords.cols());
            std::vector<int> trl(tr.size());
            for (std::size_t i = 0; i < tr.size(); ++i) {
                std::copy(train_coords.row(tr[i]), train_coords.row(tr[i]) + train_coords.cols(),
                          trc.row(i));
                trl[i] = train_classes[tr[i]];
            }
            for (std::size_t i = 0; i < te.size(); ++i)
                std::copy(train_coords.row(te[i]), train_coords.row(te[i]) + train_coords.cols(),
                          tec.row(i));
            const Prediction pred = knn_predict(trc, trl, tec, k);
            for (std::size_t i = 0; i < te.size(); ++i) {
                correct += pred.predicted_classes[i] == train_classes[te[i]] ? 1.0 : 0.0;
                total += 1.0;
            }
        }
        const double acc = total > 0.0 ? correct / total : 0.0;
        if (acc > best.cv_accuracy) best = {k, acc};  // strict: ties keep smaller k
    }
    if (best.k == 0) throw DataError("no feasible k in the grid for this fold layout");
    return best;
}

void KnnClassifier::fit(const Mat& coords, const std::vector<int>& classes) {
    train_ = coords;
    classes_ = classes;
}

std::vector<int> KnnClassifier::predict(const Mat& coords) const {
    return knn_predict(train_, classes_, coords, k_).predicted_classes;
}

}  // namespace mvsne
