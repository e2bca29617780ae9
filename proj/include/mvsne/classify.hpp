#pragma once

#include <cstdint>
#include <vector>

#include "mvsne/core.hpp"

namespace mvsne {

struct Prediction {
    std::vector<std::size_t> test_indices;  // positions in the test matrix
    std::vector<int> predicted_classes;
    std::size_t k_used = 0;
};

/// Majority vote among the k nearest training points by Euclidean distance.
/// Distance ties resolve by training index (stable), vote ties by smallest
/// class index.
Prediction knn_predict(const Mat& train_coords, const std::vector<int>& train_classes,
                       const Mat& test_coords, std::size_t k);

struct GridSearchResult {
    std::size_t k = 0;
    double cv_accuracy = 0.0;  // mean stratified-CV accuracy of the chosen k
};

/// Picks the k from `k_grid` maximizing stratified cross-validated accuracy
/// (pooled over all held-out predictions); ties resolve toward smaller k.
/// Classes with fewer members than folds degrade gracefully (present in
/// fewer folds); grid values larger than the smallest fold-training size are
/// skipped.
GridSearchResult grid_search_k(const Mat& train_coords, const std::vector<int>& train_classes,
                               const std::vector<std::size_t>& k_grid, std::size_t folds,
                               std::uint64_t seed);

/// Minimal fit/predict surface so alternative classifiers can slot into the
/// pipeline later; only KNN ships.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual void fit(const Mat& coords, const std::vector<int>& classes) = 0;
    virtual std::vector<int> predict(const Mat& coords) const = 0;
};

class KnnClassifier final : public Classifier {
public:
    explicit KnnClassifier(std::size_t k) : k_(k) {}
    void fit(const Mat& coords, const std::vector<int>& classes) override;
    std::vector<int> predict(const Mat& coords) const override;

private:
    std::size_t k_;
    Mat train_;
    std::vector<int> classes_;
};

inline const std::vector<std::size_t> kDefaultKGrid{1, 3, 5, 7, 9, 11, 15, 21};
inline constexpr std::size_t kDefaultCvFolds = 5;

}  // namespace mvsne
