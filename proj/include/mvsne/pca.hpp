#pragma once

#include <cstddef>

#include "mvsne/core.hpp"

namespace mvsne {

/// Result of projecting one view onto its leading principal components.
struct ReducedView {
    Mat scores;                   // N x c projected coordinates
    std::size_t components_kept = 0;
    double variance_explained = 0.0;  // cumulative fraction for the kept set
    std::vector<double> mean;     // per-feature mean removed before projection
    Mat components;               // c x p row-wise principal axes
};

/// Centers `view` and keeps the smallest number of leading principal
/// components whose cumulative variance fraction reaches `target`.
/// target must lie in (0, 1]; views with a single sample are rejected.
ReducedView pca_reduce(const Mat& view, double target);

}  // namespace mvsne
