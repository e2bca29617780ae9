#pragma once

#include <cstdint>
#include <vector>

#include "mvsne/core.hpp"

namespace mvsne {

/// Floor applied to probabilities inside log ratios so cost evaluation never
/// hits log(0); both sides of the ratio are floored so KL(P,P) is exactly 0.
inline constexpr double kProbFloor = 1e-12;

/// Per-view high-dimensional neighbour probabilities, calibrated so each
/// active row's Gaussian bandwidth hits the target perplexity.
struct AffinityMatrix {
    Mat joint;                                // N x N, symmetric, zero diagonal
    std::vector<double> sigmas;               // per-row bandwidth (0 for inactive rows)
    std::vector<double> achieved_perplexity;  // 2^H per row (0 for inactive rows)
    double perplexity_target = 0.0;
    std::vector<std::uint8_t> active_mask;    // rows that participated
    std::vector<std::uint8_t> clamped;        // rows whose search exhausted
    std::size_t n_active = 0;
};

enum class AffinityMode {
    Joint,        // p_ij = (p_{j|i} + p_{i|j}) / (2 N_active); symmetric
    Conditional,  // p_ij = p_{j|i} / N_active; may be asymmetric
};

/// Pairwise squared Euclidean distances. Rows/columns excluded by `mask` are
/// set to +infinity off the diagonal so downstream code treats them as absent.
Mat squared_distances(const Mat& view, const std::vector<std::uint8_t>* mask = nullptr);

struct CalibratedRow {
    double sigma = 0.0;
    std::vector<double> conditional;  // length N, zero at self and inactive entries
    double perplexity = 0.0;          // 2^H actually achieved
    bool clamped = false;             // search exhausted without meeting tolerance
};

/// Binary-searches sigma for one row so the conditional distribution
/// p_{j|i} ~ exp(-d_ij / (2 sigma^2)) over active j != self_index reaches the
/// target perplexity within 1e-3. Search runs over sigma in (1e-20, 1e20)
/// starting at 1.0 with at most 50 doubling/bisection steps; exhaustion keeps
/// the last bandwidth and sets `clamped` (ties at the minimum distance then
/// share the mass uniformly, the sigma->0 limit).
CalibratedRow calibrate_row(const double* distances_row, std::size_t n,
                            double target_perplexity, std::size_t self_index,
                            const std::vector<std::uint8_t>& mask);

/// Calibrates every active row and assembles the joint matrix. Errors when
/// the target perplexity exceeds the achievable maximum (the active-neighbour
/// count per row).
AffinityMatrix compute_view_affinities(const Mat& view, double target_perplexity,
                                       AffinityMode mode = AffinityMode::Joint,
                                       const std::vector<std::uint8_t>* mask = nullptr,
                                       int threads = 1);

/// Shannon entropy in bits of a probability vector (entries >= 0, sum 1 +- 1e-9);
/// 0 log 0 contributes 0.
double shannon_entropy(const std::vector<double>& prob_row);

}  // namespace mvsne
