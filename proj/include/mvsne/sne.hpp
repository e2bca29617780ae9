#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvsne/affinity.hpp"
#include "mvsne/core.hpp"
#include "mvsne/kernels.hpp"

namespace mvsne {

/// Per-view mixing weights for the multi-view cost; must sum to 1.
struct ViewWeights {
    std::vector<double> weights;

    static ViewWeights equal(std::size_t m);
    void validate() const;  // positive entries summing to 1 +- 1e-12
};

/// Pair participation mask with outer-product structure: pair (i,j) counts
/// iff both rows are flagged. Stored as the row mask it is built from.
struct IndicatorMatrix {
    std::vector<std::uint8_t> row_mask;

    std::size_t size() const { return row_mask.size(); }
    bool pair(std::size_t i, std::size_t j) const {
        return row_mask[i] != 0 && row_mask[j] != 0;
    }
};

IndicatorMatrix build_indicator(const std::vector<std::uint8_t>& row_mask);

struct OptimizerConfig {
    std::size_t iterations = 1000;
    double learning_rate = 200.0;
    double momentum_initial = 0.5;
    double momentum_final = 0.8;
    std::size_t momentum_switch = 250;   // iterations before the momentum step-up
    double exaggeration = 12.0;          // early-exaggeration factor on P
    std::size_t exaggeration_iters = 250;
    double init_sd = 1e-4;               // Gaussian initialization spread
    std::size_t out_dim = 2;
    bool gains = true;                   // adaptive per-coordinate rates
    int threads = 1;                     // 0 = hardware concurrency
    kern::Mode kernel_mode = kern::Mode::Auto;

    void validate() const;
};

struct Embedding {
    Mat coords;                      // N x out_dim
    std::vector<double> cost_trace;  // entry t = true (unexaggerated) cost of the
                                     // coordinates entering iteration t
    OptimizerConfig config_echo;
    std::uint64_t seed = 0;
};

/// Student-t joint probabilities: q_ij = (1+||y_i-y_j||^2)^-1 normalized over
/// all ordered pairs; symmetric, zero diagonal, total mass 1.
Mat low_dim_affinities(const Mat& coords);

/// sum over pairs (restricted by `pair_mask` when given) of p log(p/q), with
/// 0 log 0 = 0 and both ratio sides floored at kProbFloor. Errors when q is
/// exactly zero where p > 0.
double kl_divergence(const Mat& p, const Mat& q, const IndicatorMatrix* pair_mask = nullptr);

/// Weighted sum of per-view KL divergences against the shared Q. With no
/// masks this is the plain multi-view cost; masking only the label view gives
/// the semi-supervised cost; arbitrary per-view masks give the generalized
/// (missing-observation) cost. Q stays globally normalized in all cases; the
/// masks restrict only the summation. `masks` is empty or per-view (null
/// entries = unmasked).
double total_cost(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
                  const Mat& q, const std::vector<const IndicatorMatrix*>& masks = {});

/// Exact gradient of total_cost in the embedding coordinates:
///   dC/dy_i = 4 sum_j (A_ij - S q_ij) (y_i - y_j) / (1 + ||y_i - y_j||^2)
/// where A = sum_m w_m (mask_m . P_m) and S = sum A (the Z-term coefficient;
/// snapped to exactly 1 when within 1e-6, which it is whenever every view's
/// masked mass is 1).
Mat gradient(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
             const Mat& coords, const std::vector<const IndicatorMatrix*>& masks = {});

/// Momentum gradient descent with early exaggeration and adaptive gains from
/// a seeded Gaussian initialization. Deterministic given (inputs, seed,
/// config), independent of thread count. When `sample_ids` is given, samples
/// are processed in canonical id order internally, so permuting the input
/// rows permutes the output rows and nothing else. `init_override` (N x
/// out_dim, in input row order) replaces the seeded initialization.
Embedding optimize(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
                   const OptimizerConfig& opt, std::uint64_t seed,
                   const std::vector<const IndicatorMatrix*>& masks = {},
                   const std::vector<std::string>* sample_ids = nullptr,
                   const Mat* init_override = nullptr);

}  // namespace mvsne
