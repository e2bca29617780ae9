#pragma once

#include <array>
#include <cstdint>

#include "mvsne/dataset.hpp"

#include "json.hpp"

namespace mvsne {

/// Frozen generator parameters for the three-class, four-view synthetic
/// benchmark: views 1-3 each separate one class (that class's mean shifts by
/// `class_mean_offset`, the other two share mean 0), view 4 is pure noise.
/// Every feature gets unit-variance signal noise plus epsilon ~ N(noise_mean,
/// noise_sd), then the elementwise nonlinearity x -> x + poly_coeff * x^poly_degree.
struct NdsParams {
    std::array<std::size_t, 3> n_per_class{100, 100, 100};
    std::array<std::size_t, 4> dims{100, 100, 100, 1000};
    double class_mean_offset = 1.5;  // tuned so classes separate jointly, not in any single view
    double noise_mean = 0.0;
    double noise_sd = 0.5;
    int poly_degree = 2;
    double poly_coeff = 0.3;
    std::uint64_t seed = 7;

    nlohmann::json to_json() const;
};

MultiViewDataset generate_nds(const NdsParams& params);

enum class NdsSubset {
    Imbalanced,  // 150 samples: all 100 of class A, 20 of B, 30 of C
    Small,       // 30 samples: 10 per class
};

/// Seeded per-class subsample with the prescribed counts; the imbalanced kind
/// keeps class A verbatim and draws only B and C.
MultiViewDataset subset_nds(const MultiViewDataset& dataset, NdsSubset kind, std::uint64_t seed);

}  // namespace mvsne
