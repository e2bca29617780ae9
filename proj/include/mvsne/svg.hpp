#pragma once

#include <string>
#include <vector>

#include "mvsne/core.hpp"

namespace mvsne {

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    int label = -1;   // index into class_names; -1 = unlabelled
    bool train = true;
};

struct ScatterOptions {
    double width = 760.0;
    double height = 560.0;
    double margin = 48.0;
    bool black_test_squares = false;  // draw every test/unlabelled square black
    std::string title;
};

/// Deterministic scatter plot: circles for training samples, squares for test
/// samples, colored by class with a legend. Same input, same bytes.
std::string render_scatter(const std::vector<ScatterPoint>& points,
                           const std::vector<std::string>& class_names,
                           const ScatterOptions& options);

}  // namespace mvsne
