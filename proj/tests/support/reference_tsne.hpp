// Self-contained single-view t-SNE used as an independent oracle: textbook
// double-loop implementation of the Student-t embedding objective with early
// exaggeration, momentum, and adaptive gains. Shares only the basic matrix /
// RNG utility types with the library; all of the t-SNE math is written here
// from the equations.
#pragma once

#include <cmath>
#include <vector>

#include "mvsne/core.hpp"
#include "mvsne/sne.hpp"

namespace refimpl {

struct Result {
    mvsne::Mat coords;
    std::vector<double> cost_trace;  // cost of the coords entering each iteration
};

inline Result reference_tsne(const mvsne::Mat& p, const mvsne::OptimizerConfig& cfg,
                             std::uint64_t seed) {
    using mvsne::Mat;
    const std::size_t n = p.rows();

    Mat y(n, 2, 0.0);
    {
        mvsne::Rng rng(seed);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 2; ++c) y(i, c) = rng.gaussian() * cfg.init_sd;
    }

    Mat vel(n, 2, 0.0), gain(n, 2, 1.0);
    Result out;

    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < cfg.iterations; ++t) {
        const bool exag = t < cfg.exaggeration_iters && cfg.exaggeration != 1.0;

        // Student-t numerators and their total, row by row.
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) {
                    w[i][j] = 0.0;
                    continue;
                }
                const double dx = y(i, 0) - y(j, 0);
                const double dy = y(i, 1) - y(j, 1);
                const double v = 1.0 / (1.0 + dx * dx + dy * dy);
                w[i][j] = v;
                row += v;
            }
            z += row;
        }

        // KL(P || Q) of the coordinates entering this iteration, from the
        // definition (true P, no exaggeration), with the 1e-12 ratio floor.
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || p(i, j) == 0.0) continue;
                const double q = w[i][j] / z;
                cost += p(i, j) * (std::log(std::max(p(i, j), 1e-12)) -
                                   std::log(std::max(q, 1e-12)));
            }
        out.cost_trace.push_back(cost);

        // dC/dy_i = 4 sum_j (p'_ij - q_ij) w_ij (y_i - y_j), exaggerated p'.
        const double mom = t < cfg.momentum_switch ? cfg.momentum_initial : cfg.momentum_final;
        Mat grad(n, 2, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0, ay = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double pij = exag ? cfg.exaggeration * p(i, j) : p(i, j);
                const double mult = (pij - w[i][j] / z) * w[i][j];
                ax += mult * (y(i, 0) - y(j, 0));
                ay += mult * (y(i, 1) - y(j, 1));
            }
            grad(i, 0) = ax;
            grad(i, 1) = ay;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 2; ++c) {
                const double g = 4.0 * grad(i, c);
                if (cfg.gains) {
                    const double sg = (g > 0.0) - (g < 0.0);
                    const double sv = (vel(i, c) > 0.0) - (vel(i, c) < 0.0);
                    gain(i, c) = sg != sv ? gain(i, c) + 0.2 : gain(i, c) * 0.8;
                    if (gain(i, c) < 0.01) gain(i, c) = 0.01;
                }
                vel(i, c) = mom * vel(i, c) - cfg.learning_rate * gain(i, c) * g;
                y(i, c) += vel(i, c);
            }
        for (std::size_t c = 0; c < 2; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
        }
    }
    out.coords = y;
    return out;
}

}  // namespace refimpl
