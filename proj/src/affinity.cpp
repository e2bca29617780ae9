#include "mvsne/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvsne/kernels.hpp"

namespace mvsne {

Mat squared_distances(const Mat& view, const std::vector<std::uint8_t>* mask) {
    const std::size_t n = view.rows();
    const std::size_t c = view.cols();
    if (!view.all_finite()) throw DataError("distance input contains non-finite values");
    if (mask && mask->size() != n) throw DataError("mask length does not match sample count");
    const auto& ops = kern::ops_for(kern::Mode::Auto);
    const double inf = std::numeric_limits<double>::infinity();
    Mat d(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool ai = !mask || (*mask)[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool active = ai && (!mask || (*mask)[j]);
            const double v = active ? ops.sqdist(view.row(i), view.row(j), c) : inf;
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

CalibratedRow calibrate_row(const double* distances_row, std::size_t n,
                            double target_perplexity, std::size_t self_index,
                            const std::vector<std::uint8_t>& mask) {
    if (mask.size() != n) throw DataError("mask length does not match row length");
    if (!(target_perplexity > 0.0))
        throw ConfigError("perplexity must be positive, got " + std::to_string(target_perplexity));

    std::vector<std::size_t> act;
    act.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        if (mask[j] && j != self_index) act.push_back(j);
    if (act.size() < 2) throw DataError("row needs at least 2 active neighbours");
    if (target_perplexity > static_cast<double>(act.size()))
        throw DataError("perplexity " + std::to_string(target_perplexity) + " exceeds the " +
                        std::to_string(act.size()) + " active neighbours of a row");

    double dmin = std::numeric_limits<double>::infinity();
    for (auto j : act) {
        if (!std::isfinite(distances_row[j]))
            throw DataError("non-finite distance for an active neighbour");
        dmin = std::min(dmin, distances_row[j]);
    }

    // Shifting by the minimum distance pins the nearest neighbour's exponent
    // at 0 so the row never underflows to all zeros.
    std::vector<double> weights(act.size());
    double sum_w = 0.0;
    auto perplexity_at = [&](double sigma) {
        const double beta = 1.0 / (2.0 * sigma * sigma);
        sum_w = 0.0;
        double sum_wd = 0.0;
        for (std::size_t k = 0; k < act.size(); ++k) {
            const double sh = distances_row[act[k]] - dmin;
            const double w = std::exp(-sh * beta);
            weights[k] = w;
            sum_w += w;
            sum_wd += w * sh;
        }
        // H in nats: beta * E[shifted distance] + log(sum of weights); the
        // perplexity 2^(H bits) equals exp(H nats).
        return std::exp(beta * (sum_wd / sum_w) + std::log(sum_w));
    };

    constexpr double kSigmaLo = 1e-20, kSigmaHi = 1e20, kTol = 1e-3;
    double lo = kSigmaLo, hi = kSigmaHi, sigma = 1.0;
    bool lo_found = false, hi_found = false;

    CalibratedRow out;
    out.clamped = true;
    for (int it = 0; it < 50; ++it) {
        const double perp = perplexity_at(sigma);
        out.sigma = sigma;
        out.perplexity = perp;
        if (std::abs(perp - target_perplexity) <= kTol) {
            out.clamped = false;
            break;
        }
        if (perp > target_perplexity) {  // too diffuse: shrink sigma
            hi = sigma;
            hi_found = true;
            sigma = lo_found ? (lo + sigma) * 0.5 : std::max(sigma * 0.5, kSigmaLo);
        } else {  // too peaked: widen sigma
            lo = sigma;
            lo_found = true;
            sigma = hi_found ? (sigma + hi) * 0.5 : std::min(sigma * 2.0, kSigmaHi);
        }
    }

    out.conditional.assign(n, 0.0);
    for (std::size_t k = 0; k < act.size(); ++k) out.conditional[act[k]] = weights[k] / sum_w;
    return out;
}

AffinityMatrix compute_view_affinities(const Mat& view, double target_perplexity,
                                       AffinityMode mode, const std::vector<std::uint8_t>* mask,
                                       int threads) {
    const std::size_t n = view.rows();
    std::vector<std::uint8_t> active = mask ? *mask : std::vector<std::uint8_t>(n, 1);
    if (active.size() != n) throw DataError("mask length does not match sample count");
    std::size_t n_active = 0;
    for (auto f : active) n_active += f ? 1 : 0;
    if (n_active < 3) throw DataError("affinity calibration needs at least 3 active samples");
    if (target_perplexity > static_cast<double>(n_active - 1))
        throw DataError("perplexity " + std::to_string(target_perplexity) +
                        " exceeds the maximum " + std::to_string(n_active - 1) +
                        " achievable with " + std::to_string(n_active) + " active samples");

    const Mat d = squared_distances(view, mask ? &active : nullptr);

    AffinityMatrix out;
    out.perplexity_target = target_perplexity;
    out.active_mask = active;
    out.n_active = n_active;
    out.sigmas.assign(n, 0.0);
    out.achieved_perplexity.assign(n, 0.0);
    out.clamped.assign(n, 0);

    Mat cond(n, n, 0.0);
    const std::size_t tn = threads == 0 ? default_threads() : static_cast<std::size_t>(threads);
    parallel_for(n, tn, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            if (!active[i]) continue;
            CalibratedRow row = calibrate_row(d.row(i), n, target_perplexity, i, active);
            std::copy(row.conditional.begin(), row.conditional.end(), cond.row(i));
            out.sigmas[i] = row.sigma;
            out.achieved_perplexity[i] = row.perplexity;
            out.clamped[i] = row.clamped ? 1 : 0;
        }
    });

    out.joint = Mat(n, n, 0.0);
    const double denom = static_cast<double>(n_active);
    if (mode == AffinityMode::Joint) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double p = (cond(i, j) + cond(j, i)) / (2.0 * denom);
                out.joint(i, j) = p;
                out.joint(j, i) = p;
            }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) out.joint(i, j) = cond(i, j) / denom;
    }
    return out;
}

double shannon_entropy(const std::vector<double>& prob_row) {
    double sum = 0.0;
    for (double p : prob_row) {
        if (p < 0.0) throw DataError("negative probability in entropy input");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("entropy input sums to " + std::to_string(sum) + ", expected 1");
    double h = 0.0;
    for (double p : prob_row)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

}  // namespace mvsne
