#include "mvsne/sne.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mvsne {

ViewWeights ViewWeights::equal(std::size_t m) {
    if (m == 0) throw ConfigError("cannot build weights for zero views");
    ViewWeights w;
    w.weights.assign(m, 1.0 / static_cast<double>(m));
    return w;
}

void ViewWeights::validate() const {
    if (weights.empty()) throw ConfigError("empty view weights");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw ConfigError("view weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ConfigError("view weights sum to " + std::to_string(sum) + ", expected 1");
}

IndicatorMatrix build_indicator(const std::vector<std::uint8_t>& row_mask) {
    return IndicatorMatrix{row_mask};
}

void OptimizerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (momentum_initial < 0.0 || momentum_initial >= 1.0 || momentum_final < 0.0 ||
        momentum_final >= 1.0)
        throw ConfigError("momentum values must lie in [0, 1)");
    if (!(exaggeration > 0.0)) throw ConfigError("exaggeration factor must be positive");
    if (!(init_sd > 0.0)) throw ConfigError("init spread must be positive");
    if (out_dim < 1) throw ConfigError("output dimension must be at least 1");
    if (threads < 0) throw ConfigError("thread count cannot be negative");
}

Mat low_dim_affinities(const Mat& coords) {
    const std::size_t n = coords.rows();
    const std::size_t d = coords.cols();
    if (n < 2) throw DataError("need at least 2 points for low-dimensional affinities");
    if (!coords.all_finite()) throw DataError("non-finite coordinates");
    Mat q(n, n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = coords(i, c) - coords(j, c);
                sq += diff * diff;
            }
            const double w = 1.0 / (1.0 + sq);
            q(i, j) = w;
            z += w;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) /= z;
    return q;
}

double kl_divergence(const Mat& p, const Mat& q, const IndicatorMatrix* pair_mask) {
    if (p.rows() != q.rows() || p.cols() != q.cols())
        throw DataError("KL divergence needs matching shapes");
    if (pair_mask && pair_mask->size() != p.rows())
        throw DataError("pair mask size does not match matrix");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            if (i == j) continue;
            if (pair_mask && !pair_mask->pair(i, j)) continue;
            const double pij = p(i, j);
            if (pij == 0.0) continue;  // 0 log 0 = 0
            if (pij < 0.0) throw DataError("negative probability in KL input");
            const double qij = q(i, j);
            if (qij == 0.0) throw NumericError("KL undefined: q is zero where p > 0");
            sum += pij * (std::log(std::max(pij, kProbFloor)) -
                          std::log(std::max(qij, kProbFloor)));
        }
    return sum;
}

double total_cost(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
                  const Mat& q, const std::vector<const IndicatorMatrix*>& masks) {
    if (affinities.size() != weights.weights.size())
        throw ConfigError("weight count does not match view count");
    if (!masks.empty() && masks.size() != affinities.size())
        throw ConfigError("mask count does not match view count");
    weights.validate();
    double cost = 0.0;
    for (std::size_t m = 0; m < affinities.size(); ++m)
        cost += weights.weights[m] *
                kl_divergence(affinities[m].joint, q, masks.empty() ? nullptr : masks[m]);
    return cost;
}

namespace {

// Weighted mask-gated sum of the view affinities plus the quantities every
// cost/gradient evaluation reuses. When `perm` is given, entry (i,j) refers
// to input rows (perm[i], perm[j]) — the canonical-order view of the inputs.
struct Aggregate {
    Mat a;            // sum_m w_m (mask_m . P_m)
    double mass = 0;  // sum of a, snapped to exactly 1 when within 1e-6
    double const_p = 0;  // sum_m w_m sum p log max(p, floor): the Y-independent cost part
};

Aggregate build_aggregate(const std::vector<AffinityMatrix>& affinities,
                          const ViewWeights& weights,
                          const std::vector<const IndicatorMatrix*>& masks,
                          const std::vector<std::size_t>* perm) {
    const std::size_t n = affinities.front().joint.rows();
    Aggregate agg;
    agg.a = Mat(n, n, 0.0);
    for (std::size_t m = 0; m < affinities.size(); ++m) {
        const Mat& pm = affinities[m].joint;
        const IndicatorMatrix* mk = masks.empty() ? nullptr : masks[m];
        const double wm = weights.weights[m];
        double cp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pi = perm ? (*perm)[i] : i;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const std::size_t pj = perm ? (*perm)[j] : j;
                if (mk && !mk->pair(pi, pj)) continue;
                const double p = pm(pi, pj);
                if (p == 0.0) continue;
                agg.a(i, j) += wm * p;
                cp += p * std::log(std::max(p, kProbFloor));
            }
        }
        agg.const_p += wm * cp;
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mass += agg.a(i, j);
    agg.mass = std::abs(mass - 1.0) < 1e-6 ? 1.0 : mass;
    return agg;
}

void check_inputs(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
                  const std::vector<const IndicatorMatrix*>& masks, std::size_t n) {
    if (affinities.empty()) throw ConfigError("need at least one affinity matrix");
    if (affinities.size() != weights.weights.size())
        throw ConfigError("weight count does not match view count");
    if (!masks.empty() && masks.size() != affinities.size())
        throw ConfigError("mask count does not match view count");
    weights.validate();
    for (const auto& aff : affinities)
        if (aff.joint.rows() != n || aff.joint.cols() != n)
            throw DataError("affinity matrices disagree on sample count");
    if (!masks.empty())
        for (const auto* mk : masks)
            if (mk && mk->size() != n) throw DataError("indicator mask size mismatch");
}

inline double sgn(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

}  // namespace

Mat gradient(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
             const Mat& coords, const std::vector<const IndicatorMatrix*>& masks) {
    const std::size_t n = coords.rows();
    const std::size_t d = coords.cols();
    check_inputs(affinities, weights, masks, n);
    if (!coords.all_finite()) throw DataError("non-finite coordinates");

    const Aggregate agg = build_aggregate(affinities, weights, masks, nullptr);

    Mat w(n, n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = coords(i, c) - coords(j, c);
                sq += diff * diff;
            }
            w(i, j) = 1.0 / (1.0 + sq);
            z += w(i, j);
        }
    const double zeff = z / agg.mass;

    Mat g(n, d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double coef = 4.0 * (agg.a(i, j) - w(i, j) / zeff) * w(i, j);
            for (std::size_t c = 0; c < d; ++c)
                g(i, c) += coef * (coords(i, c) - coords(j, c));
        }
    return g;
}

Embedding optimize(const std::vector<AffinityMatrix>& affinities, const ViewWeights& weights,
                   const OptimizerConfig& opt, std::uint64_t seed,
                   const std::vector<const IndicatorMatrix*>& masks,
                   const std::vector<std::string>* sample_ids, const Mat* init_override) {
    opt.validate();
    if (affinities.empty()) throw ConfigError("need at least one affinity matrix");
    const std::size_t n = affinities.front().joint.rows();
    const std::size_t d = opt.out_dim;
    check_inputs(affinities, weights, masks, n);
    if (n < 2) throw DataError("need at least 2 samples to embed");
    if (sample_ids && sample_ids->size() != n)
        throw DataError("sample id count does not match affinity size");
    if (init_override && (init_override->rows() != n || init_override->cols() != d))
        throw DataError("init override has wrong shape");

    // Canonical ordering: samples are processed sorted by id, so the seeded
    // initialization (and every reduction) attaches to ids, not input order.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    if (sample_ids)
        std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
            return (*sample_ids)[a] != (*sample_ids)[b] ? (*sample_ids)[a] < (*sample_ids)[b]
                                                        : a < b;
        });

    const Aggregate agg = build_aggregate(affinities, weights, masks, &perm);

    Mat y(n, d, 0.0);
    if (init_override) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) y(i, c) = (*init_override)(perm[i], c);
    } else {
        Rng rng(seed);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) y(i, c) = rng.gaussian() * opt.init_sd;
    }

    Embedding emb;
    emb.config_echo = opt;
    emb.seed = seed;
    emb.cost_trace.reserve(opt.iterations);

    const std::size_t threads =
        opt.threads == 0 ? default_threads() : static_cast<std::size_t>(opt.threads);
    const kern::Ops& ops = kern::ops_for(opt.kernel_mode);
    const double ln_floor = std::log(kProbFloor);

    Mat w(n, n, 0.0);
    std::vector<double> xs(n), ys(n), row_sum(n), cost_part(n), gx(n), gy(n);
    Mat grad_nd(n, d, 0.0);  // generic-dimension path only
    Mat vel(n, d, 0.0), gain(n, d, 1.0);

    for (std::size_t t = 0; t < opt.iterations; ++t) {
        const bool exag = t < opt.exaggeration_iters && opt.exaggeration != 1.0;
        const double exf = exag ? opt.exaggeration : 1.0;

        // Pairwise Student-t weights and their total.
        if (d == 2) {
            for (std::size_t i = 0; i < n; ++i) {
                xs[i] = y(i, 0);
                ys[i] = y(i, 1);
            }
            parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
                for (std::size_t i = b; i < e; ++i)
                    row_sum[i] = ops.pair_row2(xs[i], ys[i], xs.data(), ys.data(), n, i, w.row(i));
            });
        } else {
            parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
                for (std::size_t i = b; i < e; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) {
                            w(i, j) = 0.0;
                            continue;
                        }
                        const double v = 1.0 / (1.0 + ops.sqdist(y.row(i), y.row(j), d));
                        w(i, j) = v;
                        s += v;
                    }
                    row_sum[i] = s;
                }
            });
        }
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) z += row_sum[i];

        // True (unexaggerated) cost of the coordinates entering this
        // iteration: const_p - sum A log max(q, floor), with log q expanded
        // as log w - log Z (the floor engages only when w < Z*floor).
        const double ln_z = std::log(z);
        const double w_floor = z * kProbFloor;
        parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                double ci = 0.0;
                const double* arow = agg.a.row(i);
                const double* wrow = w.row(i);
                for (std::size_t j = 0; j < n; ++j) {
                    if (arow[j] == 0.0) continue;
                    ci += arow[j] *
                          (wrow[j] < w_floor ? ln_floor : std::log(wrow[j]) - ln_z);
                }
                cost_part[i] = ci;
            }
        });
        double cost = agg.const_p;
        for (std::size_t i = 0; i < n; ++i) cost -= cost_part[i];
        if (!std::isfinite(cost))
            throw NumericError("non-finite cost at iteration " + std::to_string(t));
        emb.cost_trace.push_back(cost);

        // Gradient. Exaggeration scales the attractive affinities only; the
        // repulsive Z-term keeps the true aggregate mass.
        const double zeff = z / agg.mass;
        if (d == 2) {
            parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
                std::vector<double> ax;
                for (std::size_t i = b; i < e; ++i) {
                    const double* arow = agg.a.row(i);
                    if (exag) {
                        ax.resize(n);
                        for (std::size_t j = 0; j < n; ++j) ax[j] = exf * arow[j];
                        arow = ax.data();
                    }
                    ops.grad_row2(xs[i], ys[i], xs.data(), ys.data(), arow, w.row(i), zeff, n,
                                  &gx[i], &gy[i]);
                }
            });
        } else {
            parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
                for (std::size_t i = b; i < e; ++i) {
                    for (std::size_t c = 0; c < d; ++c) grad_nd(i, c) = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        const double a = exag ? exf * agg.a(i, j) : agg.a(i, j);
                        const double mult = (a - w(i, j) / zeff) * w(i, j);
                        for (std::size_t c = 0; c < d; ++c)
                            grad_nd(i, c) += mult * (y(i, c) - y(j, c));
                    }
                }
            });
        }

        // Momentum + gains update, then recenter.
        const double mom = t < opt.momentum_switch ? opt.momentum_initial : opt.momentum_final;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) {
                const double g =
                    4.0 * (d == 2 ? (c == 0 ? gx[i] : gy[i]) : grad_nd(i, c));
                if (opt.gains) {
                    gain(i, c) = sgn(g) != sgn(vel(i, c)) ? gain(i, c) + 0.2
                                                          : gain(i, c) * 0.8;
                    if (gain(i, c) < 0.01) gain(i, c) = 0.01;
                }
                vel(i, c) = mom * vel(i, c) - opt.learning_rate * gain(i, c) * g;
                y(i, c) += vel(i, c);
            }
        for (std::size_t c = 0; c < d; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
        }
        if (!y.all_finite())
            throw NumericError("non-finite coordinates at iteration " + std::to_string(t));
    }

    emb.coords = Mat(n, d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < d; ++c) emb.coords(perm[i], c) = y(i, c);
    return emb;
}

}  // namespace mvsne
