#include "mvsne/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mvsne {

namespace {

using EMat = Eigen::MatrixXd;

// Flips each row of `axes` so its largest-magnitude entry is positive; the
// eigensolver's sign choice is otherwise arbitrary.
void fix_signs(EMat& axes, EMat& scores) {
    for (Eigen::Index k = 0; k < axes.rows(); ++k) {
        Eigen::Index j;
        axes.row(k).cwiseAbs().maxCoeff(&j);
        if (axes(k, j) < 0.0) {
            axes.row(k) = -axes.row(k);
            scores.col(k) = -scores.col(k);
        }
    }
}

}  // namespace

ReducedView pca_reduce(const Mat& view, double target) {
    if (!(target > 0.0 && target <= 1.0))
        throw ConfigError("variance target must be in (0,1], got " + std::to_string(target));
    const std::size_t n = view.rows();
    const std::size_t p = view.cols();
    if (n < 2) throw DataError("PCA needs at least 2 samples");
    if (!view.all_finite()) throw DataError("PCA input contains non-finite values");

    EMat x(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = view(i, j);

    ReducedView out;
    out.mean.resize(p);
    Eigen::VectorXd mean = x.colwise().mean();
    for (std::size_t j = 0; j < p; ++j) out.mean[j] = mean(static_cast<Eigen::Index>(j));
    x.rowwise() -= mean.transpose();

    const double denom = static_cast<double>(n - 1);
    // Eigenvalues come out ascending; we consume them from the back.
    Eigen::VectorXd evals;
    EMat axes;    // rows = principal axes in feature space
    EMat scores;  // columns = projections onto those axes

    if (p <= n) {
        EMat cov = (x.transpose() * x) / denom;
        Eigen::SelfAdjointEigenSolver<EMat> es(cov);
        if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
        evals = es.eigenvalues().reverse();
        axes = es.eigenvectors().rowwise().reverse().transpose();
        scores = x * axes.transpose();
    } else {
        // Gram trick: eigenvectors of X X^T / (n-1) give the scores directly
        // and cost O(n^3) instead of O(p^3).
        EMat gram = (x * x.transpose()) / denom;
        Eigen::SelfAdjointEigenSolver<EMat> es(gram);
        if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
        evals = es.eigenvalues().reverse();
        EMat u = es.eigenvectors().rowwise().reverse();
        const Eigen::Index rank = static_cast<Eigen::Index>(n);
        scores.resize(static_cast<Eigen::Index>(n), rank);
        axes.resize(rank, static_cast<Eigen::Index>(p));
        for (Eigen::Index k = 0; k < rank; ++k) {
            const double lam = std::max(evals(k), 0.0);
            const double scale = std::sqrt(lam * denom);
            scores.col(k) = u.col(k) * scale;
            if (scale > 0.0)
                axes.row(k) = (x.transpose() * u.col(k)).transpose() / scale;
            else
                axes.row(k).setZero();
        }
    }

    double total = 0.0;
    for (Eigen::Index k = 0; k < evals.size(); ++k) total += std::max(evals(k), 0.0);
    if (total <= 0.0) throw DataError("PCA input has zero variance");

    std::size_t keep = 0;
    double cum = 0.0;
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        cum += std::max(evals(k), 0.0);
        ++keep;
        if (cum / total >= target) break;
    }
    out.components_kept = keep;
    out.variance_explained = cum / total;

    fix_signs(axes, scores);
    out.scores = Mat(n, keep);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < keep; ++k)
            out.scores(i, k) = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    out.components = Mat(keep, p);
    for (std::size_t k = 0; k < keep; ++k)
        for (std::size_t j = 0; j < p; ++j)
            out.components(k, j) = axes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    return out;
}

}  // namespace mvsne
