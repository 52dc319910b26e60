#ifndef DEPSCALE_ORACLE_HPP
#define DEPSCALE_ORACLE_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>
#include <depscale/weighted.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

// Brute-force evaluation of the generalized-variance supremum
//
//     D_m = sup |cov(E{phi_0(X)|Y}, ..., E{phi_m(X)|Y})|
//
// over frames phi_0..phi_m that are centered and orthonormal under p_x. It
// works directly on the conditional expectations and never forms a singular
// value decomposition, so it can audit the spectral evaluation.

namespace depscale {

struct OracleOptions {
    int restarts = 32;
    double tolerance = 1e-12;  // on the per-step gain of log |V|
    int max_iterations = 10000;
};

struct OracleResult {
    double value = 0.0;
    int converged_restarts = 0;
    int total_iterations = 0;
};

namespace detail {

// Determinants below this are rounding noise for frames of a rank-deficient
// operator; the ascent does not chase them.
inline constexpr double kNegligibleDeterminant = 1e-14;

struct FrameObjective {
    const Matrix& cond;  // P(x,y)/p(y)
    const Vector& p_y;

    /// Covariance matrix of the images E{phi_i(X) | Y}.
    Matrix image_covariance(const Matrix& frame, Matrix* images = nullptr) const {
        Matrix psi = cond.transpose() * frame;
        const Eigen::RowVectorXd means = p_y.transpose() * psi;
        psi.rowwise() -= means;
        Matrix cov = psi.transpose() * p_y.asDiagonal() * psi;
        if (images) *images = std::move(psi);
        return cov;
    }
};

}  // namespace detail

inline OracleResult gram_det_search(const DiscreteJoint& j, int m, std::uint64_t seed, const OracleOptions& opts = {}) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "order must be >= 0");
    if (opts.restarts < 1 || opts.max_iterations < 1 || !(opts.tolerance > 0.0))
        throw Error(ErrorCode::InvalidArgument, "invalid oracle options");

    OracleResult result;
    const Eigen::Index k = m + 1;
    // Centered functions on X span |X|-1 dimensions; their images span at most |Y|-1.
    if (k > j.size_x() - 1 || k > j.size_y() - 1) {
        result.converged_restarts = opts.restarts;
        return result;
    }

    const Vector& px = j.p_x();
    const Matrix cond = conditional_matrix(j);
    const detail::FrameObjective objective{cond, j.p_y()};
    const Vector inv_px = px.cwiseInverse();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double best = 0.0;
    for (int restart = 0; restart < opts.restarts; ++restart) {
        Matrix frame(j.size_x(), k);
        do {
            for (Eigen::Index r = 0; r < frame.rows(); ++r)
                for (Eigen::Index c = 0; c < k; ++c) frame(r, c) = normal(rng);
        } while (!orthonormalize_weighted(frame, px));

        Matrix images;
        Matrix cov = objective.image_covariance(frame, &images);
        double det = cov.determinant();
        if (!(det > detail::kNegligibleDeterminant)) {
            best = std::max(best, std::max(det, 0.0));
            ++result.converged_restarts;
            continue;
        }

        double log_det = std::log(det);
        double step = 1.0;
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            ++result.total_iterations;
            // d/dPhi log|V| = 2 K Dy Psi V^{-1}; Riemannian gradient in the p_x metric.
            const Matrix euclid = 2.0 * cond * j.p_y().asDiagonal() * images * cov.inverse();
            Matrix grad = inv_px.asDiagonal() * euclid;
            const Eigen::RowVectorXd grad_means = px.transpose() * grad;
            grad.rowwise() -= grad_means;
            const Matrix inner = frame.transpose() * px.asDiagonal() * grad;
            grad -= frame * (0.5 * (inner + inner.transpose()));
            const double grad_sq = (grad.transpose() * px.asDiagonal() * grad).trace();
            if (grad_sq <= 1e-28) {
                converged = true;
                break;
            }

            // Best Armijo-acceptable step among a few scalings of the last
            // one; plain doubling/halving stalls at oscillating step sizes.
            bool accepted = false;
            auto try_step = [&](double s, Matrix& out_frame, Matrix& out_images, Matrix& out_cov, double& out_log) {
                Matrix trial = frame + s * grad;
                if (!orthonormalize_weighted(trial, px)) return false;
                Matrix trial_images;
                const Matrix trial_cov = objective.image_covariance(trial, &trial_images);
                const double trial_det = trial_cov.determinant();
                if (!(trial_det > 0.0)) return false;
                const double trial_log = std::log(trial_det);
                if (trial_log < log_det + 1e-4 * s * grad_sq) return false;
                out_frame = std::move(trial);
                out_images = std::move(trial_images);
                out_cov = trial_cov;
                out_log = trial_log;
                return true;
            };
            Matrix best_frame, best_images, best_cov;
            double best_log = -std::numeric_limits<double>::infinity();
            double best_step = 0.0;
            for (double scale : {0.25, 0.5, 1.0, 2.0}) {
                Matrix f, im, cv;
                double lg = 0.0;
                if (try_step(std::min(step * scale, 1e6), f, im, cv, lg) && lg > best_log) {
                    best_frame = std::move(f);
                    best_images = std::move(im);
                    best_cov = std::move(cv);
                    best_log = lg;
                    best_step = std::min(step * scale, 1e6);
                }
            }
            for (double s = step * 0.125; best_step == 0.0 && s > 1e-20; s *= 0.5) {
                if (try_step(s, best_frame, best_images, best_cov, best_log)) best_step = s;
            }
            if (best_step > 0.0) {
                const double gain = best_log - log_det;
                frame = std::move(best_frame);
                images = std::move(best_images);
                cov = std::move(best_cov);
                log_det = best_log;
                det = cov.determinant();
                step = best_step;
                accepted = true;
                if (gain <= opts.tolerance) converged = true;
            }
            // No ascent direction survives backtracking: stationary to rounding.
            if (!accepted) converged = true;
            if (converged) break;
        }
        if (converged) ++result.converged_restarts;
        best = std::max(best, det);
    }
    result.value = best;
    return result;
}

/// Best generalized variance found over the seeded ascents.
/// Throws NonConvergence when no restart reached the tolerance.
inline double gram_det_oracle(const DiscreteJoint& j, int m, std::uint64_t seed, const OracleOptions& opts) {
    const OracleResult r = gram_det_search(j, m, seed, opts);
    if (r.converged_restarts == 0)
        throw Error(ErrorCode::NonConvergence, "no restart converged; raise the restart count");
    return r.value;
}

inline double gram_det_oracle(const DiscreteJoint& j, int m, int restarts = 32, std::uint64_t seed = 0) {
    OracleOptions opts;
    opts.restarts = restarts;
    return gram_det_oracle(j, m, seed, opts);
}

}  // namespace depscale

#endif  // DEPSCALE_ORACLE_HPP
