#ifndef DEPSCALE_ACE_HPP
#define DEPSCALE_ACE_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>
#include <depscale/weighted.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

// Alternating conditional expectations on an exact joint table.
//
// One sweep maps phi to psi = standardize(E{phi(X)|Y}) and then to
// phi' = standardize(E{psi(Y)|X}). The fixed points are the singular pairs of
// the centered conditional-expectation operator; from a generic start the
// sweep converges to the top pair, whose correlation is R(X, Y).

namespace depscale {

/// Image variances below this mean the start direction has no dependent part.
inline constexpr double kDegenerateVariance = 1e-24;

struct TransformPair {
    FunctionTable phi{Vector(), Side::X, true};
    FunctionTable psi{Vector(), Side::Y, true};
    double rho = 0.0;
    bool converged = false;
    bool degenerate = false;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> trace;  // correlation after each sweep
};

struct AceOptions {
    double tol = 1e-10;
    int max_iter = 10000;
    std::uint64_t seed = 0;
};

namespace detail {

/// First entry with |value| > 1e-12 is made positive; psi follows phi.
inline void normalize_sign(TransformPair& pair) {
    for (Eigen::Index i = 0; i < pair.phi.values.size(); ++i) {
        const double v = pair.phi.values(i);
        if (std::abs(v) > 1e-12) {
            if (v < 0.0) {
                pair.phi.values = -pair.phi.values;
                pair.psi.values = -pair.psi.values;
            }
            return;
        }
    }
}

template <typename Rng>
Vector random_standardized(Eigen::Index n, const Vector& w, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector f(n);
    if (n < 2) return Vector::Zero(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i) f(i) = normal(rng);
    } while (!(standardize_in_place(f, w) > 1e-8));
    return f;
}

}  // namespace detail

/// Top transform pair by alternating conditional expectations.
///
/// Stops when the fixed-point residual ||phi' - phi|| (p_x norm) drops to
/// `tol`. On a degenerate joint (R = 0) returns rho = 0 with arbitrary
/// standardized tables and `degenerate` set; on exhaustion returns the last
/// iterate with `converged` unset.
inline TransformPair ace_pair(const DiscreteJoint& j, double tol = 1e-10, int max_iter = 10000, std::uint64_t seed = 0) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");

    const Vector& px = j.p_x();
    const Vector& py = j.p_y();
    const Matrix given_y = conditional_matrix(j);         // E{phi|Y} = given_y^T phi
    const Matrix given_x = conditional_matrix_given_x(j);  // E{psi|X} = given_x psi

    std::mt19937_64 rng(seed);
    TransformPair pair;
    pair.phi.values = detail::random_standardized(j.size_x(), px, rng);

    auto degenerate = [&] {
        pair.degenerate = true;
        pair.converged = true;
        pair.rho = 0.0;
        pair.psi.values = detail::random_standardized(j.size_y(), py, rng);
        detail::normalize_sign(pair);
        return pair;
    };
    if (j.size_x() < 2 || j.size_y() < 2) return degenerate();

    Vector& phi = pair.phi.values;
    Vector psi;
    for (int it = 1; it <= max_iter; ++it) {
        psi = given_y.transpose() * phi;
        if (standardize_in_place(psi, py) <= std::sqrt(kDegenerateVariance)) return degenerate();
        Vector next = given_x * psi;
        if (standardize_in_place(next, px) <= std::sqrt(kDegenerateVariance)) return degenerate();

        pair.rho = next.dot(j.probs() * psi);
        pair.trace.push_back(pair.rho);
        const Vector diff = next - phi;
        pair.residual = std::sqrt(weighted_dot(diff, diff, px));
        phi = std::move(next);
        pair.iterations = it;
        if (pair.residual <= tol) {
            pair.converged = true;
            break;
        }
    }
    psi = given_y.transpose() * phi;
    standardize_in_place(psi, py);
    pair.psi.values = psi;
    pair.rho = phi.dot(j.probs() * psi);
    detail::normalize_sign(pair);
    return pair;
}

/// Leading k transform pairs by block alternation (orthogonal iteration on
/// phi -> E{E{phi|Y}|X}) with p_x-orthonormal frames and a Rayleigh-Ritz
/// rotation at the end.
///
/// The stopping test is the invariant-subspace residual ||M Phi - Phi T|| in
/// the p_x norm, where T = Phi^T Dx M Phi.
inline std::vector<TransformPair> ace_subspace(const DiscreteJoint& j, int k, double tol = 1e-10, int max_iter = 10000,
                                               std::uint64_t seed = 0) {
    const Eigen::Index limit = std::min(j.size_x(), j.size_y()) - 1;
    if (k < 1 || k > limit)
        throw Error(ErrorCode::InvalidArgument,
                    "k must lie in [1, " + std::to_string(limit) + "], got " + std::to_string(k));
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");

    const Vector& px = j.p_x();
    const Vector& py = j.p_y();
    const Matrix given_y = conditional_matrix(j);
    const Matrix given_x = conditional_matrix_given_x(j);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix frame(j.size_x(), k);
    for (Eigen::Index r = 0; r < frame.rows(); ++r)
        for (Eigen::Index c = 0; c < k; ++c) frame(r, c) = normal(rng);
    orthonormalize_weighted_completing(frame, px, rng);

    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        iterations = it;
        Matrix mapped = given_x * (given_y.transpose() * frame);
        const Matrix rayleigh = frame.transpose() * px.asDiagonal() * mapped;
        const Matrix res = mapped - frame * rayleigh;
        residual = std::sqrt((res.transpose() * px.asDiagonal() * res).trace());
        if (residual <= tol) {
            converged = true;
            break;
        }
        frame = std::move(mapped);
        orthonormalize_weighted_completing(frame, px, rng);
    }

    // Rotate the converged frame onto individual singular directions.
    const Matrix images = given_y.transpose() * frame;
    const Matrix gram = images.transpose() * py.asDiagonal() * images;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Matrix& vecs = eig.eigenvectors();
    frame = frame * vecs.rowwise().reverse();

    std::vector<TransformPair> pairs(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < k; ++c) {
        TransformPair& p = pairs[static_cast<std::size_t>(c)];
        p.phi.values = frame.col(c);
        p.iterations = iterations;
        p.residual = residual;
        p.converged = converged;
        Vector psi = given_y.transpose() * p.phi.values;
        if (standardize_in_place(psi, py) <= std::sqrt(kDegenerateVariance)) {
            p.degenerate = true;
            p.converged = true;
            p.rho = 0.0;
            p.psi.values = detail::random_standardized(j.size_y(), py, rng);
        } else {
            p.psi.values = psi;
            p.rho = p.phi.values.dot(j.probs() * psi);
        }
        detail::normalize_sign(p);
    }
    return pairs;
}

}  // namespace depscale

#endif  // DEPSCALE_ACE_HPP
