#ifndef DEPSCALE_SPECTRAL_HPP
#define DEPSCALE_SPECTRAL_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace depscale {

/// Default threshold below which a singular value counts as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Q[x][y] = P(x, y) / sqrt(p(x) p(y)). Its top singular pair is
/// (sqrt(p_x), sqrt(p_y)) with value 1; the rest is the spectrum of
/// phi -> E{phi(X) | Y} on zero-mean functions.
inline Matrix normalized_matrix(const DiscreteJoint& j) {
    const Vector ix = j.p_x().cwiseSqrt().cwiseInverse();
    const Vector iy = j.p_y().cwiseSqrt().cwiseInverse();
    return ix.asDiagonal() * j.probs() * iy.asDiagonal();
}

/// Orthonormal basis (columns) of the complement of the unit vector `s`.
inline Matrix complement_basis(const Vector& s) {
    const Eigen::Index n = s.size();
    if (n <= 1) return Matrix(n, 0);
    Eigen::HouseholderQR<Matrix> qr{Matrix(s)};
    const Matrix q = qr.householderQ();
    return q.rightCols(n - 1);
}

/// The normalized matrix restricted to the complements of the constant
/// directions: C = Bx^T Q By, of size (|X|-1) x (|Y|-1).
struct CenteredOperator {
    Matrix basis_x;
    Matrix basis_y;
    Matrix op;
    double sigma0 = 0.0;  // sqrt(p_x)^T Q sqrt(p_y)
};

inline CenteredOperator centered_operator(const DiscreteJoint& j) {
    const Matrix q = normalized_matrix(j);
    const Vector sx = j.p_x().cwiseSqrt();
    const Vector sy = j.p_y().cwiseSqrt();
    CenteredOperator c;
    c.basis_x = complement_basis(sx);
    c.basis_y = complement_basis(sy);
    c.op = c.basis_x.transpose() * q * c.basis_y;
    c.sigma0 = sx.dot(q * sy);
    return c;
}

struct SingularSpectrum {
    double sigma0 = 1.0;
    Vector sigma;  // non-increasing, length min(|X|, |Y|) - 1
};

inline SingularSpectrum singular_spectrum(const DiscreteJoint& j) {
    const CenteredOperator c = centered_operator(j);
    SingularSpectrum s;
    s.sigma0 = c.sigma0;
    if (c.op.rows() == 0 || c.op.cols() == 0) {
        s.sigma = Vector(0);
        return s;
    }
    Eigen::JacobiSVD<Matrix> svd(c.op);
    const Vector& values = svd.singularValues();
    if (!values.allFinite() || !std::isfinite(s.sigma0))
        throw Error(ErrorCode::SvdFailure, "singular values are not finite");
    // Operator norm is at most one; anything above is rounding.
    s.sigma = values.cwiseMin(1.0);
    return s;
}

inline double maximal_correlation(const SingularSpectrum& s) { return s.sigma.size() ? s.sigma(0) : 0.0; }
inline double maximal_correlation(const DiscreteJoint& j) { return maximal_correlation(singular_spectrum(j)); }

inline double kolmogorov_index(const SingularSpectrum& s) {
    const double r = maximal_correlation(s);
    return r * r;
}
inline double kolmogorov_index(const DiscreteJoint& j) { return kolmogorov_index(singular_spectrum(j)); }

/// Smallest m with sigma[m] <= tol; the spectrum length if none vanishes.
inline int m_dependence_order(const SingularSpectrum& s, double tol = kRankTolerance) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    for (Eigen::Index m = 0; m < s.sigma.size(); ++m)
        if (s.sigma(m) <= tol) return static_cast<int>(m);
    return static_cast<int>(s.sigma.size());
}
inline int m_dependence_order(const DiscreteJoint& j, double tol = kRankTolerance) {
    return m_dependence_order(singular_spectrum(j), tol);
}

struct DependenceProfile {
    double r = 0.0;
    std::vector<double> d;     // d[m] = D_m(X:Y), m = 0..max_order
    std::optional<int> order;  // smallest m <= max_order with D_m = 0
};

/// D_m = prod_{i<=m} sigma_i^2, with sigma_i = 0 past the end of the spectrum.
inline DependenceProfile dependence_scale(const SingularSpectrum& s, int max_order, double tol = kRankTolerance) {
    if (max_order < 0) throw Error(ErrorCode::InvalidArgument, "max_order must be >= 0");
    DependenceProfile p;
    p.r = maximal_correlation(s);
    p.d.resize(static_cast<std::size_t>(max_order) + 1);
    double acc = 1.0;
    for (int m = 0; m <= max_order; ++m) {
        const double sigma = m < s.sigma.size() ? s.sigma(m) : 0.0;
        acc *= sigma * sigma;
        p.d[static_cast<std::size_t>(m)] = acc;
    }
    const int order = m_dependence_order(s, tol);
    if (order <= max_order) p.order = order;
    return p;
}

inline DependenceProfile dependence_scale(const DiscreteJoint& j, int max_order, double tol = kRankTolerance) {
    return dependence_scale(singular_spectrum(j), max_order, tol);
}

}  // namespace depscale

#endif  // DEPSCALE_SPECTRAL_HPP
