#ifndef DEPSCALE_GAUSSIAN_HPP
#define DEPSCALE_GAUSSIAN_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace depscale {

/// Smallest eigenvalue accepted for the diagonal blocks.
inline constexpr double kEigenvalueFloor = 1e-12;

/// Block covariance of a jointly Gaussian (X, Y); v21 is v12 transposed.
class GaussianJoint {
public:
    const Matrix& v11() const noexcept { return v11_; }
    const Matrix& v12() const noexcept { return v12_; }
    const Matrix& v22() const noexcept { return v22_; }
    Matrix v21() const { return v12_.transpose(); }
    Eigen::Index dim_x() const noexcept { return v11_.rows(); }
    Eigen::Index dim_y() const noexcept { return v22_.rows(); }
    bool scalar() const noexcept { return dim_x() == 1 && dim_y() == 1; }

    Matrix full() const {
        Matrix f(dim_x() + dim_y(), dim_x() + dim_y());
        f << v11_, v12_, v12_.transpose(), v22_;
        return f;
    }

private:
    GaussianJoint(Matrix v11, Matrix v12, Matrix v22) : v11_(std::move(v11)), v12_(std::move(v12)), v22_(std::move(v22)) {}
    friend GaussianJoint make_gaussian_joint(const Matrix&, const Matrix&, const Matrix&);

    Matrix v11_;
    Matrix v12_;
    Matrix v22_;
};

namespace detail {

inline void require_symmetric(const Matrix& m, const char* name) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::InvalidBlock, std::string(name) + " is not symmetric");
}

inline void require_positive_definite(const Matrix& m, const char* name) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues().minCoeff();
    if (!(smallest > kEigenvalueFloor)) {
        std::ostringstream os;
        os.precision(17);
        os << name << " has eigenvalue " << smallest;
        throw Error(ErrorCode::NotPositiveDefinite, os.str());
    }
}

/// Symmetric inverse square root through the eigendecomposition.
inline Matrix inverse_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Vector inv = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

inline GaussianJoint make_gaussian_joint(const Matrix& v11, const Matrix& v12, const Matrix& v22) {
    if (v11.rows() == 0 || v11.rows() != v11.cols() || v22.rows() == 0 || v22.rows() != v22.cols() ||
        v12.rows() != v11.rows() || v12.cols() != v22.rows())
        throw Error(ErrorCode::InvalidBlock, "block dimensions do not match");
    if (!v11.allFinite() || !v12.allFinite() || !v22.allFinite())
        throw Error(ErrorCode::InvalidBlock, "non-finite covariance entry");
    detail::require_symmetric(v11, "v11");
    detail::require_symmetric(v22, "v22");
    detail::require_positive_definite(v11, "v11");
    detail::require_positive_definite(v22, "v22");

    Matrix full(v11.rows() + v22.rows(), v11.rows() + v22.rows());
    full << v11, v12, v12.transpose(), v22;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(full, Eigen::EigenvaluesOnly);
    const double smallest = eig.eigenvalues().minCoeff();
    if (smallest < -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff())) {
        std::ostringstream os;
        os.precision(17);
        os << "covariance has eigenvalue " << smallest;
        throw Error(ErrorCode::NotPositiveDefinite, os.str());
    }
    return GaussianJoint(v11, v12, v22);
}

/// Splits a full (m+n) x (m+n) covariance after the first dim_x coordinates.
inline GaussianJoint gaussian_from_covariance(const Matrix& full, Eigen::Index dim_x) {
    if (full.rows() != full.cols()) throw Error(ErrorCode::InvalidBlock, "covariance is not square");
    if (dim_x < 1 || dim_x >= full.rows())
        throw Error(ErrorCode::InvalidBlock, "dim_x must lie in [1, " + std::to_string(full.rows() - 1) + "]");
    detail::require_symmetric(full, "covariance");
    const Eigen::Index n = full.rows() - dim_x;
    return make_gaussian_joint(full.topLeftCorner(dim_x, dim_x), full.topRightCorner(dim_x, n),
                               full.bottomRightCorner(n, n));
}

/// Largest eigenvalue of V11^{-1/2} V12 V22^{-1} V21 V11^{-1/2}.
inline double gaussian_lambda_max(const GaussianJoint& g) {
    if (g.scalar()) {
        const double r = g.v12()(0, 0) / std::sqrt(g.v11()(0, 0) * g.v22()(0, 0));
        return r * r;
    }
    const Matrix w = detail::inverse_sqrt(g.v11());
    const Matrix sigma = w * g.v12() * g.v22().llt().solve(g.v21()) * w;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sigma + sigma.transpose()), Eigen::EigenvaluesOnly);
    return std::clamp(eig.eigenvalues().maxCoeff(), 0.0, 1.0);
}

/// R(X, Y) of a Gaussian joint: the largest canonical correlation.
inline double gaussian_r(const GaussianJoint& g) {
    if (g.scalar()) return std::min(1.0, std::abs(g.v12()(0, 0)) / std::sqrt(g.v11()(0, 0) * g.v22()(0, 0)));
    return std::sqrt(gaussian_lambda_max(g));
}

inline double gaussian_d(const GaussianJoint& g) {
    const double r = gaussian_r(g);
    return r * r;
}

struct NoiseCurve {
    std::vector<double> lambdas;
    std::vector<double> r_values;
};

/// R(X : Y + lambda Z) for Gaussian Z with variance var_z, independent of (X, Y).
inline NoiseCurve noise_curve(const GaussianJoint& g, double var_z, const std::vector<double>& lambdas) {
    if (!g.scalar()) throw Error(ErrorCode::NotScalar, "noise curves need scalar X and Y");
    if (!(var_z > 0.0) || !std::isfinite(var_z)) throw Error(ErrorCode::InvalidArgument, "var_z must be positive");
    NoiseCurve curve;
    curve.lambdas = lambdas;
    curve.r_values.reserve(lambdas.size());
    for (double lambda : lambdas) {
        Matrix v22(1, 1);
        v22(0, 0) = g.v22()(0, 0) + lambda * lambda * var_z;
        curve.r_values.push_back(gaussian_r(make_gaussian_joint(g.v11(), g.v12(), v22)));
    }
    return curve;
}

/// Covariance blocks of vector-valued atom coordinates under a discrete joint
/// (row x of x_coords is the X-value of atom x).
inline GaussianJoint moment_blocks(const DiscreteJoint& j, const Matrix& x_coords, const Matrix& y_coords) {
    if (x_coords.rows() != j.size_x() || y_coords.rows() != j.size_y())
        throw Error(ErrorCode::InvalidArgument, "coordinate tables do not match the joint");
    Matrix xc = x_coords;
    Matrix yc = y_coords;
    xc.rowwise() -= j.p_x().transpose() * x_coords;
    yc.rowwise() -= j.p_y().transpose() * y_coords;
    const Matrix v11 = xc.transpose() * j.p_x().asDiagonal() * xc;
    const Matrix v22 = yc.transpose() * j.p_y().asDiagonal() * yc;
    const Matrix v12 = xc.transpose() * j.probs() * yc;
    return make_gaussian_joint(0.5 * (v11 + v11.transpose()), v12, 0.5 * (v22 + v22.transpose()));
}

namespace detail {

/// Phi(hi) - Phi(lo) without cancellation in either tail.
inline double normal_mass(double lo, double hi) {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (!(hi > lo)) return 0.0;
    if (lo >= 0.0) return 0.5 * (std::erfc(lo * inv_sqrt2) - std::erfc(hi * inv_sqrt2));
    if (hi <= 0.0) return 0.5 * (std::erfc(-hi * inv_sqrt2) - std::erfc(-lo * inv_sqrt2));
    return 1.0 - 0.5 * std::erfc(hi * inv_sqrt2) - 0.5 * std::erfc(-lo * inv_sqrt2);
}

}  // namespace detail

/// Exact (quadrature) pmf of a standard bivariate normal with correlation
/// `rho` on the bins x bins grid of marginal quantiles.
inline DiscreteJoint quantile_discretize(double rho, int bins) {
    if (bins < 2) throw Error(ErrorCode::InvalidArgument, "bins must be >= 2");
    if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::InvalidArgument, "|rho| must be < 1");
    constexpr double kTail = 12.0;
    const boost::math::normal_distribution<double> normal;
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    edges.front() = -std::numeric_limits<double>::infinity();
    edges.back() = std::numeric_limits<double>::infinity();
    for (int i = 1; i < bins; ++i)
        edges[static_cast<std::size_t>(i)] = boost::math::quantile(normal, static_cast<double>(i) / bins);

    const double s = std::sqrt(1.0 - rho * rho);
    constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    Matrix cells(bins, bins);
    for (int i = 0; i < bins; ++i) {
        const double a = std::max(edges[static_cast<std::size_t>(i)], -kTail);
        const double b = std::min(edges[static_cast<std::size_t>(i) + 1], kTail);
        for (int k = 0; k < bins; ++k) {
            const double lo = edges[static_cast<std::size_t>(k)];
            const double hi = edges[static_cast<std::size_t>(k) + 1];
            auto integrand = [&](double x) {
                return inv_sqrt_2pi * std::exp(-0.5 * x * x) * detail::normal_mass((lo - rho * x) / s, (hi - rho * x) / s);
            };
            cells(i, k) = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 8, 1e-12);
        }
    }
    return make_joint(cells / cells.sum());
}

}  // namespace depscale

#endif  // DEPSCALE_GAUSSIAN_HPP
