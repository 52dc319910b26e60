#ifndef DEPSCALE_STRUCTURE_HPP
#define DEPSCALE_STRUCTURE_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>
#include <depscale/spectral.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace depscale {

struct CompletenessResult {
    bool complete = false;
    /// Smallest singular value of the centered X -> Y operator over all
    /// |X|-1 centered directions (0 when |X| > |Y|; +inf when |X| = 1).
    double smallest_sigma = 0.0;
    /// A standardized phi whose conditional expectation given Y is constant.
    std::optional<FunctionTable> witness;
    /// var E{witness(X) | Y}.
    double witness_image_variance = 0.0;
};

/// Decides whether E{phi(X)|Y} = const forces phi to be constant, i.e.
/// whether the centered X -> Y conditional operator has a trivial kernel.
inline CompletenessResult check_completeness(const DiscreteJoint& j, double tol = kRankTolerance) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    CompletenessResult result;
    const Eigen::Index nx = j.size_x();
    const Eigen::Index ny = j.size_y();
    if (nx == 1) {
        result.complete = true;
        result.smallest_sigma = std::numeric_limits<double>::infinity();
        return result;
    }

    const CenteredOperator c = centered_operator(j);
    // Kernel of C^T: columns of the full left singular basis of C.
    Vector kernel_u;
    if (ny == 1) {
        kernel_u = Vector::Unit(nx - 1, 0);
        result.smallest_sigma = 0.0;
    } else {
        Eigen::JacobiSVD<Matrix> svd(c.op, Eigen::ComputeFullU);
        const Vector& s = svd.singularValues();
        if (!s.allFinite()) throw Error(ErrorCode::SvdFailure, "singular values are not finite");
        if (nx > ny) {
            // Fewer Y atoms than X atoms: the kernel is nontrivial by dimension.
            result.smallest_sigma = 0.0;
            kernel_u = svd.matrixU().col(nx - 2);
        } else {
            result.smallest_sigma = s(s.size() - 1);
            if (result.smallest_sigma > tol) {
                result.complete = true;
                return result;
            }
            kernel_u = svd.matrixU().col(s.size() - 1);
        }
    }

    const Vector whitened = c.basis_x * kernel_u;
    FunctionTable phi{whitened.cwiseQuotient(j.p_x().cwiseSqrt()), Side::X, true};
    standardize_in_place(phi.values, j.p_x());
    const Vector image = conditional_matrix(j).transpose() * phi.values;
    result.witness_image_variance = variance_under(image, j.p_y());
    result.witness = std::move(phi);
    return result;
}

/// One term p_i(x) q_i(y) of a finite-rank conditional density.
struct RankComponent {
    Vector p;  // signed, sums to 0 over X
    Vector q;  // function on Y
};

/// Joint with p(x|y) = p0(x) + sum_i p_i(x) q_i(y) and Y-marginal p_y; its
/// centered operator has rank at most components.size().
inline DiscreteJoint make_finite_rank_joint(const Vector& p0, const std::vector<RankComponent>& components,
                                            const Vector& p_y) {
    require_probability_vector(p0, "p0", false);
    require_probability_vector(p_y, "p_y", true);
    const Eigen::Index nx = p0.size();
    const Eigen::Index ny = p_y.size();

    Matrix cond = p0.replicate(1, ny);
    for (std::size_t i = 0; i < components.size(); ++i) {
        const RankComponent& c = components[i];
        if (c.p.size() != nx || c.q.size() != ny || !c.p.allFinite() || !c.q.allFinite())
            throw Error(ErrorCode::InvalidArgument, "component " + std::to_string(i) + " has the wrong shape");
        if (std::abs(c.p.sum()) > 1e-12)
            throw Error(ErrorCode::ComponentNotCentered, "component " + std::to_string(i) + " sums to " +
                                                             std::to_string(c.p.sum()));
        cond += c.p * c.q.transpose();
    }
    for (Eigen::Index x = 0; x < nx; ++x)
        for (Eigen::Index y = 0; y < ny; ++y) {
            if (cond(x, y) < -1e-15) {
                std::ostringstream os;
                os.precision(17);
                os << "p(x=" << x << " | y=" << y << ") = " << cond(x, y);
                throw Error(ErrorCode::NegativeConditional, os.str());
            }
            cond(x, y) = std::max(cond(x, y), 0.0);
        }
    return make_joint(cond * p_y.asDiagonal());
}

/// (X, Y) in C_m, i.e. D_m(X:Y) <= tol.
inline bool verify_class_membership(const DiscreteJoint& j, int m, double tol = kRankTolerance) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be >= 0");
    return dependence_scale(j, m, tol).d.back() <= tol;
}

}  // namespace depscale

#endif  // DEPSCALE_STRUCTURE_HPP
