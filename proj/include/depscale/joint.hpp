#ifndef DEPSCALE_JOINT_HPP
#define DEPSCALE_JOINT_HPP

#include <depscale/error.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace depscale {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Input tolerance on the total mass of a pmf table.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Joint pmf of (X, Y) on finite alphabets: rows index X atoms, columns Y atoms.
///
/// Immutable once built. Every atom carries strictly positive marginal mass and
/// the table sums to one up to rounding; construction goes through make_joint.
class DiscreteJoint {
public:
    const Matrix& probs() const noexcept { return probs_; }
    Eigen::Index size_x() const noexcept { return probs_.rows(); }
    Eigen::Index size_y() const noexcept { return probs_.cols(); }

    const Vector& p_x() const noexcept { return p_x_; }
    const Vector& p_y() const noexcept { return p_y_; }

    const std::vector<std::string>& labels_x() const noexcept { return labels_x_; }
    const std::vector<std::string>& labels_y() const noexcept { return labels_y_; }

    /// The joint of (Y, X).
    DiscreteJoint transposed() const {
        return DiscreteJoint(probs_.transpose(), labels_y_, labels_x_);
    }

private:
    DiscreteJoint(Matrix probs, std::vector<std::string> labels_x, std::vector<std::string> labels_y)
        : probs_(std::move(probs)), labels_x_(std::move(labels_x)), labels_y_(std::move(labels_y)) {
        p_x_ = probs_.rowwise().sum();
        p_y_ = probs_.colwise().sum().transpose();
    }

    friend DiscreteJoint make_joint(const Matrix&, std::vector<std::string>, std::vector<std::string>);

    Matrix probs_;
    Vector p_x_;
    Vector p_y_;
    std::vector<std::string> labels_x_;
    std::vector<std::string> labels_y_;
};

/// Validates a pmf table and renormalizes it to unit mass.
///
/// Atoms with zero marginal are rejected, never dropped. Labels are optional;
/// when given their count must match the table.
inline DiscreteJoint make_joint(const Matrix& probs, std::vector<std::string> labels_x = {},
                                std::vector<std::string> labels_y = {}) {
    if (probs.rows() == 0 || probs.cols() == 0)
        throw Error(ErrorCode::InvalidArgument, "joint table is empty");
    if (!probs.allFinite())
        throw Error(ErrorCode::InvalidArgument, "joint table has non-finite entries");
    for (Eigen::Index i = 0; i < probs.rows(); ++i)
        for (Eigen::Index k = 0; k < probs.cols(); ++k)
            if (probs(i, k) < 0.0) {
                std::ostringstream os;
                os << "entry (" << i << "," << k << ") = " << probs(i, k);
                throw Error(ErrorCode::NegativeEntry, os.str());
            }
    const double total = probs.sum();
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "entries sum to " << total;
        throw Error(ErrorCode::NotNormalized, os.str());
    }
    const Vector rows = probs.rowwise().sum();
    const Vector cols = probs.colwise().sum().transpose();
    for (Eigen::Index i = 0; i < rows.size(); ++i)
        if (!(rows(i) > 0.0))
            throw Error(ErrorCode::ZeroMarginal, "row " + std::to_string(i) + " has zero mass");
    for (Eigen::Index k = 0; k < cols.size(); ++k)
        if (!(cols(k) > 0.0))
            throw Error(ErrorCode::ZeroMarginal, "column " + std::to_string(k) + " has zero mass");
    if (!labels_x.empty() && static_cast<Eigen::Index>(labels_x.size()) != probs.rows())
        throw Error(ErrorCode::InvalidArgument, "row label count does not match the table");
    if (!labels_y.empty() && static_cast<Eigen::Index>(labels_y.size()) != probs.cols())
        throw Error(ErrorCode::InvalidArgument, "column label count does not match the table");

    return DiscreteJoint(probs / total, std::move(labels_x), std::move(labels_y));
}

inline DiscreteJoint make_joint(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = n_rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(n_rows, n_cols);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != n_cols)
            throw Error(ErrorCode::InvalidArgument, "ragged joint table");
        Eigen::Index k = 0;
        for (double v : row) m(i, k++) = v;
        ++i;
    }
    return make_joint(m);
}

/// The outer product p_x p_y^T.
inline DiscreteJoint make_independent_joint(const Vector& p_x, const Vector& p_y) {
    return make_joint(p_x * p_y.transpose());
}

inline std::pair<Vector, Vector> marginals(const DiscreteJoint& j) { return {j.p_x(), j.p_y()}; }

/// K[x][y] = P(x, y) / p(y): column y is the law of X given Y = y.
inline Matrix conditional_matrix(const DiscreteJoint& j) {
    return j.probs() * j.p_y().cwiseInverse().asDiagonal();
}

/// Row x is the law of Y given X = x.
inline Matrix conditional_matrix_given_x(const DiscreteJoint& j) {
    return j.p_x().cwiseInverse().asDiagonal() * j.probs();
}

inline void require_probability_vector(const Vector& r, std::string_view what, bool strictly_positive) {
    if (r.size() == 0) throw Error(ErrorCode::InvalidDistribution, std::string(what) + " is empty");
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r(i)) || r(i) < 0.0 || (strictly_positive && r(i) == 0.0))
            throw Error(ErrorCode::InvalidDistribution,
                        std::string(what) + " has an invalid entry at " + std::to_string(i));
    }
    if (std::abs(r.sum() - 1.0) > kNormalizationTolerance)
        throw Error(ErrorCode::InvalidDistribution, std::string(what) + " does not sum to 1");
}

/// Joint of (X, (Y, Z)) with Z ~ r independent of (X, Y).
/// Column y * |Z| + z holds P(x, y) r(z).
inline DiscreteJoint augment_with_independent(const DiscreteJoint& j, const Vector& r) {
    require_probability_vector(r, "independent factor", true);
    const Eigen::Index nz = r.size();
    Matrix out(j.size_x(), j.size_y() * nz);
    for (Eigen::Index y = 0; y < j.size_y(); ++y)
        for (Eigen::Index z = 0; z < nz; ++z) out.col(y * nz + z) = j.probs().col(y) * r(z);
    return make_joint(out);
}

using Partition = std::vector<std::vector<std::size_t>>;

/// Merges Y atoms: group g of the partition becomes column g of the result.
inline DiscreteJoint coarsen_y(const DiscreteJoint& j, const Partition& groups) {
    const auto ny = static_cast<std::size_t>(j.size_y());
    std::vector<int> seen(ny, 0);
    for (const auto& group : groups) {
        if (group.empty()) throw Error(ErrorCode::InvalidPartition, "empty group");
        for (std::size_t c : group) {
            if (c >= ny) throw Error(ErrorCode::InvalidPartition, "column " + std::to_string(c) + " out of range");
            if (seen[c]++) throw Error(ErrorCode::InvalidPartition, "column " + std::to_string(c) + " listed twice");
        }
    }
    for (std::size_t c = 0; c < ny; ++c)
        if (!seen[c]) throw Error(ErrorCode::InvalidPartition, "column " + std::to_string(c) + " not covered");

    Matrix out = Matrix::Zero(j.size_x(), static_cast<Eigen::Index>(groups.size()));
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t c : groups[g]) out.col(static_cast<Eigen::Index>(g)) += j.probs().col(static_cast<Eigen::Index>(c));
    return make_joint(out, j.labels_x());
}

enum class Side { X, Y };

/// Real-valued function on one alphabet of a joint (phi(X), psi(Y), q_i(Y), ...).
struct FunctionTable {
    Vector values;
    Side side = Side::X;
    bool standardized = false;
};

inline double mean_under(const Vector& f, const Vector& weights) { return weights.dot(f); }

inline double variance_under(const Vector& f, const Vector& weights) {
    const double mu = weights.dot(f);
    return weights.dot((f.array() - mu).square().matrix());
}

/// Centers and scales f to mean 0, variance 1 under `weights`. Returns the
/// pre-scaling standard deviation; f is left centered but unscaled when it is 0.
inline double standardize_in_place(Vector& f, const Vector& weights) {
    f.array() -= weights.dot(f);
    const double sd = std::sqrt(weights.dot(f.cwiseProduct(f)));
    if (sd > 0.0) f /= sd;
    return sd;
}

/// Pearson correlation of numeric atom values under the joint.
inline double label_correlation(const DiscreteJoint& j, const Vector& x_values, const Vector& y_values) {
    if (x_values.size() != j.size_x() || y_values.size() != j.size_y())
        throw Error(ErrorCode::InvalidArgument, "label vectors do not match the joint");
    const Vector xc = x_values.array() - j.p_x().dot(x_values);
    const Vector yc = y_values.array() - j.p_y().dot(y_values);
    const double cov = xc.dot(j.probs() * yc);
    const double vx = j.p_x().dot(xc.cwiseProduct(xc));
    const double vy = j.p_y().dot(yc.cwiseProduct(yc));
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

}  // namespace depscale

#endif  // DEPSCALE_JOINT_HPP
