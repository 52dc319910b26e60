#ifndef DEPSCALE_WEIGHTED_HPP
#define DEPSCALE_WEIGHTED_HPP

#include <depscale/joint.hpp>

#include <algorithm>
#include <cmath>
#include <random>

// Linear algebra in L2(p): functions on a finite alphabet with inner product
// <f, g> = sum_a p(a) f(a) g(a), restricted to zero-mean functions.

namespace depscale {

inline double weighted_dot(const Vector& f, const Vector& g, const Vector& w) { return w.dot(f.cwiseProduct(g)); }

/// Centers the columns of `frame` under `w` and orthonormalizes them in the
/// w-weighted inner product (modified Gram-Schmidt, two passes). Returns false
/// when a column collapses.
inline bool orthonormalize_weighted(Matrix& frame, const Vector& w) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < frame.cols(); ++c) {
            auto col = frame.col(c);
            col.array() -= w.dot(col);
            for (Eigen::Index p = 0; p < c; ++p) col -= w.dot(frame.col(p).cwiseProduct(col)) * frame.col(p);
            const double norm = std::sqrt(w.dot(col.cwiseProduct(col)));
            if (!(norm > 1e-300)) return false;
            col /= norm;
        }
    }
    return true;
}

/// As orthonormalize_weighted, but a column whose residual is negligible
/// relative to its input norm is redrawn at random. Requires
/// frame.cols() <= frame.rows() - 1.
template <typename Rng>
void orthonormalize_weighted_completing(Matrix& frame, const Vector& w, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double scale = 0.0;
    for (Eigen::Index c = 0; c < frame.cols(); ++c)
        scale = std::max(scale, std::sqrt(w.dot(frame.col(c).cwiseProduct(frame.col(c)))));
    for (Eigen::Index c = 0; c < frame.cols(); ++c) {
        auto col = frame.col(c);
        for (int attempt = 0;; ++attempt) {
            for (int pass = 0; pass < 2; ++pass) {
                col.array() -= w.dot(col);
                for (Eigen::Index p = 0; p < c; ++p) col -= w.dot(frame.col(p).cwiseProduct(col)) * frame.col(p);
            }
            const double norm = std::sqrt(w.dot(col.cwiseProduct(col)));
            if (norm > 1e-12 * std::max(scale, 1e-300) && norm > 1e-300) {
                col /= norm;
                break;
            }
            for (Eigen::Index r = 0; r < col.size(); ++r) col(r) = normal(rng);
            scale = 1.0;
        }
    }
}

}  // namespace depscale

#endif  // DEPSCALE_WEIGHTED_HPP
