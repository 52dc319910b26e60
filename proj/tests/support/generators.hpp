#ifndef DEPSCALE_TESTS_GENERATORS_HPP
#define DEPSCALE_TESTS_GENERATORS_HPP

#include <depscale/joint.hpp>
#include <depscale/structure.hpp>

#include <algorithm>
#include <functional>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace depscale::testing {

using Rng = std::mt19937_64;

/// Dirichlet(alpha) draw of length n; entries strictly positive.
inline Vector random_probability(Rng& rng, Eigen::Index n, double alpha = 1.0) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    Vector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = std::max(gamma(rng), 1e-6);
    return p / p.sum();
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Flat Dirichlet over all cells. With alpha < 1 the draw is spikier, which
/// gives strongly dependent tables.
inline DiscreteJoint random_joint(Rng& rng, Eigen::Index nx, Eigen::Index ny, double alpha = 1.0) {
    const Vector cells = random_probability(rng, nx * ny, alpha);
    return make_joint(Eigen::Map<const Matrix>(cells.data(), nx, ny));
}

inline DiscreteJoint random_independent_joint(Rng& rng, Eigen::Index nx, Eigen::Index ny) {
    return make_independent_joint(random_probability(rng, nx), random_probability(rng, ny));
}

/// Mixture of families so that property sweeps see independent, near-functional
/// and generic tables.
inline DiscreteJoint random_mixed_joint(Rng& rng, Eigen::Index nx, Eigen::Index ny) {
    switch (uniform_int(rng, 0, 4)) {
        case 0: return random_independent_joint(rng, nx, ny);
        case 1: return random_joint(rng, nx, ny, 0.2);
        default: return random_joint(rng, nx, ny, 1.0);
    }
}

/// Random partition of {0..n-1} into between 1 and n nonempty groups.
inline Partition random_partition(Rng& rng, std::size_t n) {
    const int groups = uniform_int(rng, 1, static_cast<int>(n));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Partition p(static_cast<std::size_t>(groups));
    for (std::size_t i = 0; i < n; ++i)
        p[i < static_cast<std::size_t>(groups) ? i : static_cast<std::size_t>(uniform_int(rng, 0, groups - 1))]
            .push_back(perm[i]);
    return p;
}

/// Columns of a random n x k frame, centered and orthonormal in L2(w).
inline Matrix random_weighted_frame(Rng& rng, const Vector& w, Eigen::Index k) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix f(w.size(), k);
    for (auto& v : f.reshaped()) v = normal(rng);
    f.rowwise() -= w.transpose() * f;
    const Matrix scaled = w.cwiseSqrt().asDiagonal() * f;
    const Matrix q = Eigen::HouseholderQR<Matrix>(scaled).householderQ() * Matrix::Identity(w.size(), k);
    return w.cwiseSqrt().cwiseInverse().asDiagonal() * q;
}

/// p(x|y) = p0(x) + sum_i p_i(x) q_i(y) drawn through its singular form
/// P = p_x p_y^T (1 + sum_i s_i a_i b_i^T): a_i, b_i centered and orthonormal
/// under the marginals, every s_i >= 0.15 and every cell at least 5% of
/// p_x p_y. Draws violating positivity are shrunk, then redrawn if shrinking
/// pushes a singular value below the floor.
inline DiscreteJoint random_finite_rank_joint(Rng& rng, Eigen::Index nx, Eigen::Index ny, int k,
                                              std::vector<RankComponent>* out = nullptr,
                                              std::vector<double>* singular_values = nullptr) {
    std::uniform_real_distribution<double> strength(0.3, 0.95);
    Vector px, py;
    Matrix a, b;
    std::vector<double> s(static_cast<std::size_t>(k));
    for (int attempt = 0;; ++attempt) {
        px = random_probability(rng, nx, 5.0);
        py = random_probability(rng, ny, 5.0);
        if (k == 0) break;
        a = random_weighted_frame(rng, px, k);
        b = random_weighted_frame(rng, py, k);
        for (auto& v : s) v = strength(rng);
        std::sort(s.begin(), s.end(), std::greater<>());
        Matrix shape = Matrix::Zero(nx, ny);
        for (int i = 0; i < k; ++i) shape += s[static_cast<std::size_t>(i)] * a.col(i) * b.col(i).transpose();
        const double worst = shape.minCoeff();
        const double shrink = worst < -0.95 ? -0.95 / worst : 1.0;
        if (shrink * s.back() >= 0.15 || attempt > 10000) {
            for (auto& v : s) v *= shrink;
            break;
        }
    }
    std::vector<RankComponent> comps(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        auto& c = comps[static_cast<std::size_t>(i)];
        c.p = s[static_cast<std::size_t>(i)] * px.cwiseProduct(a.col(i));
        c.p.array() -= c.p.mean();
        c.q = b.col(i);
    }
    if (out) *out = comps;
    if (singular_values) *singular_values = s;
    return make_finite_rank_joint(px, comps, py);
}

}  // namespace depscale::testing

#endif  // DEPSCALE_TESTS_GENERATORS_HPP
