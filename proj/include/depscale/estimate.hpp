#ifndef DEPSCALE_ESTIMATE_HPP
#define DEPSCALE_ESTIMATE_HPP

#include <depscale/error.hpp>
#include <depscale/joint.hpp>
#include <depscale/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace depscale {

/// One observed variable. Numeric columns keep their parsed values; every
/// column keeps the raw text for categorical use.
struct SampleColumn {
    std::string name;
    std::vector<std::string> text;
    std::vector<double> numeric;  // empty unless every entry parsed as a finite number

    bool is_numeric() const noexcept { return !text.empty() && numeric.size() == text.size(); }
    std::size_t size() const noexcept { return text.size(); }
};

inline SampleColumn numeric_column(std::string name, std::vector<double> values) {
    SampleColumn c;
    c.name = std::move(name);
    c.text.reserve(values.size());
    for (double v : values) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        c.text.push_back(os.str());
    }
    c.numeric = std::move(values);
    return c;
}

inline SampleColumn text_column(std::string name, std::vector<std::string> values) {
    SampleColumn c;
    c.name = std::move(name);
    c.text = std::move(values);
    return c;
}

/// Paired observations: an X column and one or more Y columns that are
/// binned jointly into a product alphabet.
class SampleTable {
public:
    SampleTable(SampleColumn x, std::vector<SampleColumn> y) : x_(std::move(x)), y_(std::move(y)) {
        if (y_.empty()) throw Error(ErrorCode::InvalidArgument, "at least one Y column is required");
        const std::size_t n = x_.size();
        if (n < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 rows, got " + std::to_string(n));
        auto check = [n](const SampleColumn& c) {
            if (c.size() != n) throw Error(ErrorCode::InvalidArgument, "column " + c.name + " has a different length");
            for (std::size_t i = 0; i < n; ++i) {
                if (c.text[i].empty() || (c.is_numeric() && !std::isfinite(c.numeric[i])))
                    throw Error(ErrorCode::InvalidArgument,
                                "missing value in column " + c.name + " at row " + std::to_string(i));
            }
        };
        check(x_);
        for (const auto& c : y_) check(c);
    }

    const SampleColumn& x() const noexcept { return x_; }
    const std::vector<SampleColumn>& y() const noexcept { return y_; }
    std::size_t rows() const noexcept { return x_.size(); }

private:
    SampleColumn x_;
    std::vector<SampleColumn> y_;
};

enum class BinningStrategy { Quantile, UniformWidth, Categorical };

struct BinningSpec {
    BinningStrategy strategy = BinningStrategy::Quantile;
    int bins_x = 8;
    int bins_y = 8;  // per Y column
};

struct ColumnBinning {
    std::vector<int> codes;
    std::vector<std::string> labels;
    bool fell_back_to_categorical = false;
};

namespace detail {

inline std::string interval_label(double lo, double hi) {
    std::ostringstream os;
    os.precision(6);
    os << '[' << lo << ',' << hi << ')';
    return os.str();
}

inline ColumnBinning categorical_binning(const SampleColumn& c) {
    ColumnBinning b;
    b.codes.resize(c.size());
    if (c.is_numeric()) {
        std::map<double, int> index;
        for (double v : c.numeric) index.emplace(v, 0);
        int next = 0;
        for (auto& [v, code] : index) {
            code = next++;
            std::ostringstream os;
            os.precision(17);
            os << v;
            b.labels.push_back(os.str());
        }
        for (std::size_t i = 0; i < c.size(); ++i) b.codes[i] = index.at(c.numeric[i]);
    } else {
        std::map<std::string, int> index;
        for (const auto& v : c.text) index.emplace(v, 0);
        int next = 0;
        for (auto& [v, code] : index) {
            code = next++;
            b.labels.push_back(v);
        }
        for (std::size_t i = 0; i < c.size(); ++i) b.codes[i] = index.at(c.text[i]);
    }
    return b;
}

inline ColumnBinning edge_binning(const SampleColumn& c, const std::vector<double>& edges, double lo, double hi) {
    ColumnBinning b;
    b.codes.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double v = c.numeric[i];
        b.codes[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v,
                                                       [](double value, double edge) { return value <= edge; }) -
                                      edges.begin());
    }
    for (std::size_t k = 0; k <= edges.size(); ++k)
        b.labels.push_back(interval_label(k == 0 ? lo : edges[k - 1], k == edges.size() ? hi : edges[k]));
    return b;
}

/// Edges are midpoints of adjacent order statistics at ranks round(i n / k);
/// a value equal to an edge falls in the lower bin.
inline std::vector<double> quantile_edges(const std::vector<double>& values, int bins) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(bins) - 1);
    for (int i = 1; i < bins; ++i) {
        auto cut = static_cast<std::size_t>(std::llround(static_cast<double>(i) * static_cast<double>(n) / bins));
        cut = std::clamp<std::size_t>(cut, 1, n - 1);
        edges.push_back(0.5 * (values[order[cut - 1]] + values[order[cut]]));
    }
    return edges;
}

inline ColumnBinning bin_column(const SampleColumn& c, BinningStrategy strategy, int bins) {
    if (strategy == BinningStrategy::Categorical) return categorical_binning(c);
    if (!c.is_numeric())
        throw Error(ErrorCode::ParseError, "column " + c.name + " is not numeric; use categorical binning");
    const auto [min_it, max_it] = std::minmax_element(c.numeric.begin(), c.numeric.end());
    const double lo = *min_it;
    const double hi = *max_it;
    if (lo == hi) {
        ColumnBinning b = categorical_binning(c);
        b.fell_back_to_categorical = true;
        return b;
    }
    if (strategy == BinningStrategy::Quantile) return edge_binning(c, quantile_edges(c.numeric, bins), lo, hi);

    std::vector<double> edges;
    const double width = (hi - lo) / bins;
    for (int i = 1; i < bins; ++i) edges.push_back(lo + width * i);
    return edge_binning(c, edges, lo, hi);
}

/// Drops zero-count rows of `counts` by merging each into its nearest
/// nonempty neighbour (lower index on ties); labels are joined with '+'.
inline void merge_empty_rows(Matrix& counts, std::vector<std::string>& labels) {
    const Eigen::Index n = counts.rows();
    const Vector mass = counts.rowwise().sum();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
        if (mass(i) > 0.0) keep.push_back(i);
    if (static_cast<Eigen::Index>(keep.size()) == n) return;

    std::vector<std::string> merged(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) merged[k] = labels[static_cast<std::size_t>(keep[k])];
    for (Eigen::Index i = 0; i < n; ++i) {
        if (mass(i) > 0.0) continue;
        std::size_t best = 0;
        Eigen::Index best_dist = n + 1;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            const Eigen::Index d = std::abs(keep[k] - i);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        merged[best] = keep[best] < i ? merged[best] + "+" + labels[static_cast<std::size_t>(i)]
                                      : labels[static_cast<std::size_t>(i)] + "+" + merged[best];
    }
    Matrix out(static_cast<Eigen::Index>(keep.size()), counts.cols());
    for (std::size_t k = 0; k < keep.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = counts.row(keep[k]);
    counts = std::move(out);
    labels = std::move(merged);
}

}  // namespace detail

struct EmpiricalJoint {
    DiscreteJoint joint;
    std::size_t n = 0;
    std::vector<std::string> warnings;
};

/// Bins samples into a pmf of cell frequencies. Empty bins are merged into a
/// neighbour so every atom keeps positive mass.
inline EmpiricalJoint empirical_joint_report(const SampleTable& s, const BinningSpec& spec) {
    if (spec.strategy != BinningStrategy::Categorical && (spec.bins_x < 2 || spec.bins_y < 2))
        throw Error(ErrorCode::InvalidArgument, "bins must be >= 2 for quantile and uniform-width binning");
    std::vector<std::string> warnings;
    const ColumnBinning bx = detail::bin_column(s.x(), spec.strategy, spec.bins_x);
    if (bx.fell_back_to_categorical) warnings.push_back("column " + s.x().name + " is constant; binned categorically");

    std::vector<int> y_codes(s.rows(), 0);
    std::vector<std::string> y_labels{""};
    for (const auto& col : s.y()) {
        const ColumnBinning by = detail::bin_column(col, spec.strategy, spec.bins_y);
        if (by.fell_back_to_categorical) warnings.push_back("column " + col.name + " is constant; binned categorically");
        const auto width = static_cast<int>(by.labels.size());
        for (std::size_t i = 0; i < s.rows(); ++i) y_codes[i] = y_codes[i] * width + by.codes[i];
        std::vector<std::string> product;
        product.reserve(y_labels.size() * by.labels.size());
        for (const auto& prefix : y_labels)
            for (const auto& label : by.labels) product.push_back(prefix.empty() ? label : prefix + "," + label);
        y_labels = std::move(product);
    }

    Matrix counts = Matrix::Zero(static_cast<Eigen::Index>(bx.labels.size()), static_cast<Eigen::Index>(y_labels.size()));
    for (std::size_t i = 0; i < s.rows(); ++i) counts(bx.codes[i], y_codes[i]) += 1.0;

    std::vector<std::string> x_labels = bx.labels;
    detail::merge_empty_rows(counts, x_labels);
    Matrix transposed = counts.transpose();
    detail::merge_empty_rows(transposed, y_labels);
    counts = transposed.transpose();

    const auto n = s.rows();
    if (static_cast<double>(n) < static_cast<double>(counts.rows()) * static_cast<double>(counts.cols()))
        warnings.push_back("fewer samples than cells");
    return EmpiricalJoint{make_joint(counts / static_cast<double>(n), std::move(x_labels), std::move(y_labels)), n,
                          std::move(warnings)};
}

inline DiscreteJoint empirical_joint(const SampleTable& s, const BinningSpec& spec) {
    return empirical_joint_report(s, spec).joint;
}

struct EstimateReport {
    DependenceProfile profile;
    SingularSpectrum spectrum;
    std::size_t n = 0;
    Eigen::Index bins_x = 0;
    Eigen::Index bins_y = 0;
    bool bias_warning = false;
    std::vector<std::string> warnings;
};

/// Plug-in dependence profile of the binned sample. Flags plug-in bias when
/// n < 10 * bins_x * bins_y (effective bins after merging).
inline EstimateReport estimate_profile(const SampleTable& s, const BinningSpec& spec, int max_order,
                                       double tol = kRankTolerance) {
    EmpiricalJoint e = empirical_joint_report(s, spec);
    EstimateReport r;
    r.spectrum = singular_spectrum(e.joint);
    r.profile = dependence_scale(r.spectrum, max_order, tol);
    r.n = e.n;
    r.bins_x = e.joint.size_x();
    r.bins_y = e.joint.size_y();
    r.bias_warning = static_cast<double>(r.n) < 10.0 * static_cast<double>(r.bins_x * r.bins_y);
    r.warnings = std::move(e.warnings);
    return r;
}

}  // namespace depscale

#endif  // DEPSCALE_ESTIMATE_HPP
