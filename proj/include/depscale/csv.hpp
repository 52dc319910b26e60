#ifndef DEPSCALE_CSV_HPP
#define DEPSCALE_CSV_HPP

#include <depscale/error.hpp>
#include <depscale/estimate.hpp>
#include <depscale/joint.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

// Plain comma-separated tables: no embedded commas or newlines inside fields,
// optional surrounding double quotes, '#' comment lines and blank lines skipped.

namespace depscale::csv {

using Rows = std::vector<std::vector<std::string>>;

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    s = s.substr(first, last - first + 1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

inline std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline Rows read_rows(std::istream& in) {
    Rows rows;
    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                                 : comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline Rows read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    return read_rows(in);
}

struct LabeledMatrix {
    Matrix values;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
};

/// Numeric table with an optional header row and optional label column. A
/// header is present when any cell of the first row is non-numeric; a label
/// column when the first cell of the first data row is non-numeric.
inline LabeledMatrix parse_labeled_matrix(const Rows& rows) {
    if (rows.empty()) throw Error(ErrorCode::ParseError, "empty table");
    LabeledMatrix out;
    bool header = false;
    for (const auto& cell : rows.front())
        if (!parse_number(cell)) header = true;
    const std::size_t first_data = header ? 1 : 0;
    if (first_data >= rows.size()) throw Error(ErrorCode::ParseError, "table has a header but no data");
    const bool label_column = !parse_number(rows[first_data].front());
    const std::size_t offset = label_column ? 1 : 0;
    const std::size_t width = rows[first_data].size();
    if (width <= offset) throw Error(ErrorCode::ParseError, "table has no numeric columns");

    out.values.resize(static_cast<Eigen::Index>(rows.size() - first_data), static_cast<Eigen::Index>(width - offset));
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != width)
            throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                                   " fields, expected " + std::to_string(width));
        if (label_column) out.row_labels.push_back(row.front());
        for (std::size_t c = offset; c < width; ++c) {
            const auto v = parse_number(row[c]);
            if (!v)
                throw Error(ErrorCode::ParseError,
                            "non-numeric field '" + row[c] + "' at row " + std::to_string(r + 1));
            out.values(static_cast<Eigen::Index>(r - first_data), static_cast<Eigen::Index>(c - offset)) = *v;
        }
    }
    if (header) {
        const auto& h = rows.front();
        if (h.size() == width) {
            out.col_labels.assign(h.begin() + static_cast<std::ptrdiff_t>(offset), h.end());
        } else if (h.size() == width - offset) {
            out.col_labels = h;
        } else {
            throw Error(ErrorCode::ParseError, "header width does not match the data");
        }
    }
    return out;
}

inline DiscreteJoint read_joint(const std::string& path) {
    LabeledMatrix m = parse_labeled_matrix(read_rows(path));
    return make_joint(m.values, std::move(m.row_labels), std::move(m.col_labels));
}

inline Matrix read_matrix(const std::string& path) { return parse_labeled_matrix(read_rows(path)).values; }

/// Columns of a samples file; the first row is a header unless `has_header`
/// is false, in which case columns are named by their 0-based index.
inline std::vector<SampleColumn> parse_sample_columns(const Rows& rows, bool has_header = true) {
    if (rows.empty()) throw Error(ErrorCode::ParseError, "empty samples file");
    const std::size_t width = rows.front().size();
    std::vector<SampleColumn> cols(width);
    for (std::size_t c = 0; c < width; ++c) cols[c].name = has_header ? rows.front()[c] : std::to_string(c);
    for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw Error(ErrorCode::ParseError, "row " + std::to_string(r + 1) + " has " +
                                                   std::to_string(rows[r].size()) + " fields, expected " +
                                                   std::to_string(width));
        for (std::size_t c = 0; c < width; ++c) cols[c].text.push_back(rows[r][c]);
    }
    for (auto& col : cols) {
        std::vector<double> values;
        values.reserve(col.text.size());
        for (const auto& t : col.text) {
            const auto v = parse_number(t);
            if (!v || !std::isfinite(*v)) {
                values.clear();
                break;
            }
            values.push_back(*v);
        }
        col.numeric = std::move(values);
    }
    return cols;
}

inline std::vector<SampleColumn> read_sample_columns(const std::string& path, bool has_header = true) {
    return parse_sample_columns(read_rows(path), has_header);
}

/// Resolves a column by header name, falling back to a 0-based index.
inline const SampleColumn& select_column(const std::vector<SampleColumn>& cols, const std::string& key) {
    for (const auto& c : cols)
        if (c.name == key) return c;
    if (const auto idx = parse_number(key); idx && *idx >= 0 && *idx == static_cast<double>(static_cast<std::size_t>(*idx)) &&
                                            static_cast<std::size_t>(*idx) < cols.size())
        return cols[static_cast<std::size_t>(*idx)];
    throw Error(ErrorCode::InvalidArgument, "no column named or indexed '" + key + "'");
}

}  // namespace depscale::csv

#endif  // DEPSCALE_CSV_HPP
