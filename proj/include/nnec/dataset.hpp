#ifndef NNEC_DATASET_HPP
#define NNEC_DATASET_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"

/**
 * @file dataset.hpp
 *
 * @brief Numeric point matrices, delimited-text loading and the standard
 * preprocessing (per-variable unit-variance scaling, PCA to at most 100 dims).
 */

namespace nnec {

/// Row-major so that one point's coordinates are contiguous for distance loops.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/**
 * @brief Dense n x d matrix of points with optional ground-truth labels.
 *
 * Labels, when present, are contiguous ids 0..C-1.
 */
struct Dataset {
    PointMatrix points;
    std::optional<std::vector<int>> labels;

    std::size_t n() const { return static_cast<std::size_t>(points.rows()); }
    std::size_t d() const { return static_cast<std::size_t>(points.cols()); }

    /// Throws ValidationError if the dataset breaks its invariants.
    void validate() const {
        if (n() < 2) {
            throw ValidationError("dataset needs at least 2 points, got " + std::to_string(n()));
        }
        if (d() < 1) {
            throw ValidationError("dataset needs at least 1 numeric column");
        }
        if (!points.allFinite()) {
            throw ValidationError("dataset contains non-finite coordinates");
        }
        if (labels && labels->size() != n()) {
            throw ValidationError("label count " + std::to_string(labels->size()) + " does not match point count " +
                                  std::to_string(n()));
        }
    }
};

struct LoadOptions {
    char delimiter = ',';
    bool has_header = false;
    /// Either a 0-based column index or a header name (requires has_header).
    std::optional<std::variant<std::size_t, std::string>> label_column;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline std::optional<double> parse_double(std::string_view cell) {
    if (!cell.empty() && cell.front() == '+') {
        cell.remove_prefix(1);
    }
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

/**
 * Maps raw label strings to contiguous ids. If every label parses as a number the
 * ids follow ascending numeric order, otherwise ascending string order.
 */
inline std::vector<int> encode_labels(const std::vector<std::string>& raw) {
    bool numeric = true;
    std::vector<double> as_number(raw.size());
    for (std::size_t i = 0; i < raw.size() && numeric; ++i) {
        const auto v = parse_double(raw[i]);
        numeric = v.has_value();
        if (numeric) {
            as_number[i] = *v;
        }
    }

    std::vector<int> out(raw.size());
    if (numeric) {
        std::map<double, int> ids;
        for (double v : as_number) {
            ids.emplace(v, 0);
        }
        int next = 0;
        for (auto& [value, id] : ids) {
            id = next++;
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = ids.at(as_number[i]);
        }
    } else {
        std::map<std::string, int> ids;
        for (const auto& s : raw) {
            ids.emplace(s, 0);
        }
        int next = 0;
        for (auto& [value, id] : ids) {
            id = next++;
        }
        for (std::size_t i = 0; i < raw.size(); ++i) {
            out[i] = ids.at(raw[i]);
        }
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading '" + path + "'");
    }
    return buffer.str();
}

}  // namespace detail

/**
 * @brief Parses delimited numeric text.
 *
 * Blank lines are skipped. Every non-label cell must be a finite real number;
 * the first offending cell is reported by row and column. The label column, if
 * any, may hold arbitrary tokens and is re-encoded with `detail::encode_labels`.
 */
inline Dataset parse_delimited(std::string_view text, const LoadOptions& options = {}) {
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> row_numbers;
    std::vector<std::string_view> header;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        auto cells = detail::split(line, options.delimiter);
        if (options.has_header && header.empty() && rows.empty()) {
            header = std::move(cells);
            continue;
        }
        if (!rows.empty() && cells.size() != rows.front().size()) {
            throw ParseError(line_no, std::min(cells.size(), rows.front().size()) + 1,
                             "ragged row: expected " + std::to_string(rows.front().size()) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        if (rows.empty() && !header.empty() && cells.size() != header.size()) {
            throw ParseError(line_no, std::min(cells.size(), header.size()) + 1,
                             "ragged row: header has " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        rows.push_back(std::move(cells));
        row_numbers.push_back(line_no);
    }
    if (rows.empty()) {
        throw ValidationError("input contains no data rows");
    }

    const std::size_t ncols = rows.front().size();
    std::optional<std::size_t> label_index;
    if (options.label_column) {
        if (const auto* idx = std::get_if<std::size_t>(&*options.label_column)) {
            label_index = *idx;
        } else {
            const auto& name = std::get<std::string>(*options.label_column);
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end()) {
                throw ValidationError("label column '" + name + "' not found in header");
            }
            label_index = static_cast<std::size_t>(it - header.begin());
        }
        if (*label_index >= ncols) {
            throw ValidationError("label column " + std::to_string(*label_index) + " out of range for " +
                                  std::to_string(ncols) + " columns");
        }
    }

    Dataset out;
    const std::size_t d = ncols - (label_index ? 1 : 0);
    out.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    std::vector<std::string> raw_labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Eigen::Index c_out = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (label_index && c == *label_index) {
                raw_labels.emplace_back(rows[r][c]);
                continue;
            }
            const auto value = detail::parse_double(rows[r][c]);
            if (!value) {
                throw ParseError(row_numbers[r], c + 1, "cannot parse '" + std::string(rows[r][c]) + "' as a finite number");
            }
            out.points(static_cast<Eigen::Index>(r), c_out++) = *value;
        }
    }
    if (label_index) {
        out.labels = detail::encode_labels(raw_labels);
    }
    out.validate();
    return out;
}

inline Dataset load_delimited(const std::string& path, const LoadOptions& options = {}) {
    const auto text = detail::read_file(path);
    if (detail::trim(text).empty()) {
        throw ValidationError("'" + path + "' is empty");
    }
    try {
        return parse_delimited(text, options);
    } catch (const ParseError& e) {
        throw ParseError(e.row(), e.column(), e.detail(), path);
    }
}

/// Reads one label per line (blank lines skipped) and re-encodes them to 0..C-1.
inline std::vector<int> load_labels(const std::string& path, bool has_header = false) {
    const auto text = detail::read_file(path);
    std::vector<std::string> raw;
    std::istringstream in(text);
    std::string line;
    bool skipped_header = !has_header;
    while (std::getline(in, line)) {
        const auto cell = detail::trim(line);
        if (cell.empty()) {
            continue;
        }
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        raw.emplace_back(cell);
    }
    if (raw.empty()) {
        throw ValidationError("'" + path + "' contains no labels");
    }
    return detail::encode_labels(raw);
}

/**
 * Divides each column by its sample standard deviation (n-1 divisor). Columns
 * with zero variance pass through. The mean is not removed.
 */
inline Dataset standardize(const Dataset& data) {
    if (data.n() < 2) {
        throw ValidationError("standardize needs at least 2 points");
    }
    Dataset out = data;
    const double denom = static_cast<double>(data.n() - 1);
    for (Eigen::Index c = 0; c < out.points.cols(); ++c) {
        auto col = out.points.col(c);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / denom;
        if (var > 0.0) {
            col /= std::sqrt(var);
        }
    }
    return out;
}

/**
 * @brief Projects onto the leading `max_dim` principal components when wider than that.
 *
 * Expects standardized input. Data narrower than or equal to `max_dim` is returned
 * unchanged. Otherwise the scores of the mean-centred data on the top eigenvectors
 * of the sample covariance are returned, ordered by descending eigenvalue, with
 * each eigenvector's largest-magnitude loading made positive.
 */
inline Dataset pca_reduce(const Dataset& data, std::size_t max_dim = 100) {
    if (max_dim < 1) {
        throw ValidationError("pca_reduce: max_dim must be at least 1");
    }
    if (data.d() <= max_dim) {
        return data;
    }

    const Eigen::MatrixXd centered = data.points.rowwise() - data.points.colwise().mean();
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(std::max<std::size_t>(data.n() - 1, 1));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw InternalError("pca_reduce: eigendecomposition failed");
    }

    // Eigen returns ascending eigenvalues.
    const auto d = static_cast<Eigen::Index>(data.d());
    const auto k = static_cast<Eigen::Index>(max_dim);
    Eigen::MatrixXd basis(d, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - c);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        basis.col(c) = v;
    }

    Dataset out;
    out.points = centered * basis;
    out.labels = data.labels;
    return out;
}

/// Standard pipeline: unit-variance scaling, then PCA when wider than `max_dim`.
inline Dataset preprocess(const Dataset& data, std::size_t max_dim = 100) {
    return pca_reduce(standardize(data), max_dim);
}

/// FNV-1a over the shape and raw coordinate bytes, as 16 hex digits.
inline std::string content_hash(const PointMatrix& points) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto feed = [&h](const void* p, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t shape[2] = {static_cast<std::uint64_t>(points.rows()), static_cast<std::uint64_t>(points.cols())};
    feed(shape, sizeof(shape));
    feed(points.data(), static_cast<std::size_t>(points.size()) * sizeof(double));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nnec

#endif  // NNEC_DATASET_HPP
