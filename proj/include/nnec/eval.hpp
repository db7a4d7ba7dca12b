#ifndef NNEC_EVAL_HPP
#define NNEC_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

/**
 * @file eval.hpp
 *
 * @brief External cluster-validity metrics and cross-dataset standardisations.
 */

namespace nnec {

/**
 * @brief Contingency table between predicted clusters (rows) and true classes (columns).
 *
 * Arbitrary integer labels are compacted to 0..R-1 and 0..S-1 in ascending order.
 */
struct ContingencyTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t n = 0;
    std::vector<std::int64_t> counts;  // row-major
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;

    std::int64_t at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }

    ContingencyTable(std::span<const int> pred, std::span<const int> truth) {
        if (pred.size() != truth.size()) {
            throw ValidationError("label lengths differ: " + std::to_string(pred.size()) + " vs " +
                                  std::to_string(truth.size()));
        }
        if (pred.empty()) {
            throw ValidationError("labelings are empty");
        }
        const auto compact = [](std::span<const int> labels, std::size_t& count) {
            std::map<int, std::size_t> ids;
            for (int l : labels) {
                ids.emplace(l, 0);
            }
            std::size_t next = 0;
            for (auto& [label, id] : ids) {
                id = next++;
            }
            count = next;
            std::vector<std::size_t> out(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i) {
                out[i] = ids.at(labels[i]);
            }
            return out;
        };
        const auto r = compact(pred, rows);
        const auto c = compact(truth, cols);
        n = pred.size();
        counts.assign(rows * cols, 0);
        row_sums.assign(rows, 0);
        col_sums.assign(cols, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[r[i] * cols + c[i]];
            ++row_sums[r[i]];
            ++col_sums[c[i]];
        }
    }
};

namespace detail {

inline double choose2(std::int64_t x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

inline double entropy(const std::vector<std::int64_t>& sums, std::size_t n) {
    double h = 0.0;
    const double nn = static_cast<double>(n);
    for (auto s : sums) {
        if (s > 0) {
            const double p = static_cast<double>(s) / nn;
            h -= p * std::log(p);
        }
    }
    return h;
}

}  // namespace detail

/// Adjusted Rand index. When index, expectation and maximum coincide (e.g. both sides a single cluster) returns 1.
inline double ari(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table(pred, truth);
    double sum_cells = 0.0;
    for (auto v : table.counts) {
        sum_cells += detail::choose2(v);
    }
    double sum_rows = 0.0;
    for (auto v : table.row_sums) {
        sum_rows += detail::choose2(v);
    }
    double sum_cols = 0.0;
    for (auto v : table.col_sums) {
        sum_cols += detail::choose2(v);
    }
    const double total = detail::choose2(static_cast<std::int64_t>(table.n));
    if (total == 0.0) {
        return 1.0;
    }
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) {
        return 1.0;
    }
    return (sum_cells - expected) / (max_index - expected);
}

/// Mutual information (nats) of the table.
inline double mutual_information(const ContingencyTable& table) {
    const double nn = static_cast<double>(table.n);
    double mi = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (std::size_t c = 0; c < table.cols; ++c) {
            const auto v = table.at(r, c);
            if (v > 0) {
                mi += static_cast<double>(v) / nn *
                      std::log(nn * static_cast<double>(v) /
                               (static_cast<double>(table.row_sums[r]) * static_cast<double>(table.col_sums[c])));
            }
        }
    }
    return std::max(mi, 0.0);
}

/**
 * Expected mutual information under the hypergeometric (fixed-marginals
 * permutation) model, summed directly over each cell's support with
 * log-factorials from a cumulative lgamma table.
 */
inline double expected_mutual_information(const ContingencyTable& table) {
    const auto n = static_cast<std::int64_t>(table.n);
    const double nn = static_cast<double>(n);
    std::vector<double> log_fact(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) {
        log_fact[static_cast<std::size_t>(i)] = std::lgamma(static_cast<double>(i) + 1.0);
    }
    const auto lf = [&](std::int64_t x) { return log_fact[static_cast<std::size_t>(x)]; };

    double emi = 0.0;
    for (auto a : table.row_sums) {
        for (auto b : table.col_sums) {
            const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
            const std::int64_t hi = std::min(a, b);
            const double fixed = lf(a) + lf(b) + lf(n - a) + lf(n - b) - lf(n);
            for (std::int64_t v = lo; v <= hi; ++v) {
                const double log_p = fixed - lf(v) - lf(a - v) - lf(b - v) - lf(n - a - b + v);
                const double term = static_cast<double>(v) / nn *
                                    std::log(nn * static_cast<double>(v) / (static_cast<double>(a) * static_cast<double>(b)));
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

/**
 * Adjusted mutual information with the arithmetic-mean entropy normaliser:
 * (MI - E[MI]) / (mean(H(U), H(V)) - E[MI]). Returns 0 when either side is a
 * single cluster or the denominator vanishes.
 */
inline double ami(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table(pred, truth);
    if (table.rows == 1 || table.cols == 1) {
        return 0.0;
    }
    const double mi = mutual_information(table);
    const double emi = expected_mutual_information(table);
    const double h_mean = 0.5 * (detail::entropy(table.row_sums, table.n) + detail::entropy(table.col_sums, table.n));
    const double denominator = h_mean - emi;
    if (std::abs(denominator) <= 1e-12 * std::max(1.0, h_mean)) {
        return 0.0;
    }
    return (mi - emi) / denominator;
}

namespace detail {

/**
 * Maximum-weight perfect matching on a square matrix (Hungarian method with
 * potentials, O(m^3)). Returns the column matched to each row.
 */
inline std::vector<std::size_t> max_weight_assignment(const std::vector<std::int64_t>& weight, std::size_t m) {
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    // Minimise cost = -weight. 1-based arrays as in the classical formulation.
    std::vector<std::int64_t> u(m + 1, 0), v(m + 1, 0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<std::int64_t> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::int64_t delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const std::int64_t cur = -weight[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(m, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace detail

/// Fraction of points matched under the best injective pairing of clusters with classes.
inline double accuracy(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table(pred, truth);
    const std::size_t m = std::max(table.rows, table.cols);
    std::vector<std::int64_t> weight(m * m, 0);
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (std::size_t c = 0; c < table.cols; ++c) {
            weight[r * m + c] = table.at(r, c);
        }
    }
    const auto match = detail::max_weight_assignment(weight, m);
    std::int64_t matched = 0;
    for (std::size_t r = 0; r < m; ++r) {
        matched += weight[r * m + match[r]];
    }
    return static_cast<double>(matched) / static_cast<double>(table.n);
}

struct ExternalScores {
    double ami = 0.0;
    double ari = 0.0;
    double accuracy = 0.0;
};

inline ExternalScores score(std::span<const int> pred, std::span<const int> truth) {
    return {ami(pred, truth), ari(pred, truth), accuracy(pred, truth)};
}

/// Rank_j = #{l : v_l <= v_j}; the best value gets L and ties share the higher rank.
inline std::vector<std::size_t> rank_scores(std::span<const double> row) {
    if (row.empty()) {
        throw ValidationError("rank_scores needs at least one value");
    }
    std::vector<std::size_t> out(row.size(), 0);
    for (std::size_t j = 0; j < row.size(); ++j) {
        for (double v : row) {
            out[j] += v <= row[j] ? 1 : 0;
        }
    }
    return out;
}

struct StandardizedRow {
    std::vector<double> values;
    /// The row had no spread; values are all zero by convention.
    bool degenerate = false;
};

/// (v - min) / (max - min).
inline StandardizedRow minmax_map(std::span<const double> row) {
    if (row.empty()) {
        throw ValidationError("minmax_map needs at least one value");
    }
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    StandardizedRow out{std::vector<double>(row.size(), 0.0), !(*hi > *lo)};
    if (!out.degenerate) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            out.values[j] = (row[j] - *lo) / (*hi - *lo);
        }
    }
    return out;
}

/// (v - mean) / sd with the L-1 divisor.
inline StandardizedRow studentize(std::span<const double> row) {
    if (row.empty()) {
        throw ValidationError("studentize needs at least one value");
    }
    const double L = static_cast<double>(row.size());
    const double mean = std::accumulate(row.begin(), row.end(), 0.0) / L;
    double ss = 0.0;
    for (double v : row) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = row.size() > 1 ? std::sqrt(ss / (L - 1.0)) : 0.0;
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    StandardizedRow out{std::vector<double>(row.size(), 0.0), !(*hi > *lo) || !(sd > 0.0)};
    if (!out.degenerate) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            out.values[j] = (row[j] - mean) / sd;
        }
    }
    return out;
}

/// One metric's results: rows are datasets, columns are methods.
struct ResultsMatrix {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::vector<double>> values;
};

/// CSV with header "dataset,<method>,<method>,..." and one row per dataset.
inline ResultsMatrix parse_results_csv(std::string_view text) {
    ResultsMatrix out;
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
        const auto cells = detail::split(line, ',');
        if (out.methods.empty()) {
            if (cells.size() < 2) {
                throw ParseError(line_no, 1, "results header needs a dataset column and at least one method");
            }
            for (std::size_t c = 1; c < cells.size(); ++c) {
                out.methods.emplace_back(cells[c]);
            }
            continue;
        }
        if (cells.size() != out.methods.size() + 1) {
            throw ParseError(line_no, 1, "expected " + std::to_string(out.methods.size() + 1) + " fields");
        }
        out.datasets.emplace_back(cells[0]);
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            const auto v = detail::parse_double(cells[c]);
            if (!v) {
                throw ParseError(line_no, c + 1, "cannot parse '" + std::string(cells[c]) + "'");
            }
            row.push_back(*v);
        }
        out.values.push_back(std::move(row));
    }
    if (out.values.empty()) {
        throw ValidationError("results matrix has no rows");
    }
    return out;
}

/// Per-dataset Rank, min-max and studentised tables plus per-method means.
struct AggregateTables {
    std::vector<std::vector<double>> rank;
    std::vector<std::vector<double>> minmax;
    std::vector<std::vector<double>> studentized;
    std::vector<bool> minmax_degenerate;
    std::vector<bool> studentized_degenerate;
    std::vector<double> mean_rank;
    std::vector<double> mean_minmax;
    std::vector<double> mean_studentized;
};

inline AggregateTables aggregate(const ResultsMatrix& results) {
    AggregateTables out;
    const std::size_t L = results.methods.size();
    out.mean_rank.assign(L, 0.0);
    out.mean_minmax.assign(L, 0.0);
    out.mean_studentized.assign(L, 0.0);
    for (const auto& row : results.values) {
        const auto ranks = rank_scores(row);
        out.rank.emplace_back(ranks.begin(), ranks.end());
        auto mm = minmax_map(row);
        auto st = studentize(row);
        out.minmax.push_back(mm.values);
        out.minmax_degenerate.push_back(mm.degenerate);
        out.studentized.push_back(st.values);
        out.studentized_degenerate.push_back(st.degenerate);
        for (std::size_t j = 0; j < L; ++j) {
            out.mean_rank[j] += static_cast<double>(ranks[j]);
            out.mean_minmax[j] += mm.values[j];
            out.mean_studentized[j] += st.values[j];
        }
    }
    const double rows = static_cast<double>(results.values.size());
    for (std::size_t j = 0; j < L; ++j) {
        out.mean_rank[j] /= rows;
        out.mean_minmax[j] /= rows;
        out.mean_studentized[j] /= rows;
    }
    return out;
}

}  // namespace nnec

#endif  // NNEC_EVAL_HPP
