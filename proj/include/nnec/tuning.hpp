#ifndef NNEC_TUNING_HPP
#define NNEC_TUNING_HPP

#include <atomic>
#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "clustering.hpp"

/**
 * @file tuning.hpp
 *
 * @brief Selection of (λ, k) by the average normalised membership strength.
 */

namespace nnec {

/// Mean over points of max_c s_{i,c} / sum_c s_{i,c}; points with no positive strength count as 0.
inline double criterion(const StrengthTable& strengths) {
    if (strengths.rows == 0) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < strengths.rows; ++i) {
        std::int64_t max = 0;
        std::int64_t sum = 0;
        for (std::size_t c = 0; c < strengths.cols; ++c) {
            const auto v = strengths.numerator(i, c);
            sum += v;
            max = std::max(max, v);
        }
        if (sum > 0) {
            total += static_cast<double>(max) / static_cast<double>(sum);
        }
    }
    return total / static_cast<double>(strengths.rows);
}

inline double criterion(const ClusteringSolution& solution) {
    if (solution.clusters.empty()) {
        throw ValidationError("criterion: solution has no clusters");
    }
    return criterion(solution.strengths);
}

struct SelectionEntry {
    Lambda lambda;
    std::size_t k = 0;
    double criterion = 0.0;
    std::size_t cluster_count = 0;
    /// Non-dummy, non-empty grown clusters.
    std::size_t equilibrium_cluster_count = 0;
    std::size_t fallback_count = 0;
    /// Held only when SearchOptions::keep_solutions is set.
    std::shared_ptr<const ClusteringSolution> solution;
};

struct ModelSelectionReport {
    std::string mode;
    std::vector<SelectionEntry> entries;
    std::size_t selected = 0;
    /// Solution at the selected pair, always present.
    std::shared_ptr<const ClusteringSolution> selected_solution;

    const Lambda& lambda_star() const { return entries.at(selected).lambda; }
    std::size_t k_star() const { return entries.at(selected).k; }
};

struct SearchOptions {
    std::size_t r = 5;
    std::size_t t_max = 100;
    std::size_t workers = 1;
    bool keep_solutions = false;
    /// λ below 1 is rejected unless this is cleared.
    bool enforce_lambda_floor = true;
};

/// Default grid: λ in {1.0, 1.2, ..., 3.0}.
inline std::vector<Lambda> default_lambda_grid() {
    std::vector<Lambda> out;
    for (int tenths = 10; tenths <= 30; tenths += 2) {
        out.push_back(Lambda::from_tenths(tenths));
    }
    return out;
}

/// Default grid: k in {10, 15, 20, 25}.
inline std::vector<std::size_t> default_k_grid() { return {10, 15, 20, 25}; }

/// 2⌈ln n⌉.
inline std::size_t default_k_for(std::size_t n) {
    return 2 * static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n))));
}

namespace detail {

inline SelectionEntry make_entry(const Lambda& lambda, std::size_t k) {
    SelectionEntry e;
    e.lambda = lambda;
    e.k = k;
    return e;
}

/// True when `a` beats `b`: larger criterion, then smaller k, then smaller λ.
inline bool better_entry(const SelectionEntry& a, const SelectionEntry& b) {
    if (a.criterion != b.criterion) {
        return a.criterion > b.criterion;
    }
    if (a.k != b.k) {
        return a.k < b.k;
    }
    return a.lambda < b.lambda;
}

inline std::size_t best_entry(const std::vector<SelectionEntry>& entries, std::size_t begin = 0) {
    std::size_t best = begin;
    for (std::size_t i = begin + 1; i < entries.size(); ++i) {
        if (better_entry(entries[i], entries[best])) {
            best = i;
        }
    }
    return best;
}

inline void check_lambda(const Lambda& lambda, const SearchOptions& options) {
    if (options.enforce_lambda_floor && lambda < Lambda(1, 1)) {
        throw ValidationError("lambda " + lambda.to_string() + " is below the lower bound 1");
    }
}

/// Fills entries[i] for every (lambda, k) in `entries` concurrently; slot order fixes the output.
inline void evaluate_entries(const NeighbourGraph& graph, std::vector<SelectionEntry>& entries,
                             const SearchOptions& options) {
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            auto& entry = entries[i];
            EquilibriumParams params{entry.lambda, entry.k, options.r, options.t_max};
            auto solution = std::make_shared<ClusteringSolution>(cluster(graph, params));
            entry.criterion = criterion(*solution);
            entry.cluster_count = solution->cluster_count();
            entry.fallback_count = solution->fallback_count;
            entry.equilibrium_cluster_count = 0;
            for (const auto& c : solution->clusters) {
                entry.equilibrium_cluster_count += (!c.dummy && !c.members.empty()) ? 1 : 0;
            }
            if (options.keep_solutions) {
                entry.solution = std::move(solution);
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, entries.size()));
    if (workers == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
}

inline void finish_report(const NeighbourGraph& graph, ModelSelectionReport& report, const SearchOptions& options) {
    report.selected = best_entry(report.entries);
    const auto& best = report.entries[report.selected];
    if (best.solution) {
        report.selected_solution = best.solution;
    } else {
        report.selected_solution = std::make_shared<ClusteringSolution>(
            cluster(graph, EquilibriumParams{best.lambda, best.k, options.r, options.t_max}));
    }
}

}  // namespace detail

/**
 * @brief Clusters at every (λ, k) in lambdas x ks and selects the best.
 *
 * Entries are listed k-major in the order given. Selection does not depend on
 * that order: ties in the criterion go to the smaller k, then the smaller λ.
 */
inline ModelSelectionReport grid_search(const NeighbourGraph& graph, const std::vector<Lambda>& lambdas,
                                        const std::vector<std::size_t>& ks, const SearchOptions& options = {}) {
    if (lambdas.empty() || ks.empty()) {
        throw ValidationError("grid_search needs at least one lambda and one k");
    }
    for (const auto& l : lambdas) {
        detail::check_lambda(l, options);
    }
    for (auto k : ks) {
        graph.check_k(k);
    }

    ModelSelectionReport report;
    report.mode = "full-grid";
    for (auto k : ks) {
        for (const auto& l : lambdas) {
            report.entries.push_back(detail::make_entry(l, k));
        }
    }
    detail::evaluate_entries(graph, report.entries, options);
    detail::finish_report(graph, report, options);
    return report;
}

/// The 44-point default grid.
inline ModelSelectionReport grid_search(const NeighbourGraph& graph, const SearchOptions& options = {}) {
    return grid_search(graph, default_lambda_grid(), default_k_grid(), options);
}

/// λ = 1, 4/3, ..., 3.
inline std::vector<Lambda> coarse_lambda_grid() {
    std::vector<Lambda> out;
    for (int thirds = 3; thirds <= 9; ++thirds) {
        out.emplace_back(thirds, 3);
    }
    return out;
}

/// 10 equispaced values on [max(1, centre - 1/3), centre + 1/3].
inline std::vector<Lambda> refined_lambda_grid(const Lambda& centre) {
    const Lambda third(1, 3);
    const Lambda hi = centre + third;
    Lambda lo = Lambda(1, 1);
    // centre - 1/3 as a rational; stays positive because centre >= 1 in practice.
    const std::int64_t lo_num = centre.num() * 3 - centre.den();
    if (lo_num > 0) {
        const Lambda shifted(lo_num, centre.den() * 3);
        if (shifted > lo) {
            lo = shifted;
        }
    }
    std::vector<Lambda> out;
    const std::int64_t common = lo.den() * hi.den();
    const std::int64_t lo_scaled = lo.num() * hi.den();
    const std::int64_t hi_scaled = hi.num() * lo.den();
    for (std::int64_t i = 0; i < 10; ++i) {
        out.emplace_back(lo_scaled * 9 + i * (hi_scaled - lo_scaled), common * 9);
    }
    return out;
}

/**
 * @brief Two-stage λ search at k = 2⌈ln n⌉: 7 coarse values on [1, 3] then 10 around the best.
 *
 * All 17 solutions are entries of the report and the selection is made across all of them.
 */
inline ModelSelectionReport refined_search(const NeighbourGraph& graph, const SearchOptions& options = {}) {
    const std::size_t k = default_k_for(graph.n());
    graph.check_k(k);

    ModelSelectionReport report;
    report.mode = "refined";
    for (const auto& l : coarse_lambda_grid()) {
        report.entries.push_back(detail::make_entry(l, k));
    }
    detail::evaluate_entries(graph, report.entries, options);
    const auto centre = report.entries[detail::best_entry(report.entries)].lambda;

    std::vector<SelectionEntry> refined;
    for (const auto& l : refined_lambda_grid(centre)) {
        refined.push_back(detail::make_entry(l, k));
    }
    detail::evaluate_entries(graph, refined, options);
    report.entries.insert(report.entries.end(), refined.begin(), refined.end());
    detail::finish_report(graph, report, options);
    return report;
}

}  // namespace nnec

#endif  // NNEC_TUNING_HPP
