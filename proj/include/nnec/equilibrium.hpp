#ifndef NNEC_EQUILIBRIUM_HPP
#define NNEC_EQUILIBRIUM_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <utility>

#include "lambda.hpp"
#include "neighbours.hpp"

/**
 * @file equilibrium.hpp
 *
 * @brief The (λ, k) equilibrium condition and the iterative cluster grower.
 *
 * A set C is a (λ, k) equilibrium cluster when every member j has
 * |N_k(x_j) ∩ C| / k > λ|C|/n and every non-member l has
 * |N_k(x_l) ∩ C| / k <= λ|C|/n. Growth from a seed repeatedly replaces C by
 * the set of points passing the member test against it.
 */

namespace nnec {

struct EquilibriumParams {
    Lambda lambda = Lambda::from_tenths(20);
    std::size_t k = 10;
    /// Longest cycle (in sweeps) that growth detects.
    std::size_t r = 5;
    /// Sweep cap; the returned iteration count never exceeds it.
    std::size_t t_max = 100;

    void validate(const NeighbourGraph& graph) const {
        graph.check_k(k);
        if (r < 1) {
            throw ValidationError("r must be at least 1");
        }
        if (t_max < 1) {
            throw ValidationError("t_max must be at least 1");
        }
    }
};

enum class GrowthStatus { converged, cycled, capped };

inline const char* to_string(GrowthStatus s) {
    switch (s) {
        case GrowthStatus::converged: return "converged";
        case GrowthStatus::cycled: return "cycled";
        case GrowthStatus::capped: return "capped";
    }
    return "unknown";
}

struct EquilibriumClusterResult {
    IndexSet members;
    GrowthStatus status = GrowthStatus::converged;
    std::size_t iterations = 0;
};

/// One growth sweep, for tracing.
struct SweepRecord {
    Index seed = 0;
    std::size_t t = 0;
    std::size_t size = 0;
    std::size_t added = 0;
    std::size_t removed = 0;
};

using SweepObserver = std::function<void(const SweepRecord&)>;

/// Member test |N_k ∩ C| / k > λ|C|/n, in exact integer form.
inline bool passes_member_test(std::uint64_t overlap, std::size_t cluster_size, std::size_t k, std::size_t n,
                               const Lambda& lambda) {
    const auto lhs = static_cast<__int128>(lambda.den()) * static_cast<__int128>(n) * overlap;
    const auto rhs = static_cast<__int128>(lambda.num()) * static_cast<__int128>(k) * cluster_size;
    return lhs > rhs;
}

/// The update map: every point whose overlap with the current cluster passes the member test.
inline IndexSet equilibrium_update(const std::vector<std::uint32_t>& counts, std::size_t cluster_size, std::size_t k,
                                   const Lambda& lambda) {
    IndexSet next;
    const std::size_t n = counts.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] > 0 && passes_member_test(counts[i], cluster_size, k, n, lambda)) {
            next.push_back(static_cast<Index>(i));
        }
    }
    return next;
}

/**
 * Full two-sided equilibrium predicate. The empty set qualifies (every
 * outsider has zero overlap and the threshold is zero).
 */
inline bool is_equilibrium(const NeighbourGraph& graph, const EquilibriumParams& params, const IndexSet& cluster) {
    params.validate(graph);
    const auto counts = overlap_counts(graph, params.k, cluster);
    std::size_t next_member = 0;
    for (std::size_t i = 0; i < graph.n(); ++i) {
        const bool member = next_member < cluster.size() && cluster[next_member] == i;
        if (member) {
            ++next_member;
        }
        if (member != passes_member_test(counts[i], cluster.size(), params.k, graph.n(), params.lambda)) {
            return false;
        }
    }
    return true;
}

namespace detail {

inline std::uint64_t fingerprint(const IndexSet& set) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ set.size();
    for (Index v : set) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace detail

/**
 * @brief Grows a cluster from `seed` by iterating the update map.
 *
 * Stops when the current set repeats one of the previous `r` sets (converged if it
 * equals the immediately preceding one, cycled otherwise) or after `t_max`
 * sweeps (capped). The set current at the stop is returned; it may be empty.
 */
inline EquilibriumClusterResult grow_cluster(const NeighbourGraph& graph, const EquilibriumParams& params, Index seed,
                                             const SweepObserver& observer = {}) {
    params.validate(graph);
    graph.check_point(seed);

    OverlapCounter counter(graph, params.k);
    counter.move_to(IndexSet{seed});
    std::uint64_t current_fp = detail::fingerprint(counter.cluster());

    // Most recent first: C^(t-1), C^(t-2), ...
    std::deque<std::pair<std::uint64_t, IndexSet>> history;
    std::size_t t = 0;
    while (true) {
        for (std::size_t back = 0; back < history.size(); ++back) {
            if (history[back].first == current_fp && history[back].second == counter.cluster()) {
                return {counter.cluster(), back == 0 ? GrowthStatus::converged : GrowthStatus::cycled, t};
            }
        }
        if (t >= params.t_max) {
            return {counter.cluster(), GrowthStatus::capped, t};
        }

        IndexSet next = equilibrium_update(counter.counts(), counter.cluster().size(), params.k, params.lambda);
        history.emplace_front(current_fp, counter.cluster());
        if (history.size() > params.r) {
            history.pop_back();
        }
        const auto [added, removed] = counter.move_to(next);
        current_fp = detail::fingerprint(counter.cluster());
        ++t;
        if (observer) {
            observer({seed, t, counter.cluster().size(), added.size(), removed.size()});
        }
    }
}

}  // namespace nnec

#endif  // NNEC_EQUILIBRIUM_HPP
