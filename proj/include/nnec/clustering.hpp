#ifndef NNEC_CLUSTERING_HPP
#define NNEC_CLUSTERING_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "equilibrium.hpp"

/**
 * @file clustering.hpp
 *
 * @brief Covers the data with equilibrium clusters and resolves their overlap.
 *
 * Seeds are taken greedily by reverse-neighbour count among uncovered points.
 * A growth that loses its own seed is followed by a singleton "dummy" cluster
 * holding the seed, so the seed is never picked again. Every point is then
 * assigned to the cluster with the largest membership strength
 * s_{i,C} = (|N_k(x_i) ∩ C|/k - λ|C|/n)_+.
 */

namespace nnec {

/**
 * @brief Membership strengths as exact integer numerators over a shared denominator.
 *
 * s_{i,c} = numerator(i, c) / denominator with denominator = den(λ) * n * k, so
 * comparisons between strengths are exact.
 */
struct StrengthTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::int64_t denominator = 1;
    /// Row-major rows x cols.
    std::vector<std::int64_t> numerators;

    std::int64_t numerator(std::size_t i, std::size_t c) const { return numerators[i * cols + c]; }
    double value(std::size_t i, std::size_t c) const {
        return static_cast<double>(numerator(i, c)) / static_cast<double>(denominator);
    }

    Eigen::MatrixXd to_matrix() const {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t c = 0; c < cols; ++c) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = value(i, c);
            }
        }
        return out;
    }
};

/// Strength numerators for every point against every cluster in `clusters`.
inline StrengthTable strength_table(const NeighbourGraph& graph, std::size_t k, const Lambda& lambda,
                                    const std::vector<IndexSet>& clusters) {
    graph.check_k(k);
    const std::size_t n = graph.n();
    StrengthTable table;
    table.rows = n;
    table.cols = clusters.size();
    table.denominator = lambda.den() * static_cast<std::int64_t>(n) * static_cast<std::int64_t>(k);
    table.numerators.assign(n * clusters.size(), 0);

    std::vector<std::uint32_t> counts(n, 0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto& members = clusters[c];
        detail::check_index_set(graph, members);
        std::vector<Index> touched;
        for (Index j : members) {
            for (Index i : graph.reverse(j, k)) {
                if (counts[i]++ == 0) {
                    touched.push_back(i);
                }
            }
        }
        const std::int64_t threshold = lambda.num() * static_cast<std::int64_t>(k) * static_cast<std::int64_t>(members.size());
        for (Index i : touched) {
            const std::int64_t margin = lambda.den() * static_cast<std::int64_t>(n) * counts[i] - threshold;
            if (margin > 0) {
                table.numerators[i * table.cols + c] = margin;
            }
            counts[i] = 0;
        }
    }
    return table;
}

/// n x C matrix of membership strengths s_{i,c}.
inline Eigen::MatrixXd strength_matrix(const NeighbourGraph& graph, std::size_t k, const Lambda& lambda,
                                       const std::vector<IndexSet>& clusters) {
    return strength_table(graph, k, lambda, clusters).to_matrix();
}

struct ClusterRecord {
    IndexSet members;
    Index seed = 0;
    /// Singleton inserted because the preceding growth from `seed` excluded it.
    bool dummy = false;
    /// Growth outcome; meaningless for dummies.
    GrowthStatus status = GrowthStatus::converged;
    std::size_t iterations = 0;
    /// Whether the full two-sided equilibrium predicate holds for `members`.
    bool equilibrium = false;
};

struct ClusteringSolution {
    EquilibriumParams params;
    std::size_t n = 0;
    /// In creation order, dummies included.
    std::vector<ClusterRecord> clusters;
    StrengthTable strengths;
    /// Index into `clusters` of each point's maximum-strength cluster.
    std::vector<int> raw_assignment;
    /// Final labels: `raw_assignment` compacted to 0..cluster_count()-1 in creation order.
    std::vector<int> assignment;
    /// clusters[c] -> final label, or -1 when the cluster received no points.
    std::vector<int> label_of_cluster;
    /// Points with zero strength to every cluster, placed via their neighbours.
    std::size_t fallback_count = 0;
    std::size_t loop_iterations = 0;

    std::size_t cluster_count() const {
        std::size_t out = 0;
        for (int l : label_of_cluster) {
            out += l >= 0 ? 1 : 0;
        }
        return out;
    }

    std::vector<IndexSet> cluster_sets() const {
        std::vector<IndexSet> out;
        out.reserve(clusters.size());
        for (const auto& c : clusters) {
            out.push_back(c.members);
        }
        return out;
    }
};

/// Uncovered point with the largest reverse-neighbour count; ties go to the smaller index.
inline Index select_seed(const NeighbourGraph& graph, std::size_t k, const std::vector<char>& covered_mask) {
    graph.check_k(k);
    if (covered_mask.size() != graph.n()) {
        throw ValidationError("covered mask has wrong length");
    }
    std::optional<Index> best;
    std::size_t best_count = 0;
    for (std::size_t j = 0; j < graph.n(); ++j) {
        if (covered_mask[j]) {
            continue;
        }
        const auto count = graph.reverse_count(k, static_cast<Index>(j));
        if (!best || count > best_count) {
            best = static_cast<Index>(j);
            best_count = count;
        }
    }
    if (!best) {
        throw ValidationError("select_seed: every point is already covered");
    }
    return *best;
}

inline Index select_seed(const NeighbourGraph& graph, std::size_t k, const IndexSet& covered) {
    detail::check_index_set(graph, covered);
    std::vector<char> mask(graph.n(), 0);
    for (Index i : covered) {
        mask[i] = 1;
    }
    return select_seed(graph, k, mask);
}

namespace detail {

/// Maximum-strength cluster per point (-1 when every strength is zero). Ties go to the smaller index.
inline std::vector<int> argmax_assignment(const StrengthTable& table) {
    std::vector<int> out(table.rows, -1);
    for (std::size_t i = 0; i < table.rows; ++i) {
        std::int64_t best = 0;
        for (std::size_t c = 0; c < table.cols; ++c) {
            if (table.numerator(i, c) > best) {
                best = table.numerator(i, c);
                out[i] = static_cast<int>(c);
            }
        }
    }
    return out;
}

}  // namespace detail

/**
 * @brief Assigns every point by maximum strength, then compacts labels.
 *
 * Points with zero strength everywhere take the assignment of their nearest
 * neighbour (within N_k) that already has one, in synchronous rounds until no
 * more can be placed; any left over go to the first non-empty cluster.
 */
inline void assign_points(const NeighbourGraph& graph, ClusteringSolution& solution) {
    const std::size_t n = graph.n();
    auto assigned = detail::argmax_assignment(solution.strengths);

    std::vector<Index> pending;
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i] < 0) {
            pending.push_back(static_cast<Index>(i));
        }
    }
    solution.fallback_count = pending.size();
    while (!pending.empty()) {
        const auto snapshot = assigned;
        std::vector<Index> still;
        for (Index i : pending) {
            for (Index j : graph.neighbours(i, solution.params.k)) {
                if (snapshot[j] >= 0) {
                    assigned[i] = snapshot[j];
                    break;
                }
            }
            if (assigned[i] < 0) {
                still.push_back(i);
            }
        }
        if (still.size() == pending.size()) {
            break;
        }
        pending = std::move(still);
    }
    if (!pending.empty()) {
        int first = 0;
        while (static_cast<std::size_t>(first) + 1 < solution.clusters.size() && solution.clusters[first].members.empty()) {
            ++first;
        }
        for (Index i : pending) {
            assigned[i] = first;
        }
    }

    solution.raw_assignment = assigned;
    solution.label_of_cluster.assign(solution.clusters.size(), -1);
    std::vector<char> used(solution.clusters.size(), 0);
    for (int c : assigned) {
        used[static_cast<std::size_t>(c)] = 1;
    }
    int next = 0;
    for (std::size_t c = 0; c < used.size(); ++c) {
        if (used[c]) {
            solution.label_of_cluster[c] = next++;
        }
    }
    solution.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        solution.assignment[i] = solution.label_of_cluster[static_cast<std::size_t>(assigned[i])];
    }
}

/**
 * @brief Runs the full covering procedure for one (λ, k).
 *
 * Sequential: each growth depends on what earlier ones covered.
 */
inline ClusteringSolution cluster(const NeighbourGraph& graph, const EquilibriumParams& params,
                                  const SweepObserver& observer = {}) {
    params.validate(graph);
    const std::size_t n = graph.n();

    ClusteringSolution solution;
    solution.params = params;
    solution.n = n;

    std::vector<char> covered(n, 0);
    std::size_t uncovered = n;
    const auto cover = [&](const IndexSet& set) {
        for (Index i : set) {
            if (!covered[i]) {
                covered[i] = 1;
                --uncovered;
            }
        }
    };

    while (uncovered > 0) {
        if (solution.loop_iterations++ >= n) {
            throw InternalError("covering loop exceeded n iterations");
        }
        const Index seed = select_seed(graph, params.k, covered);
        auto grown = grow_cluster(graph, params, seed, observer);

        ClusterRecord record;
        record.seed = seed;
        record.status = grown.status;
        record.iterations = grown.iterations;
        record.members = std::move(grown.members);
        record.equilibrium = is_equilibrium(graph, params, record.members);
        cover(record.members);
        const bool kept_seed = std::binary_search(record.members.begin(), record.members.end(), seed);
        solution.clusters.push_back(std::move(record));

        if (!kept_seed) {
            ClusterRecord dummy;
            dummy.seed = seed;
            dummy.dummy = true;
            dummy.members = {seed};
            dummy.equilibrium = is_equilibrium(graph, params, dummy.members);
            cover(dummy.members);
            solution.clusters.push_back(std::move(dummy));
        }
    }

    solution.strengths = strength_table(graph, params.k, params.lambda, solution.cluster_sets());
    assign_points(graph, solution);
    return solution;
}

}  // namespace nnec

#endif  // NNEC_CLUSTERING_HPP
