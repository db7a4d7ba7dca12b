#ifndef NNEC_NEIGHBOURS_HPP
#define NNEC_NEIGHBOURS_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dataset.hpp"
#include "error.hpp"

/**
 * @file neighbours.hpp
 *
 * @brief Exact k-nearest-neighbour lists, reverse adjacency and overlap counting.
 */

namespace nnec {

using Index = std::uint32_t;

/// Sorted, duplicate-free list of point indices.
using IndexSet = std::vector<Index>;

enum class Metric { euclidean };

/**
 * @brief Exact k-nearest-neighbour structure built once for `k_max`.
 *
 * Each point's list holds its `k_max` nearest other points ordered by
 * (squared distance, index), so the first k entries are N_k for every k <= k_max.
 * The reverse adjacency of j lists every i having j in its list, ordered by the
 * rank j holds in i's list (then by i); its prefix with rank < k is exactly
 * {i : j in N_k(x_i)}.
 */
class NeighbourGraph {
public:
    NeighbourGraph() = default;

    /// Builds from flattened lists (n * k_max entries). Validates every entry.
    NeighbourGraph(std::size_t n, std::size_t k_max, std::vector<Index> flat) : n_(n), k_max_(k_max), lists_(std::move(flat)) {
        if (k_max_ < 1 || k_max_ + 1 > n_) {
            throw ValidationError("k_max must lie in [1, n-1]; got k_max=" + std::to_string(k_max_) +
                                  " with n=" + std::to_string(n_));
        }
        if (lists_.size() != n_ * k_max_) {
            throw ValidationError("neighbour list size mismatch");
        }
        std::vector<char> seen(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto row = neighbours(static_cast<Index>(i), k_max_);
            for (Index j : row) {
                if (j >= n_ || j == i || seen[j]) {
                    throw ValidationError("invalid neighbour list for point " + std::to_string(i));
                }
                seen[j] = 1;
            }
            for (Index j : row) {
                seen[j] = 0;
            }
        }
        build_reverse();
    }

    std::size_t n() const { return n_; }
    std::size_t k_max() const { return k_max_; }

    /// N_k(x_i), nearest first.
    std::span<const Index> neighbours(Index i, std::size_t k) const {
        check_k(k);
        check_point(i);
        return {lists_.data() + static_cast<std::size_t>(i) * k_max_, k};
    }

    /// {i : j in N_k(x_i)}, ordered by j's rank in each list then by i.
    std::span<const Index> reverse(Index j, std::size_t k) const {
        check_k(k);
        check_point(j);
        const auto begin = reverse_offsets_[j];
        const auto end = reverse_offsets_[j + 1];
        const auto* ranks = reverse_ranks_.data();
        const auto stop = std::lower_bound(ranks + begin, ranks + end, static_cast<std::uint32_t>(k)) - ranks;
        return {reverse_points_.data() + begin, static_cast<std::size_t>(stop) - begin};
    }

    /// |{i : j in N_k(x_i)}|.
    std::size_t reverse_count(std::size_t k, Index j) const { return reverse(j, k).size(); }

    const std::vector<Index>& flat_lists() const { return lists_; }

    void check_k(std::size_t k) const {
        if (k < 1 || k > k_max_) {
            throw ValidationError("k=" + std::to_string(k) + " outside [1, " + std::to_string(k_max_) + "]");
        }
    }

    void check_point(std::size_t i) const {
        if (i >= n_) {
            throw ValidationError("point index " + std::to_string(i) + " out of range for n=" + std::to_string(n_));
        }
    }

private:
    void build_reverse() {
        reverse_offsets_.assign(n_ + 1, 0);
        for (Index j : lists_) {
            ++reverse_offsets_[j + 1];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            reverse_offsets_[j + 1] += reverse_offsets_[j];
        }
        // Filling by rank-major sweep leaves each bucket sorted by (rank, i).
        reverse_points_.resize(lists_.size());
        reverse_ranks_.resize(lists_.size());
        std::vector<std::size_t> cursor(reverse_offsets_.begin(), reverse_offsets_.end() - 1);
        for (std::size_t rank = 0; rank < k_max_; ++rank) {
            for (std::size_t i = 0; i < n_; ++i) {
                const Index j = lists_[i * k_max_ + rank];
                reverse_points_[cursor[j]] = static_cast<Index>(i);
                reverse_ranks_[cursor[j]] = static_cast<std::uint32_t>(rank);
                ++cursor[j];
            }
        }
    }

    std::size_t n_ = 0;
    std::size_t k_max_ = 0;
    std::vector<Index> lists_;
    std::vector<std::size_t> reverse_offsets_;
    std::vector<Index> reverse_points_;
    std::vector<std::uint32_t> reverse_ranks_;
};

namespace detail {

inline double squared_distance(const PointMatrix& points, Eigen::Index a, Eigen::Index b) {
    const double* pa = points.data() + a * points.cols();
    const double* pb = points.data() + b * points.cols();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
        const double diff = pa[c] - pb[c];
        sum += diff * diff;
    }
    return sum;
}

/// Runs `body(begin, end)` over contiguous chunks of [0, count) on up to `workers` threads.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t workers, Body&& body) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        body(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

}  // namespace detail

/**
 * @brief Exact brute-force k-NN on squared Euclidean distance, ties to the smaller index.
 *
 * Each point's list is computed independently, so the result does not depend on `workers`.
 */
inline NeighbourGraph build_graph(const PointMatrix& points, std::size_t k_max, std::size_t workers = 1,
                                  Metric metric = Metric::euclidean) {
    if (metric != Metric::euclidean) {
        throw ValidationError("only the Euclidean metric is supported");
    }
    const auto n = static_cast<std::size_t>(points.rows());
    if (k_max < 1 || k_max + 1 > n) {
        throw ValidationError("k_max must lie in [1, n-1]; got k_max=" + std::to_string(k_max) + " with n=" +
                              std::to_string(n));
    }

    std::vector<Index> flat(n * k_max);
    detail::parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, Index>> candidates(n - 1);
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t m = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    candidates[m++] = {detail::squared_distance(points, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                       static_cast<Index>(j)};
                }
            }
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k_max), candidates.end());
            for (std::size_t r = 0; r < k_max; ++r) {
                flat[i * k_max + r] = candidates[r].second;
            }
        }
    });
    return NeighbourGraph(n, k_max, std::move(flat));
}

inline NeighbourGraph build_graph(const Dataset& data, std::size_t k_max, std::size_t workers = 1) {
    return build_graph(data.points, k_max, workers);
}

namespace detail {

inline void check_index_set(const NeighbourGraph& graph, const IndexSet& set) {
    for (std::size_t a = 0; a < set.size(); ++a) {
        graph.check_point(set[a]);
        if (a > 0 && set[a] <= set[a - 1]) {
            throw ValidationError("index set must be sorted and duplicate-free");
        }
    }
}

}  // namespace detail

/// m[i] = |N_k(x_i) ∩ cluster|, computed from scratch.
inline std::vector<std::uint32_t> overlap_counts(const NeighbourGraph& graph, std::size_t k, const IndexSet& cluster) {
    graph.check_k(k);
    detail::check_index_set(graph, cluster);
    std::vector<std::uint32_t> counts(graph.n(), 0);
    for (Index j : cluster) {
        for (Index i : graph.reverse(j, k)) {
            ++counts[i];
        }
    }
    return counts;
}

/**
 * @brief Incrementally maintained overlap counts for a changing cluster.
 *
 * Moving from one cluster to the next touches only the reverse adjacency of the
 * points that entered or left. Not synchronized; each growth owns one.
 */
class OverlapCounter {
public:
    OverlapCounter(const NeighbourGraph& graph, std::size_t k) : graph_(&graph), k_(k), counts_(graph.n(), 0) {
        graph.check_k(k);
    }

    const IndexSet& cluster() const { return cluster_; }
    const std::vector<std::uint32_t>& counts() const { return counts_; }

    /// Applies the deltas for `added` and `removed` (both sorted, disjoint from/within the current cluster).
    void apply(const IndexSet& added, const IndexSet& removed) {
        for (Index j : added) {
            for (Index i : graph_->reverse(j, k_)) {
                ++counts_[i];
            }
        }
        for (Index j : removed) {
            for (Index i : graph_->reverse(j, k_)) {
                --counts_[i];
            }
        }
        IndexSet merged;
        merged.reserve(cluster_.size() + added.size());
        std::set_union(cluster_.begin(), cluster_.end(), added.begin(), added.end(), std::back_inserter(merged));
        IndexSet next;
        next.reserve(merged.size());
        std::set_difference(merged.begin(), merged.end(), removed.begin(), removed.end(), std::back_inserter(next));
        cluster_ = std::move(next);
    }

    /// Moves to `next` (sorted) and returns the (added, removed) sets.
    std::pair<IndexSet, IndexSet> move_to(const IndexSet& next) {
        detail::check_index_set(*graph_, next);
        IndexSet added;
        IndexSet removed;
        std::set_difference(next.begin(), next.end(), cluster_.begin(), cluster_.end(), std::back_inserter(added));
        std::set_difference(cluster_.begin(), cluster_.end(), next.begin(), next.end(), std::back_inserter(removed));
        apply(added, removed);
        return {std::move(added), std::move(removed)};
    }

private:
    const NeighbourGraph* graph_;
    std::size_t k_;
    std::vector<std::uint32_t> counts_;
    IndexSet cluster_;
};

/// Writes a versioned JSON cache of the neighbour lists, keyed by `hash`.
inline void save_graph_cache(const std::string& path, const NeighbourGraph& graph, const std::string& hash) {
    nlohmann::json j;
    j["format"] = "nnec-graph";
    j["version"] = 1;
    j["hash"] = hash;
    j["n"] = graph.n();
    j["k_max"] = graph.k_max();
    j["neighbours"] = graph.flat_lists();
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write graph cache '" + path + "'");
    }
    out << j.dump() << '\n';
}

/// Returns the cached graph if `path` holds one for `hash` with k_max >= `min_k_max`.
inline std::optional<NeighbourGraph> load_graph_cache(const std::string& path, const std::string& hash,
                                                      std::size_t min_k_max) {
    std::ifstream in(path);
    if (!in) {
        return std::nullopt;
    }
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format") != "nnec-graph" || j.at("version") != 1 || j.at("hash") != hash) {
            return std::nullopt;
        }
        const auto k_max = j.at("k_max").get<std::size_t>();
        if (k_max < min_k_max) {
            return std::nullopt;
        }
        return NeighbourGraph(j.at("n").get<std::size_t>(), k_max, j.at("neighbours").get<std::vector<Index>>());
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

}  // namespace nnec

#endif  // NNEC_NEIGHBOURS_HPP
