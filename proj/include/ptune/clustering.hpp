#pragma once

#include "ptune/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ptune {

enum class Linkage { single, complete, median, average, mediod };

Linkage parse_linkage(std::string_view name);
std::string to_string(Linkage linkage);

/// Symmetric pairwise distances with zero diagonal. `rank(i, j)` is the
/// position of the distance among the table's sorted distinct values, so
/// order-based linkages can compare integers.
class DistanceTable {
public:
    DistanceTable() = default;
    /// Throws std::invalid_argument unless the matrix is square, symmetric,
    /// nonnegative and zero on the diagonal.
    explicit DistanceTable(const std::vector<std::vector<Rational>>& matrix);

    std::size_t size() const { return n_; }
    const Rational& at(std::size_t i, std::size_t j) const { return values_[ranks_[i * n_ + j]]; }
    std::int32_t rank(std::size_t i, std::size_t j) const { return ranks_[i * n_ + j]; }
    const Rational& value_of_rank(std::int32_t r) const { return values_[static_cast<std::size_t>(r)]; }
    DistanceTable scaled(const Rational& factor) const;

private:
    std::size_t n_ = 0;
    std::vector<Rational> values_; // sorted distinct
    std::vector<std::int32_t> ranks_;
};

/// Euclidean distances rounded to the nearest multiple of 1/denominator.
DistanceTable euclidean_table(const std::vector<Vec>& points, std::int64_t denominator = 1'000'000'000);
DistanceTable manhattan_table(const std::vector<Vec>& points);

struct ClusteringInstance {
    std::vector<Vec> points;               // may be empty when only tables are given
    std::vector<std::string> metric_names; // parallel to metrics
    std::vector<DistanceTable> metrics;
    std::vector<std::vector<std::size_t>> target; // empty when absent
    std::size_t k = 0;

    std::size_t size() const { return metrics.empty() ? points.size() : metrics.front().size(); }
    /// Throws std::invalid_argument on inconsistent sizes or a target that is
    /// not a partition.
    void validate() const;
};

/// Interpolation over every (linkage, metric) combination. Component c =
/// (linkages[c / metrics.size()], metrics[c % metrics.size()]). The parameter
/// rho has one entry per component but the last; the last weight is
/// 1 - sum(rho).
struct MergeFamily {
    std::vector<Linkage> linkages;
    std::vector<std::size_t> metrics{0};

    std::size_t components() const { return linkages.size() * metrics.size(); }
    std::size_t dimension() const { return components() - 1; }
    Linkage linkage_of(std::size_t c) const { return linkages[c / metrics.size()]; }
    std::size_t metric_of(std::size_t c) const { return metrics[c % metrics.size()]; }
};

/// Cluster ids follow the usual dendrogram numbering: points are 0..n-1 and
/// the t-th merge (0-based) creates cluster n + t.
using ClusterPair = std::pair<std::size_t, std::size_t>;

struct ClusterTree {
    std::size_t n = 0;
    std::vector<ClusterPair> merges;

    /// Point indices under cluster `id`, ascending.
    std::vector<std::size_t> members(std::size_t id) const;
};

/// Merge value of two disjoint point sets under one linkage and metric.
Rational merge_value(const ClusteringInstance& instance, Linkage linkage, std::size_t metric,
                     std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Mixture weights alpha for rho; throws std::invalid_argument outside the simplex.
Vec mixture_weights(const MergeFamily& family, const Vec& rho);

Rational interpolated_merge(const ClusteringInstance& instance, const MergeFamily& family, const Vec& rho,
                            std::span<const std::size_t> a, std::span<const std::size_t> b);

/// Greedy agglomeration at a fixed rho, smallest merge value first, ties to
/// the lexicographically smallest cluster-id pair.
ClusterTree simulate_linkage(const ClusteringInstance& instance, const MergeFamily& family, const Vec& rho);

/// {rho >= 0, sum(rho) <= 1}.
ConvexCell simplex_cell(std::size_t dimension);

struct ExecutionTreeNode {
    ConvexCell region;
    std::vector<ClusterPair> merges;
    std::vector<ExecutionTreeNode> children;

    bool is_leaf() const { return children.empty(); }
};

/// Execution tree over `parent` (must be full-dimensional inside the simplex).
/// For a family with a single component the tree is a path with a
/// zero-dimensional region.
ExecutionTreeNode build_execution_tree(const ClusteringInstance& instance, const MergeFamily& family,
                                       const ConvexCell& parent);

std::vector<const ExecutionTreeNode*> collect_leaves(const ExecutionTreeNode& root);

/// Fraction of points misplaced by the closest k-pruning of the tree, up to
/// relabeling of the target clusters. Exact, O(n 3^k).
Rational hamming_loss(const ClusterTree& tree, const std::vector<std::vector<std::size_t>>& target, std::size_t k);

struct BestParameter {
    Vec rho;
    Rational loss;
    ConvexCell region;
    std::vector<ClusterPair> merges;
};

BestParameter best_parameter(const ClusteringInstance& instance, const MergeFamily& family,
                             const ConvexCell& parent);

} // namespace ptune
