#pragma once

#include "ptune/geometry.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptune {

/// Column appended to the referenced subproblem's alignment.
enum class Transform {
    none,            // base term, empty alignment
    extend_match,    // (s1[i], s2[j])
    extend_mismatch, // (s1[i], s2[j])
    extend_space_1,  // (s1[i], '-')
    extend_space_2,  // ('-', s2[j])
    copy,            // same (i, j), another table
};

Transform parse_transform(std::string_view name);
std::string to_string(Transform t);

/// Subproblem classes of a cell (i, j).
enum class DPCase { origin, row, col, match, mismatch };
inline constexpr std::size_t dp_case_count = 5;

std::string to_string(DPCase c);

/// One candidate of a DP update: weight . rho + C_table(i - di, j - dj).
struct DPTerm {
    std::vector<std::int64_t> weight;
    std::size_t table = 0;
    std::size_t di = 0, dj = 0;
    Transform transform = Transform::none;
};

struct DPTable {
    std::string name;
    std::array<std::vector<DPTerm>, dp_case_count> cases; // empty list = subproblem absent
};

/// Declarative alignment DP. Tables are evaluated in index order at every
/// (i, j), cells in row-major order; a copy term may only read a table with
/// a smaller index.
struct AlignmentSpec {
    std::string name;
    std::vector<std::string> features;
    std::vector<DPTable> tables;
    std::size_t final_table = 0;

    std::size_t dimension() const { return features.size(); }
    /// Throws std::invalid_argument on dangling or out-of-order references.
    void validate() const;
};

/// "mismatch-space" (d = 2) and "mismatch-space-gap" (d = 3).
const std::vector<std::string>& preset_names();
AlignmentSpec preset_spec(std::string_view name);

struct Alignment {
    std::string t1, t2;
    std::vector<std::int64_t> features;

    Rational cost(const Vec& rho) const;
    auto operator<=>(const Alignment&) const = default;
    bool operator==(const Alignment&) const = default;
};

struct DPResult {
    std::vector<Rational> cost; // one entry per lexicographic level
    Alignment alignment;
};

/// Exact minimum-cost alignment; ties go to the lowest term index.
/// Throws std::invalid_argument if the final subproblem is absent.
DPResult dp_solve(const AlignmentSpec& spec, std::string_view s1, std::string_view s2, const Vec& rho);

/// Same, with costs compared lexicographically across several parameter
/// vectors (the first is the primary parameter).
DPResult dp_solve_lex(const AlignmentSpec& spec, std::string_view s1, std::string_view s2,
                      const std::vector<Vec>& rhos);

struct AlignmentPiece {
    ConvexCell cell;
    Alignment alignment;
    std::size_t component = 0; // logical cell id after degeneracy resolution
};

struct AlignmentPartition {
    ConvexCell domain;
    std::vector<AlignmentPiece> pieces;

    /// Index of the piece whose interior holds rho.
    std::optional<std::size_t> locate(const Vec& rho) const;
    /// Number of logical cells (connected same-alignment components).
    std::size_t logical_count() const;
};

/// 0 <= rho_i <= box.
ConvexCell alignment_domain(std::size_t dimension, const Rational& box = 1);

struct OverlayCell {
    ConvexCell cell;
    std::vector<std::size_t> parts; // cell index within each input partition
};

/// All full-dimensional intersections of one cell from each partition,
/// each reduced to its non-redundant constraints. Partitions must cover the
/// same parent.
std::vector<OverlayCell> compute_overlay(const std::vector<std::vector<ConvexCell>>& partitions);

/// Collapses same-alignment pieces. An alignment whose feature vector no
/// other alignment in the partition shares owns a convex region, which
/// replaces its pieces; other pieces are grouped into components by
/// facet adjacency.
AlignmentPartition resolve_degeneracies(AlignmentPartition partition);

struct DagStats {
    std::size_t nodes = 0;
    std::size_t overlay_cells = 0;
    std::size_t max_pieces = 0;
};

/// Partition of `domain` by optimal alignment of (s1, s2), computed over the
/// compact execution DAG. Cells are labelled with the DP's canonical
/// alignment.
AlignmentPartition build_execution_dag(const AlignmentSpec& spec, std::string_view s1, std::string_view s2,
                                       const ConvexCell& domain, DagStats* stats = nullptr);

struct RaySearchResult {
    /// Sector boundaries as s = rho1 / (rho1 + rho2), increasing, strictly
    /// inside (0, 1). Sector k lies between breaks[k-1] and breaks[k].
    std::vector<Rational> breaks;
    std::vector<Alignment> alignments; // breaks.size() + 1 entries, from rho = (0, 1) towards (1, 0)
    std::size_t dp_solves = 0;

    /// Sectors intersected with `domain` as an alignment partition.
    AlignmentPartition to_partition(const ConvexCell& domain) const;
};

/// Angular partition of the positive quadrant for a two-feature spec by ray
/// search. Throws std::invalid_argument unless the spec has d = 2.
RaySearchResult ray_search_2d(const AlignmentSpec& spec, std::string_view s1, std::string_view s2);

/// Fraction of the reference's aligned (non-space) column pairs that the
/// alignment also aligns; 1 when the reference aligns nothing.
Rational alignment_agreement(const Alignment& alignment, const Alignment& reference);

} // namespace ptune
