#pragma once

#include "ptune/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptune {

/// Opaque, hashable identifier attached to constraints and cells.
///
/// Domains encode their behaviors as short integer tuples: a cluster pair
/// (a, b), a DP term index (l), or a purchase profile (q_1..q_N, j_1..j_N).
/// Tags whose first part is negative are reserved for constraints inherited
/// from a parent cell.
struct Tag {
    std::vector<std::int64_t> parts;

    Tag() = default;
    Tag(std::initializer_list<std::int64_t> init) : parts(init) {}
    explicit Tag(std::vector<std::int64_t> p) : parts(std::move(p)) {}

    static Tag parent_facet(std::size_t index)
    {
        return Tag{-1, static_cast<std::int64_t>(index)};
    }
    bool is_parent_facet() const { return !parts.empty() && parts.front() < 0; }

    auto operator<=>(const Tag&) const = default;
    bool operator==(const Tag&) const = default;

    std::string to_string() const;
};

struct TagHash {
    std::size_t operator()(const Tag& t) const noexcept;
};

/// normal . x <= offset
struct Halfspace {
    Vec normal;
    Rational offset;
    Tag label;

    std::size_t dimension() const { return normal.size(); }
    bool contains(const Vec& x) const { return dot(normal, x) <= offset; }
    bool strictly_contains(const Vec& x) const { return dot(normal, x) < offset; }
    /// Same halfspace up to positive scaling (labels ignored).
    bool same_set(const Halfspace& other) const;
    /// True when this is the closed complement's boundary twin: -normal . x <= -offset.
    bool is_opposite_of(const Halfspace& other) const;
};

/// Builds a halfspace scaled so the first nonzero normal entry is +-1.
/// Throws std::invalid_argument for a zero normal.
Halfspace make_halfspace(Vec normal, Rational offset, Tag label = {});

/// Rescales in place so the first nonzero normal entry has magnitude one.
void normalize(Halfspace& h);

struct ConvexCell {
    std::size_t dimension = 0;
    std::vector<Halfspace> constraints;
    std::optional<Vec> witness;

    bool contains(const Vec& x) const;
    bool strictly_contains(const Vec& x) const;
};

/// Axis-aligned box lo <= x_i <= hi, labelled as parent facets.
ConvexCell make_box(std::size_t dimension, const Rational& lo, const Rational& hi);

enum class LpStatus { optimal, infeasible, unbounded };
enum class Sense { maximize, minimize };

struct LPResult {
    LpStatus status = LpStatus::infeasible;
    Vec point;
    Rational value;
};

inline constexpr std::uint64_t default_lp_seed = 0x5eed'1991ULL;

/// Exact linear program over the given halfspaces.
///
/// Seidel's randomized incremental algorithm with a lexicographic tie-break
/// (objective first, then the coordinates), so the reported point is unique.
/// Unboundedness is decided exactly by solving inside two nested boxes whose
/// size exceeds every basic solution of the system.
LPResult solve_lp(const Vec& objective, std::span<const Halfspace> constraints,
                  Sense sense = Sense::maximize, std::uint64_t seed = default_lp_seed);

/// A point strictly inside every constraint, or nullopt when the feasible
/// set has empty interior.
std::optional<Vec> find_interior_point(std::span<const Halfspace> constraints,
                                       std::uint64_t seed = default_lp_seed);

/// Index of the first constraint hyperplane hit by the ray from origin
/// towards target, with ties resolved by the symbolic translation
/// origin + (eps, eps^2, ..., eps^d). nullopt means the ray leaves through
/// no hyperplane.
std::optional<std::size_t> ray_shoot_index(std::span<const Halfspace> constraints,
                                           const Vec& origin, const Vec& target);

/// Same as ray_shoot_index but returns the constraint's label.
std::optional<Tag> ray_shoot(std::span<const Halfspace> constraints,
                             const Vec& origin, const Vec& target);

/// Clarkson's output-sensitive redundancy removal. Returns the sorted indices
/// of the non-redundant constraints; of several identical constraints only
/// the lowest-index one survives. `interior` must strictly satisfy all.
std::vector<std::size_t> clarkson_reduce(std::span<const Halfspace> constraints,
                                         const Vec& interior,
                                         std::uint64_t seed = default_lp_seed);

/// Non-redundant sub-system together with an interior witness, or nullopt
/// if the system has empty interior.
std::optional<ConvexCell> reduce_cell(std::size_t dimension, std::vector<Halfspace> constraints,
                                      std::uint64_t seed = default_lp_seed);

/// True if the closures of a and b meet in a (d-1)-dimensional set lying on
/// a facet hyperplane of both. Cells are assumed interior-disjoint.
bool facet_adjacent(const ConvexCell& a, const ConvexCell& b);

/// Constraints restricted to the hyperplane of `plane` (as an equality),
/// expressed in the remaining d-1 coordinates. Constraints that become
/// constant are dropped when satisfied; nullopt signals an empty result.
/// The eliminated coordinate is the first nonzero entry of plane.normal.
std::optional<std::vector<Halfspace>> restrict_to_hyperplane(std::span<const Halfspace> constraints,
                                                             const Halfspace& plane);

} // namespace ptune
