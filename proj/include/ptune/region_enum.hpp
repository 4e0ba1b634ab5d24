#pragma once

#include "ptune/geometry.hpp"

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace ptune {

/// Candidate facets of one behavior's cell. `empty` short-circuits cells
/// ruled out by a comparison that holds nowhere (e.g. a coincident
/// competitor that wins every tie).
struct CandidateSet {
    bool empty = false;
    std::vector<Halfspace> constraints;

    /// Adds "normal . x <= offset" labelled with the competing behavior.
    /// A zero normal is decided on the spot: offset > 0 is dropped, offset < 0
    /// empties the cell, offset == 0 is a total tie that the cell keeps only
    /// when `wins_ties` is set.
    void add_comparison(Vec normal, Rational offset, Tag competitor, bool wins_ties);
};

/// What a domain supplies for implicit region enumeration.
class CellProblem {
public:
    virtual ~CellProblem() = default;

    /// Behavior at a parameter point; boundary ties resolve to the
    /// lexicographically smallest behavior.
    virtual Tag seed_label(const Vec& point) const = 0;

    /// Halfspaces "label's objective <= competitor's objective", labelled by
    /// the competitor. Must include every true facet of the label's cell.
    virtual CandidateSet candidate_constraints(const Tag& label) const = 0;

    /// Behavior at point + eps * direction for infinitesimal eps > 0, if the
    /// domain can evaluate it. Used to cross facets on which several
    /// competitors switch at once.
    virtual std::optional<Tag> label_across(const Vec& point, const Vec& direction) const
    {
        (void)point;
        (void)direction;
        return std::nullopt;
    }
};

struct VertexCell {
    ConvexCell cell;
    std::vector<Tag> neighbors;
};

struct Subdivision {
    ConvexCell parent;
    std::map<Tag, ConvexCell> cells;
    std::set<std::pair<Tag, Tag>> adjacency; // ordered pair (smaller, larger)
    std::vector<Tag> degenerate;             // labels reached but without interior

    /// Label of the cell whose interior holds the point, if any.
    std::optional<Tag> locate(const Vec& point) const;
};

/// The label's cell inside `parent` with the labels across its facets, or
/// nullopt when the cell has empty interior.
std::optional<VertexCell> compute_vertex_cell(const ConvexCell& parent, const Tag& label,
                                              const CellProblem& problem,
                                              std::uint64_t seed = default_lp_seed);

/// Breadth-first search over the region adjacency graph, starting from the
/// behavior at `start`. `start` must lie strictly inside `parent`.
Subdivision compute_subdivision(const ConvexCell& parent, const CellProblem& problem, const Vec& start,
                                std::uint64_t seed = default_lp_seed);

} // namespace ptune
