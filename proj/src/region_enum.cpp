#include "ptune/region_enum.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>

namespace ptune {

void CandidateSet::add_comparison(Vec normal, Rational offset, Tag competitor, bool wins_ties)
{
    if (is_zero(normal)) {
        int s = sgn(offset);
        if (s < 0 || (s == 0 && !wins_ties)) {
            empty = true;
        }
        return;
    }
    constraints.push_back(make_halfspace(std::move(normal), std::move(offset), std::move(competitor)));
}

std::optional<Tag> Subdivision::locate(const Vec& point) const
{
    for (const auto& [label, cell] : cells) {
        if (cell.strictly_contains(point)) {
            return label;
        }
    }
    return std::nullopt;
}

std::optional<VertexCell> compute_vertex_cell(const ConvexCell& parent, const Tag& label,
                                              const CellProblem& problem, std::uint64_t seed)
{
    CandidateSet candidates = problem.candidate_constraints(label);
    if (candidates.empty) {
        return std::nullopt;
    }

    std::vector<Halfspace> all;
    all.reserve(parent.constraints.size() + candidates.constraints.size());
    for (std::size_t i = 0; i < parent.constraints.size(); ++i) {
        Halfspace h = parent.constraints[i];
        normalize(h);
        h.label = Tag::parent_facet(i);
        all.push_back(std::move(h));
    }
    for (auto& h : candidates.constraints) {
        if (h.dimension() != parent.dimension) {
            throw std::invalid_argument("candidate constraint dimension mismatch");
        }
        all.push_back(std::move(h));
    }

    // Identical hyperplanes collapse to one representative that remembers
    // every competitor label sitting on it.
    std::map<std::pair<Vec, Rational>, std::size_t> index_of;
    std::vector<Halfspace> unique;
    std::vector<std::vector<Tag>> tags_of;
    for (auto& h : all) {
        auto [it, fresh] = index_of.try_emplace({h.normal, h.offset}, unique.size());
        if (!fresh) {
            tags_of[it->second].push_back(std::move(h.label));
            continue;
        }
        tags_of.push_back({h.label});
        unique.push_back(std::move(h));
    }

    auto z = find_interior_point(unique, seed);
    if (!z) {
        return std::nullopt;
    }
    auto keep = clarkson_reduce(unique, *z, seed);

    VertexCell out;
    out.cell.dimension = parent.dimension;
    out.cell.witness = std::move(*z);
    std::set<Tag> neighbors;
    for (auto i : keep) {
        for (const auto& t : tags_of[i]) {
            if (!t.is_parent_facet()) {
                neighbors.insert(t);
            }
        }
        out.cell.constraints.push_back(std::move(unique[i]));
    }
    out.neighbors.assign(neighbors.begin(), neighbors.end());
    return out;
}

namespace {

// A point in the relative interior of facet k of the cell.
std::optional<Vec> facet_point(const ConvexCell& cell, std::size_t k, std::uint64_t seed)
{
    const Halfspace& plane = cell.constraints[k];
    std::vector<Halfspace> others;
    for (std::size_t i = 0; i < cell.constraints.size(); ++i) {
        if (i != k) {
            others.push_back(cell.constraints[i]);
        }
    }
    auto restricted = restrict_to_hyperplane(others, plane);
    if (!restricted) {
        return std::nullopt;
    }
    Vec y(cell.dimension - 1);
    if (!restricted->empty()) {
        auto z = find_interior_point(*restricted, seed);
        if (!z) {
            return std::nullopt;
        }
        y = std::move(*z);
    }
    std::size_t pivot = 0;
    while (sgn(plane.normal[pivot]) == 0) {
        ++pivot;
    }
    Vec x(cell.dimension);
    Rational rest = plane.offset;
    for (std::size_t j = 0, t = 0; j < cell.dimension; ++j) {
        if (j == pivot) {
            continue;
        }
        x[j] = y[t++];
        rest -= plane.normal[j] * x[j];
    }
    x[pivot] = rest / plane.normal[pivot];
    return x;
}

// Deterministic sequence of interior points near `start`, used when the seed
// behavior's cell turns out to be lower-dimensional.
std::vector<Vec> fallback_starts(const ConvexCell& parent, const Vec& start, std::uint64_t seed)
{
    std::vector<Vec> out;
    std::mt19937_64 rng(seed ^ 0xabcdefULL);
    std::uniform_int_distribution<int> coord(-1000, 1000);
    for (int attempt = 0; attempt < 32; ++attempt) {
        Vec dir(start.size());
        for (auto& x : dir) {
            x = make_rational(coord(rng), 997);
        }
        Rational step = make_rational(1, 64);
        Vec p = add(start, scale(dir, step));
        int guard = 0;
        while (!parent.strictly_contains(p) && guard++ < 64) {
            step /= 2;
            p = add(start, scale(dir, step));
        }
        if (parent.strictly_contains(p)) {
            out.push_back(std::move(p));
        }
    }
    return out;
}

} // namespace

Subdivision compute_subdivision(const ConvexCell& parent, const CellProblem& problem, const Vec& start,
                                std::uint64_t seed)
{
    if (!parent.strictly_contains(start)) {
        throw std::invalid_argument("compute_subdivision: start must be interior to the parent");
    }
    Subdivision out;
    out.parent = parent;

    std::map<Tag, std::vector<Tag>> neighbors_of;
    std::set<Tag> marked;
    std::deque<Tag> queue;

    auto visit = [&](const Tag& label) -> bool {
        if (!marked.insert(label).second) {
            return false;
        }
        auto vc = compute_vertex_cell(parent, label, problem, seed);
        if (!vc) {
            out.degenerate.push_back(label);
            return false;
        }
        for (std::size_t k = 0; k < vc->cell.constraints.size(); ++k) {
            const auto& h = vc->cell.constraints[k];
            if (h.label.is_parent_facet()) {
                continue;
            }
            auto x = facet_point(vc->cell, k, seed);
            if (!x) {
                continue;
            }
            auto across = problem.label_across(*x, h.normal);
            if (!across) {
                break;
            }
            if (*across != label && std::find(vc->neighbors.begin(), vc->neighbors.end(), *across) == vc->neighbors.end()) {
                vc->neighbors.push_back(std::move(*across));
            }
        }
        for (const auto& n : vc->neighbors) {
            if (!marked.count(n)) {
                queue.push_back(n);
            }
        }
        neighbors_of.emplace(label, std::move(vc->neighbors));
        out.cells.emplace(label, std::move(vc->cell));
        return true;
    };

    if (!visit(problem.seed_label(start))) {
        for (const auto& p : fallback_starts(parent, start, seed)) {
            if (visit(problem.seed_label(p))) {
                break;
            }
        }
    }
    while (!queue.empty()) {
        Tag label = std::move(queue.front());
        queue.pop_front();
        visit(label);
    }

    for (const auto& [a, nbrs] : neighbors_of) {
        for (const auto& b : nbrs) {
            if (!(a < b)) {
                continue;
            }
            auto it = neighbors_of.find(b);
            if (it == neighbors_of.end()) {
                continue;
            }
            const auto& back = it->second;
            if (std::find(back.begin(), back.end(), a) == back.end()) {
                continue;
            }
            if (facet_adjacent(out.cells.at(a), out.cells.at(b))) {
                out.adjacency.emplace(a, b);
            }
        }
    }
    return out;
}

} // namespace ptune
