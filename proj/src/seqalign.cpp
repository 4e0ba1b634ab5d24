#include "ptune/seqalign.hpp"

#include "ptune/region_enum.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ptune {

Transform parse_transform(std::string_view name)
{
    if (name == "none") return Transform::none;
    if (name == "extend-match") return Transform::extend_match;
    if (name == "extend-mismatch") return Transform::extend_mismatch;
    if (name == "extend-space-1") return Transform::extend_space_1;
    if (name == "extend-space-2") return Transform::extend_space_2;
    if (name == "copy") return Transform::copy;
    throw std::invalid_argument("unknown transform: " + std::string(name));
}

std::string to_string(Transform t)
{
    switch (t) {
    case Transform::none: return "none";
    case Transform::extend_match: return "extend-match";
    case Transform::extend_mismatch: return "extend-mismatch";
    case Transform::extend_space_1: return "extend-space-1";
    case Transform::extend_space_2: return "extend-space-2";
    case Transform::copy: return "copy";
    }
    return "?";
}

std::string to_string(DPCase c)
{
    switch (c) {
    case DPCase::origin: return "origin";
    case DPCase::row: return "row";
    case DPCase::col: return "col";
    case DPCase::match: return "match";
    case DPCase::mismatch: return "mismatch";
    }
    return "?";
}

void AlignmentSpec::validate() const
{
    const std::size_t d = dimension();
    if (d == 0) {
        throw std::invalid_argument("alignment spec needs at least one feature");
    }
    if (tables.empty() || final_table >= tables.size()) {
        throw std::invalid_argument("alignment spec has no valid final table");
    }
    for (std::size_t t = 0; t < tables.size(); ++t) {
        for (std::size_t c = 0; c < dp_case_count; ++c) {
            const auto dc = static_cast<DPCase>(c);
            for (const auto& term : tables[t].cases[c]) {
                auto fail = [&](const std::string& why) {
                    throw std::invalid_argument("table " + tables[t].name + ", case " + to_string(dc) + ": " + why);
                };
                if (term.weight.size() != d) {
                    fail("weight has the wrong length");
                }
                if (term.transform != Transform::none && term.table >= tables.size()) {
                    fail("dangling table reference");
                }
                std::pair<std::size_t, std::size_t> step{term.di, term.dj};
                switch (term.transform) {
                case Transform::none:
                    if (dc != DPCase::origin) {
                        fail("base terms are only allowed at the origin");
                    }
                    break;
                case Transform::extend_match:
                case Transform::extend_mismatch:
                    if (step != std::pair<std::size_t, std::size_t>{1, 1} ||
                        (dc != DPCase::match && dc != DPCase::mismatch)) {
                        fail("diagonal step must read (i-1, j-1) in a match or mismatch case");
                    }
                    break;
                case Transform::extend_space_1:
                    if (step != std::pair<std::size_t, std::size_t>{1, 0} || dc == DPCase::origin ||
                        dc == DPCase::row) {
                        fail("space in the second sequence must read (i-1, j) with i > 0");
                    }
                    break;
                case Transform::extend_space_2:
                    if (step != std::pair<std::size_t, std::size_t>{0, 1} || dc == DPCase::origin ||
                        dc == DPCase::col) {
                        fail("space in the first sequence must read (i, j-1) with j > 0");
                    }
                    break;
                case Transform::copy:
                    if (step != std::pair<std::size_t, std::size_t>{0, 0} || term.table >= t) {
                        fail("copy must read an earlier table at the same (i, j)");
                    }
                    break;
                }
            }
        }
    }
}

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"mismatch-space", "mismatch-space-gap"};
    return names;
}

AlignmentSpec preset_spec(std::string_view name)
{
    using T = Transform;
    AlignmentSpec s;
    s.name = std::string(name);
    if (name == "mismatch-space") {
        s.features = {"mismatch", "space"};
        DPTable c{"C", {}};
        c.cases[static_cast<std::size_t>(DPCase::origin)] = {{{0, 0}, 0, 0, 0, T::none}};
        c.cases[static_cast<std::size_t>(DPCase::row)] = {{{0, 1}, 0, 0, 1, T::extend_space_2}};
        c.cases[static_cast<std::size_t>(DPCase::col)] = {{{0, 1}, 0, 1, 0, T::extend_space_1}};
        c.cases[static_cast<std::size_t>(DPCase::match)] = {{{0, 0}, 0, 1, 1, T::extend_match}};
        c.cases[static_cast<std::size_t>(DPCase::mismatch)] = {
            {{1, 0}, 0, 1, 1, T::extend_mismatch},
            {{0, 1}, 0, 0, 1, T::extend_space_2},
            {{0, 1}, 0, 1, 0, T::extend_space_1},
        };
        s.tables = {c};
        s.final_table = 0;
    } else if (name == "mismatch-space-gap") {
        // S: ends with a substitution, I: ends with s2[j] against a space,
        // D: ends with s1[i] against a space, C: best of the three.
        s.features = {"mismatch", "space", "gap"};
        enum { S, I, D, C };
        DPTable ts{"S", {}}, ti{"I", {}}, td{"D", {}}, tc{"C", {}};
        ts.cases[static_cast<std::size_t>(DPCase::origin)] = {{{0, 0, 0}, 0, 0, 0, T::none}};
        auto diag = [&](std::int64_t mis, T tr) {
            return std::vector<DPTerm>{{{mis, 0, 0}, S, 1, 1, tr}, {{mis, 0, 0}, I, 1, 1, tr}, {{mis, 0, 0}, D, 1, 1, tr}};
        };
        ts.cases[static_cast<std::size_t>(DPCase::match)] = diag(0, T::extend_match);
        ts.cases[static_cast<std::size_t>(DPCase::mismatch)] = diag(1, T::extend_mismatch);
        std::vector<DPTerm> ins{{{0, 1, 1}, S, 0, 1, T::extend_space_2},
                                {{0, 1, 0}, I, 0, 1, T::extend_space_2},
                                {{0, 1, 1}, D, 0, 1, T::extend_space_2}};
        std::vector<DPTerm> del{{{0, 1, 1}, S, 1, 0, T::extend_space_1},
                                {{0, 1, 1}, I, 1, 0, T::extend_space_1},
                                {{0, 1, 0}, D, 1, 0, T::extend_space_1}};
        std::vector<DPTerm> best{{{0, 0, 0}, S, 0, 0, T::copy}, {{0, 0, 0}, I, 0, 0, T::copy}, {{0, 0, 0}, D, 0, 0, T::copy}};
        for (auto c : {DPCase::row, DPCase::match, DPCase::mismatch}) {
            ti.cases[static_cast<std::size_t>(c)] = ins;
        }
        for (auto c : {DPCase::col, DPCase::match, DPCase::mismatch}) {
            td.cases[static_cast<std::size_t>(c)] = del;
        }
        for (auto& cs : tc.cases) {
            cs = best;
        }
        s.tables = {ts, ti, td, tc};
        s.final_table = C;
    } else {
        throw std::invalid_argument("unknown alignment preset: " + std::string(name));
    }
    s.validate();
    return s;
}

Rational Alignment::cost(const Vec& rho) const
{
    if (rho.size() != features.size()) {
        throw std::invalid_argument("parameter has the wrong dimension");
    }
    Rational c;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (features[k] != 0) {
            c += rho[k] * make_rational(features[k]);
        }
    }
    return c;
}

namespace {

DPCase case_of(std::string_view s1, std::string_view s2, std::size_t i, std::size_t j)
{
    if (i == 0 && j == 0) return DPCase::origin;
    if (i == 0) return DPCase::row;
    if (j == 0) return DPCase::col;
    return s1[i - 1] == s2[j - 1] ? DPCase::match : DPCase::mismatch;
}

void append_column(Alignment& a, Transform t, std::string_view s1, std::string_view s2, std::size_t i, std::size_t j)
{
    switch (t) {
    case Transform::extend_match:
    case Transform::extend_mismatch:
        a.t1.push_back(s1[i - 1]);
        a.t2.push_back(s2[j - 1]);
        break;
    case Transform::extend_space_1:
        a.t1.push_back(s1[i - 1]);
        a.t2.push_back('-');
        break;
    case Transform::extend_space_2:
        a.t1.push_back('-');
        a.t2.push_back(s2[j - 1]);
        break;
    case Transform::none:
    case Transform::copy:
        break;
    }
}

void check_sequences(std::string_view s1, std::string_view s2)
{
    for (auto s : {s1, s2}) {
        if (s.find('-') != std::string_view::npos) {
            throw std::invalid_argument("sequences may not contain '-'");
        }
    }
}

struct NodeIndex {
    std::size_t tables, rows, cols;
    std::size_t operator()(std::size_t t, std::size_t i, std::size_t j) const { return (i * cols + j) * tables + t; }
    std::size_t size() const { return tables * rows * cols; }
};

} // namespace

DPResult dp_solve_lex(const AlignmentSpec& spec, std::string_view s1, std::string_view s2, const std::vector<Vec>& rhos)
{
    spec.validate();
    check_sequences(s1, s2);
    if (rhos.empty()) {
        throw std::invalid_argument("dp_solve needs a parameter vector");
    }
    for (const auto& r : rhos) {
        if (r.size() != spec.dimension()) {
            throw std::invalid_argument("parameter has the wrong dimension");
        }
    }
    const std::size_t m = s1.size(), n = s2.size(), levels = rhos.size();
    NodeIndex at{spec.tables.size(), m + 1, n + 1};
    std::vector<std::vector<Rational>> cost(at.size());
    std::vector<int> choice(at.size(), -1);

    // weight . rho per (table, case, term, level)
    std::vector<std::array<std::vector<std::vector<Rational>>, dp_case_count>> wr(spec.tables.size());
    for (std::size_t t = 0; t < spec.tables.size(); ++t) {
        for (std::size_t c = 0; c < dp_case_count; ++c) {
            for (const auto& term : spec.tables[t].cases[c]) {
                std::vector<Rational> v(levels);
                for (std::size_t k = 0; k < levels; ++k) {
                    for (std::size_t f = 0; f < term.weight.size(); ++f) {
                        if (term.weight[f] != 0) {
                            v[k] += rhos[k][f] * make_rational(term.weight[f]);
                        }
                    }
                }
                wr[t][c].push_back(std::move(v));
            }
        }
    }

    std::vector<Rational> cand(levels);
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            const auto c = static_cast<std::size_t>(case_of(s1, s2, i, j));
            for (std::size_t t = 0; t < spec.tables.size(); ++t) {
                const auto& terms = spec.tables[t].cases[c];
                auto& best = cost[at(t, i, j)];
                int pick = -1;
                for (std::size_t l = 0; l < terms.size(); ++l) {
                    const auto& term = terms[l];
                    const std::vector<Rational>* ref = nullptr;
                    if (term.transform != Transform::none) {
                        std::size_t r = at(term.table, i - term.di, j - term.dj);
                        if (choice[r] < 0) {
                            continue;
                        }
                        ref = &cost[r];
                    }
                    for (std::size_t k = 0; k < levels; ++k) {
                        cand[k] = wr[t][c][l][k];
                        if (ref) {
                            cand[k] += (*ref)[k];
                        }
                    }
                    if (pick < 0 || cand < best) {
                        best = cand;
                        pick = static_cast<int>(l);
                    }
                }
                choice[at(t, i, j)] = pick;
            }
        }
    }

    if (choice[at(spec.final_table, m, n)] < 0) {
        throw std::invalid_argument("the final subproblem has no feasible alignment");
    }
    DPResult out;
    out.cost = cost[at(spec.final_table, m, n)];
    out.alignment.features.assign(spec.dimension(), 0);
    std::size_t t = spec.final_table, i = m, j = n;
    Alignment rev;
    while (true) {
        const auto c = static_cast<std::size_t>(case_of(s1, s2, i, j));
        const DPTerm& term = spec.tables[t].cases[c][static_cast<std::size_t>(choice[at(t, i, j)])];
        for (std::size_t f = 0; f < term.weight.size(); ++f) {
            out.alignment.features[f] += term.weight[f];
        }
        append_column(rev, term.transform, s1, s2, i, j);
        if (term.transform == Transform::none) {
            break;
        }
        t = term.table;
        i -= term.di;
        j -= term.dj;
    }
    out.alignment.t1.assign(rev.t1.rbegin(), rev.t1.rend());
    out.alignment.t2.assign(rev.t2.rbegin(), rev.t2.rend());
    return out;
}

DPResult dp_solve(const AlignmentSpec& spec, std::string_view s1, std::string_view s2, const Vec& rho)
{
    return dp_solve_lex(spec, s1, s2, {rho});
}

std::optional<std::size_t> AlignmentPartition::locate(const Vec& rho) const
{
    for (std::size_t p = 0; p < pieces.size(); ++p) {
        if (pieces[p].cell.strictly_contains(rho)) {
            return p;
        }
    }
    return std::nullopt;
}

std::size_t AlignmentPartition::logical_count() const
{
    std::set<std::size_t> ids;
    for (const auto& p : pieces) {
        ids.insert(p.component);
    }
    return ids.size();
}

ConvexCell alignment_domain(std::size_t dimension, const Rational& box)
{
    if (sgn(box) <= 0) {
        throw std::invalid_argument("bounding box must be positive");
    }
    ConvexCell c = make_box(dimension, 0, box);
    c.witness = Vec(dimension, box / 2);
    return c;
}

namespace {

Vec to_vec(const std::vector<std::int64_t>& f)
{
    Vec v;
    v.reserve(f.size());
    for (auto x : f) {
        v.push_back(make_rational(x));
    }
    return v;
}

// Overlay of partitions given through an accessor, refined one partition at
// a time so empty tuples are dropped early.
template <class CellOf>
std::vector<OverlayCell> overlay(const std::vector<std::size_t>& sizes, CellOf cell_of)
{
    std::vector<OverlayCell> current;
    if (sizes.empty()) {
        return current;
    }
    for (std::size_t c = 0; c < sizes[0]; ++c) {
        current.push_back({cell_of(0, c), {c}});
    }
    for (std::size_t p = 1; p < sizes.size(); ++p) {
        std::vector<OverlayCell> next;
        for (const auto& cur : current) {
            for (std::size_t c = 0; c < sizes[p]; ++c) {
                const ConvexCell& other = cell_of(p, c);
                std::vector<Halfspace> hs = cur.cell.constraints;
                hs.insert(hs.end(), other.constraints.begin(), other.constraints.end());
                auto reduced = reduce_cell(cur.cell.dimension, std::move(hs));
                if (!reduced) {
                    continue;
                }
                OverlayCell oc{std::move(*reduced), cur.parts};
                oc.parts.push_back(c);
                next.push_back(std::move(oc));
            }
        }
        current = std::move(next);
    }
    return current;
}

class TermProblem : public CellProblem {
public:
    explicit TermProblem(std::vector<Vec> features) : f_(std::move(features)) {}

    Tag seed_label(const Vec& rho) const override
    {
        std::size_t best = 0;
        Rational best_cost = dot(f_[0], rho);
        for (std::size_t l = 1; l < f_.size(); ++l) {
            Rational c = dot(f_[l], rho);
            if (c < best_cost) {
                best = l;
                best_cost = std::move(c);
            }
        }
        return Tag{static_cast<std::int64_t>(best)};
    }

    CandidateSet candidate_constraints(const Tag& label) const override
    {
        auto l = static_cast<std::size_t>(label.parts.at(0));
        CandidateSet out;
        for (std::size_t o = 0; o < f_.size(); ++o) {
            if (o != l) {
                out.add_comparison(sub(f_[l], f_[o]), 0, Tag{static_cast<std::int64_t>(o)}, l < o);
                if (out.empty) {
                    break;
                }
            }
        }
        return out;
    }

private:
    std::vector<Vec> f_;
};

} // namespace

std::vector<OverlayCell> compute_overlay(const std::vector<std::vector<ConvexCell>>& partitions)
{
    std::vector<std::size_t> sizes;
    for (const auto& p : partitions) {
        sizes.push_back(p.size());
    }
    if (partitions.size() == 1) {
        std::vector<OverlayCell> out;
        for (std::size_t c = 0; c < partitions[0].size(); ++c) {
            out.push_back({partitions[0][c], {c}});
        }
        return out;
    }
    for (std::size_t p = 1; p < partitions.size(); ++p) {
        if (!partitions[p].empty() && !partitions[0].empty() &&
            partitions[p].front().dimension != partitions[0].front().dimension) {
            throw std::invalid_argument("overlay partitions live in different dimensions");
        }
    }
    return overlay(sizes, [&](std::size_t p, std::size_t c) -> const ConvexCell& { return partitions[p][c]; });
}

AlignmentPartition resolve_degeneracies(AlignmentPartition partition)
{
    std::map<Alignment, std::vector<std::size_t>> by_alignment;
    for (std::size_t p = 0; p < partition.pieces.size(); ++p) {
        by_alignment[partition.pieces[p].alignment].push_back(p);
    }
    std::map<std::vector<std::int64_t>, std::size_t> feature_users;
    for (const auto& [a, idx] : by_alignment) {
        ++feature_users[a.features];
    }

    AlignmentPartition out;
    out.domain = partition.domain;
    std::size_t component = 0;
    for (auto& [a, idx] : by_alignment) {
        if (feature_users[a.features] == 1 && idx.size() > 1) {
            std::vector<Halfspace> hs = partition.domain.constraints;
            Vec fa = to_vec(a.features);
            std::int64_t label = 0;
            for (const auto& [g, users] : feature_users) {
                if (g != a.features) {
                    hs.push_back(make_halfspace(sub(fa, to_vec(g)), 0, Tag{label}));
                }
                ++label;
            }
            if (auto cell = reduce_cell(partition.domain.dimension, std::move(hs))) {
                out.pieces.push_back({std::move(*cell), a, component++});
                continue;
            }
        }
        if (idx.size() == 1) {
            auto& piece = partition.pieces[idx[0]];
            out.pieces.push_back({std::move(piece.cell), a, component++});
            continue;
        }
        // shared feature vector: group pieces by facet adjacency
        std::vector<int> comp(idx.size(), -1);
        for (std::size_t s = 0; s < idx.size(); ++s) {
            if (comp[s] >= 0) {
                continue;
            }
            comp[s] = static_cast<int>(component);
            std::vector<std::size_t> stack{s};
            while (!stack.empty()) {
                std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < idx.size(); ++v) {
                    if (comp[v] < 0 &&
                        facet_adjacent(partition.pieces[idx[u]].cell, partition.pieces[idx[v]].cell)) {
                        comp[v] = comp[s];
                        stack.push_back(v);
                    }
                }
            }
            ++component;
        }
        for (std::size_t s = 0; s < idx.size(); ++s) {
            out.pieces.push_back({std::move(partition.pieces[idx[s]].cell), a, static_cast<std::size_t>(comp[s])});
        }
    }
    return out;
}

AlignmentPartition build_execution_dag(const AlignmentSpec& spec, std::string_view s1, std::string_view s2,
                                       const ConvexCell& domain, DagStats* stats)
{
    spec.validate();
    check_sequences(s1, s2);
    if (domain.dimension != spec.dimension()) {
        throw std::invalid_argument("domain dimension does not match the spec");
    }
    ConvexCell root = domain;
    if (!root.witness || !root.strictly_contains(*root.witness)) {
        root.witness = find_interior_point(root.constraints);
        if (!root.witness) {
            throw std::invalid_argument("parameter domain has empty interior");
        }
    }

    const std::size_t m = s1.size(), n = s2.size();
    NodeIndex at{spec.tables.size(), m + 1, n + 1};
    std::vector<std::optional<AlignmentPartition>> node(at.size());
    DagStats local;

    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            const auto c = static_cast<std::size_t>(case_of(s1, s2, i, j));
            for (std::size_t t = 0; t < spec.tables.size(); ++t) {
                const auto& terms = spec.tables[t].cases[c];
                struct Valid {
                    const DPTerm* term;
                    int ref; // position in refs, -1 for a base term
                };
                std::vector<Valid> valid;
                std::vector<std::size_t> refs;
                for (const auto& term : terms) {
                    if (term.transform == Transform::none) {
                        valid.push_back({&term, -1});
                        continue;
                    }
                    std::size_t r = at(term.table, i - term.di, j - term.dj);
                    if (!node[r]) {
                        continue;
                    }
                    auto it = std::find(refs.begin(), refs.end(), r);
                    if (it == refs.end()) {
                        refs.push_back(r);
                        it = refs.end() - 1;
                    }
                    valid.push_back({&term, static_cast<int>(it - refs.begin())});
                }
                if (valid.empty()) {
                    continue;
                }
                ++local.nodes;

                std::vector<OverlayCell> cells;
                if (refs.empty()) {
                    cells.push_back({root, {}});
                } else if (refs.size() == 1) {
                    const auto& pieces = node[refs[0]]->pieces;
                    for (std::size_t p = 0; p < pieces.size(); ++p) {
                        cells.push_back({pieces[p].cell, {p}});
                    }
                } else {
                    std::vector<std::size_t> sizes;
                    for (auto r : refs) {
                        sizes.push_back(node[r]->pieces.size());
                    }
                    cells = overlay(sizes, [&](std::size_t p, std::size_t k) -> const ConvexCell& {
                        return node[refs[p]]->pieces[k].cell;
                    });
                }
                local.overlay_cells += cells.size();

                AlignmentPartition part;
                part.domain = root;
                for (auto& oc : cells) {
                    std::vector<Vec> f;
                    std::vector<const Alignment*> base;
                    for (const auto& v : valid) {
                        std::vector<std::int64_t> w = v.term->weight;
                        const Alignment* a = nullptr;
                        if (v.ref >= 0) {
                            a = &node[refs[static_cast<std::size_t>(v.ref)]]->pieces[oc.parts[static_cast<std::size_t>(v.ref)]].alignment;
                            for (std::size_t k = 0; k < w.size(); ++k) {
                                w[k] += a->features[k];
                            }
                        }
                        f.push_back(to_vec(w));
                        base.push_back(a);
                    }
                    auto make = [&](std::size_t l) {
                        Alignment a = base[l] ? *base[l] : Alignment{{}, {}, std::vector<std::int64_t>(spec.dimension(), 0)};
                        append_column(a, valid[l].term->transform, s1, s2, i, j);
                        for (std::size_t k = 0; k < a.features.size(); ++k) {
                            a.features[k] += valid[l].term->weight[k];
                        }
                        return a;
                    };
                    if (valid.size() == 1) {
                        part.pieces.push_back({std::move(oc.cell), make(0), 0});
                        continue;
                    }
                    TermProblem problem(std::move(f));
                    Vec start = *oc.cell.witness;
                    Subdivision sub = compute_subdivision(oc.cell, problem, start);
                    for (auto& [label, cell] : sub.cells) {
                        part.pieces.push_back({std::move(cell), make(static_cast<std::size_t>(label.parts[0])), 0});
                    }
                }
                part = resolve_degeneracies(std::move(part));
                local.max_pieces = std::max(local.max_pieces, part.pieces.size());
                node[at(t, i, j)] = std::move(part);
            }
        }
    }
    if (stats) {
        *stats = local;
    }
    auto& last = node[at(spec.final_table, m, n)];
    if (!last) {
        throw std::invalid_argument("the final subproblem has no feasible alignment");
    }
    return std::move(*last);
}

namespace {

struct RaySearch {
    const AlignmentSpec& spec;
    std::string_view s1, s2;
    std::size_t solves = 0;
    struct Boundary {
        Rational s;
        Alignment left, right;
    };
    std::vector<Boundary> boundaries;

    static Vec point(const Rational& s) { return {s, 1 - s}; }

    DPResult solve(const std::vector<Vec>& rhos)
    {
        ++solves;
        return dp_solve_lex(spec, s1, s2, rhos);
    }

    // a is optimal on the chord just right of sa, b just left of sb
    void run(const Rational& sa, const Alignment& a, const Rational& sb, const Alignment& b)
    {
        if (a == b || a.features == b.features) {
            return;
        }
        Rational d1 = make_rational(a.features[0] - b.features[0]);
        Rational d2 = make_rational(a.features[1] - b.features[1]);
        if (d1 == d2) {
            throw std::logic_error("ray search: alignments never cross on the chord");
        }
        Rational s = -d2 / (d1 - d2);
        if (s < sa || s > sb) {
            throw std::logic_error("ray search: crossing outside the current sector");
        }
        if (s == sa || s == sb) {
            boundaries.push_back({s, a, b});
            return;
        }
        Vec p = point(s);
        DPResult c = solve({p});
        if (c.alignment.cost(p) == a.cost(p)) {
            boundaries.push_back({s, a, b});
            return;
        }
        run(sa, a, s, c.alignment);
        run(s, c.alignment, sb, b);
    }
};

} // namespace

RaySearchResult ray_search_2d(const AlignmentSpec& spec, std::string_view s1, std::string_view s2)
{
    if (spec.dimension() != 2) {
        throw std::invalid_argument("ray search needs exactly two features");
    }
    RaySearch rs{spec, s1, s2, 0, {}};
    Alignment left = rs.solve({{0, 1}, {1, 0}}).alignment;
    Alignment right = rs.solve({{1, 0}, {0, 1}}).alignment;
    rs.run(0, left, 1, right);

    RaySearchResult out;
    out.dp_solves = rs.solves;
    out.alignments.push_back(left);
    for (auto& b : rs.boundaries) {
        if (b.s == 0) {
            out.alignments.back() = b.right;
            continue;
        }
        if (b.s == 1) {
            continue;
        }
        if (!out.breaks.empty() && out.breaks.back() == b.s) {
            out.alignments.back() = b.right; // zero-width sector
            continue;
        }
        out.breaks.push_back(b.s);
        out.alignments.push_back(b.right);
    }
    return out;
}

AlignmentPartition RaySearchResult::to_partition(const ConvexCell& domain) const
{
    AlignmentPartition out;
    out.domain = domain;
    for (std::size_t k = 0; k < alignments.size(); ++k) {
        std::vector<Halfspace> hs = domain.constraints;
        if (k > 0) {
            const Rational& lo = breaks[k - 1];
            hs.push_back(make_halfspace({lo - 1, lo}, 0, Tag{static_cast<std::int64_t>(k), 0}));
        }
        if (k < breaks.size()) {
            const Rational& hi = breaks[k];
            hs.push_back(make_halfspace({1 - hi, -hi}, 0, Tag{static_cast<std::int64_t>(k), 1}));
        }
        if (auto cell = reduce_cell(domain.dimension, std::move(hs))) {
            out.pieces.push_back({std::move(*cell), alignments[k], k});
        }
    }
    return out;
}

Rational alignment_agreement(const Alignment& alignment, const Alignment& reference)
{
    auto pairs = [](const Alignment& a) {
        std::set<std::pair<std::size_t, std::size_t>> out;
        std::size_t i = 0, j = 0;
        for (std::size_t k = 0; k < a.t1.size(); ++k) {
            bool x = a.t1[k] != '-', y = a.t2[k] != '-';
            if (x && y) {
                out.emplace(i, j);
            }
            i += x;
            j += y;
        }
        return out;
    };
    auto ref = pairs(reference);
    if (ref.empty()) {
        return 1;
    }
    auto mine = pairs(alignment);
    std::size_t common = 0;
    for (const auto& p : ref) {
        common += mine.count(p);
    }
    return make_rational(static_cast<std::int64_t>(common), static_cast<std::int64_t>(ref.size()));
}

} // namespace ptune
