#include "ptune/geometry.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ptune {

std::string Tag::to_string() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) {
            s += ",";
        }
        s += std::to_string(parts[i]);
    }
    return s + ")";
}

std::size_t TagHash::operator()(const Tag& t) const noexcept
{
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (auto p : t.parts) {
        h ^= std::hash<std::int64_t>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

bool Halfspace::same_set(const Halfspace& other) const
{
    if (normal.size() != other.normal.size()) {
        return false;
    }
    // Both sides are compared after scaling by the first nonzero entry.
    Halfspace a = *this;
    Halfspace b = other;
    normalize(a);
    normalize(b);
    return a.normal == b.normal && a.offset == b.offset;
}

bool Halfspace::is_opposite_of(const Halfspace& other) const
{
    if (normal.size() != other.normal.size()) {
        return false;
    }
    Halfspace a = *this;
    Halfspace b = other;
    normalize(a);
    normalize(b);
    for (std::size_t i = 0; i < a.normal.size(); ++i) {
        if (a.normal[i] != -b.normal[i]) {
            return false;
        }
    }
    return a.offset == -b.offset;
}

void normalize(Halfspace& h)
{
    for (const auto& c : h.normal) {
        if (sgn(c) != 0) {
            Rational s = abs(c);
            if (s != 1) {
                for (auto& x : h.normal) {
                    x /= s;
                }
                h.offset /= s;
            }
            return;
        }
    }
    throw std::invalid_argument("halfspace with zero normal");
}

Halfspace make_halfspace(Vec normal, Rational offset, Tag label)
{
    Halfspace h{std::move(normal), std::move(offset), std::move(label)};
    normalize(h);
    return h;
}

bool ConvexCell::contains(const Vec& x) const
{
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const Halfspace& h) { return h.contains(x); });
}

bool ConvexCell::strictly_contains(const Vec& x) const
{
    return std::all_of(constraints.begin(), constraints.end(),
                       [&](const Halfspace& h) { return h.strictly_contains(x); });
}

ConvexCell make_box(std::size_t dimension, const Rational& lo, const Rational& hi)
{
    ConvexCell cell;
    cell.dimension = dimension;
    for (std::size_t i = 0; i < dimension; ++i) {
        Vec up = zeros(dimension);
        up[i] = 1;
        Vec down = zeros(dimension);
        down[i] = -1;
        cell.constraints.push_back(make_halfspace(down, -lo, Tag::parent_facet(2 * i)));
        cell.constraints.push_back(make_halfspace(up, hi, Tag::parent_facet(2 * i + 1)));
    }
    Vec mid(dimension, (lo + hi) / 2);
    cell.witness = mid;
    return cell;
}

namespace {

// ---------------------------------------------------------------------------
// Seidel's LP on rows a.x <= b inside the box |x_i| <= bound, maximizing a
// list of linear functionals lexicographically.

struct Row {
    Vec a;
    Rational b;
};

using Functionals = std::vector<Vec>;

class SeidelSolver {
public:
    SeidelSolver(Rational bound, std::uint64_t seed) : bound_(std::move(bound)), rng_(seed) {}

    std::optional<Vec> solve(std::size_t dim, std::vector<Row> rows, const Functionals& objectives)
    {
        if (dim == 1) {
            return solve_1d(rows, objectives);
        }
        std::shuffle(rows.begin(), rows.end(), rng_);
        Vec x = box_optimum(dim, objectives);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (dot(rows[i].a, x) <= rows[i].b) {
                continue;
            }
            auto next = optimum_on_boundary(dim, rows, i, objectives);
            if (!next) {
                return std::nullopt;
            }
            x = std::move(*next);
        }
        return x;
    }

private:
    Vec box_optimum(std::size_t dim, const Functionals& objectives) const
    {
        Vec x = zeros(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            for (const auto& f : objectives) {
                int s = sgn(f[j]);
                if (s != 0) {
                    x[j] = s > 0 ? bound_ : Rational(-bound_);
                    break;
                }
            }
        }
        return x;
    }

    std::optional<Vec> solve_1d(const std::vector<Row>& rows, const Functionals& objectives) const
    {
        Rational lo = -bound_;
        Rational hi = bound_;
        for (const auto& r : rows) {
            int s = sgn(r.a[0]);
            if (s == 0) {
                if (sgn(r.b) < 0) {
                    return std::nullopt;
                }
                continue;
            }
            Rational t = r.b / r.a[0];
            if (s > 0) {
                if (t < hi) {
                    hi = t;
                }
            } else if (t > lo) {
                lo = t;
            }
        }
        if (lo > hi) {
            return std::nullopt;
        }
        for (const auto& f : objectives) {
            int s = sgn(f[0]);
            if (s != 0) {
                return Vec{s > 0 ? hi : lo};
            }
        }
        return Vec{lo};
    }

    // Lexicographic optimum of rows[0..i) restricted to rows[i] as an
    // equality, lifted back to dim coordinates.
    std::optional<Vec> optimum_on_boundary(std::size_t dim, const std::vector<Row>& rows, std::size_t i,
                                           const Functionals& objectives)
    {
        const Row& plane = rows[i];
        std::size_t pivot = 0;
        while (sgn(plane.a[pivot]) == 0) {
            ++pivot;
        }
        const Rational& ap = plane.a[pivot];

        auto project = [&](const Vec& a) {
            Vec out;
            out.reserve(dim - 1);
            Rational factor = a[pivot] / ap;
            for (std::size_t j = 0; j < dim; ++j) {
                if (j == pivot) {
                    continue;
                }
                out.push_back(sgn(factor) == 0 ? a[j] : Rational(a[j] - factor * plane.a[j]));
            }
            return out;
        };

        std::vector<Row> sub;
        sub.reserve(i + 2);
        auto push_row = [&](const Vec& a, const Rational& b) -> bool {
            Rational factor = a[pivot] / ap;
            Row r{project(a), sgn(factor) == 0 ? b : Rational(b - factor * plane.b)};
            if (is_zero(r.a)) {
                return sgn(r.b) >= 0;
            }
            sub.push_back(std::move(r));
            return true;
        };
        for (std::size_t k = 0; k < i; ++k) {
            if (!push_row(rows[k].a, rows[k].b)) {
                return std::nullopt;
            }
        }
        // The eliminated coordinate keeps its box bounds as explicit rows.
        Vec unit = zeros(dim);
        unit[pivot] = 1;
        if (!push_row(unit, bound_)) {
            return std::nullopt;
        }
        unit[pivot] = -1;
        if (!push_row(unit, bound_)) {
            return std::nullopt;
        }

        Functionals sub_obj;
        sub_obj.reserve(objectives.size());
        for (const auto& f : objectives) {
            Vec g = project(f);
            if (!is_zero(g)) {
                sub_obj.push_back(std::move(g));
            }
        }

        auto y = solve(dim - 1, std::move(sub), sub_obj);
        if (!y) {
            return std::nullopt;
        }
        Vec x(dim);
        Rational rest = plane.b;
        for (std::size_t j = 0, k = 0; j < dim; ++j) {
            if (j == pivot) {
                continue;
            }
            x[j] = (*y)[k++];
            if (sgn(plane.a[j]) != 0) {
                rest -= plane.a[j] * x[j];
            }
        }
        x[pivot] = rest / ap;
        return x;
    }

    Rational bound_;
    std::mt19937_64 rng_;
};

// Upper bound on |x_j| over every basic solution of the system (rows plus
// coordinate hyperplanes), by Hadamard's inequality on integer-scaled rows.
Rational basic_solution_bound(std::span<const Row> rows, std::size_t dim)
{
    mpz_class max_norm = 1;
    for (const auto& r : rows) {
        mpz_class lcm = r.b.get_den();
        for (const auto& x : r.a) {
            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
        }
        mpz_class norm = abs(r.b.get_num()) * (lcm / r.b.get_den());
        for (const auto& x : r.a) {
            norm += abs(x.get_num()) * (lcm / x.get_den());
        }
        if (norm > max_norm) {
            max_norm = norm;
        }
    }
    mpz_class bound;
    mpz_pow_ui(bound.get_mpz_t(), max_norm.get_mpz_t(), static_cast<unsigned long>(dim));
    return Rational(bound);
}

Functionals lex_objectives(const Vec& primary)
{
    Functionals f;
    f.push_back(primary);
    for (std::size_t j = 0; j < primary.size(); ++j) {
        Vec e = zeros(primary.size());
        e[j] = 1;
        f.push_back(std::move(e));
    }
    return f;
}

LPResult solve_rows(const Vec& objective, std::vector<Row> rows, std::uint64_t seed)
{
    const std::size_t dim = objective.size();
    Rational bound = basic_solution_bound(rows, dim) + 1;
    Functionals objectives = lex_objectives(objective);

    SeidelSolver solver(bound, seed);
    auto x = solver.solve(dim, rows, objectives);
    if (!x) {
        return LPResult{LpStatus::infeasible, {}, {}};
    }
    bool on_box = std::any_of(x->begin(), x->end(), [&](const Rational& v) { return abs(v) == bound; });
    Rational value = dot(objective, *x);
    if (on_box && !is_zero(objective)) {
        SeidelSolver wider(2 * bound, seed);
        auto y = wider.solve(dim, std::move(rows), objectives);
        if (y && dot(objective, *y) > value) {
            return LPResult{LpStatus::unbounded, {}, {}};
        }
    }
    return LPResult{LpStatus::optimal, std::move(*x), std::move(value)};
}

void check_dimensions(std::span<const Halfspace> constraints, std::size_t dim)
{
    for (const auto& h : constraints) {
        if (h.normal.size() != dim) {
            throw std::invalid_argument("constraint dimension mismatch");
        }
    }
}

// Polynomial in eps, lowest degree first.
using EpsPoly = std::vector<Rational>;

int compare_lex(const EpsPoly& a, const EpsPoly& b)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c != 0) {
            return c;
        }
    }
    return 0;
}

} // namespace

LPResult solve_lp(const Vec& objective, std::span<const Halfspace> constraints, Sense sense,
                  std::uint64_t seed)
{
    const std::size_t dim = objective.size();
    if (dim == 0) {
        throw std::invalid_argument("solve_lp: dimension must be positive");
    }
    check_dimensions(constraints, dim);
    std::vector<Row> rows;
    rows.reserve(constraints.size());
    for (const auto& h : constraints) {
        rows.push_back(Row{h.normal, h.offset});
    }
    if (sense == Sense::maximize) {
        return solve_rows(objective, std::move(rows), seed);
    }
    Vec negated = scale(objective, -1);
    LPResult r = solve_rows(negated, std::move(rows), seed);
    if (r.status == LpStatus::optimal) {
        r.value = -r.value;
    }
    return r;
}

std::optional<Vec> find_interior_point(std::span<const Halfspace> constraints, std::uint64_t seed)
{
    if (constraints.empty()) {
        throw std::invalid_argument("find_interior_point: empty constraint list");
    }
    const std::size_t dim = constraints.front().dimension();
    check_dimensions(constraints, dim);

    // maximize t  s.t.  a.x + t*|a|_1 <= b,  t <= 1
    std::vector<Row> rows;
    rows.reserve(constraints.size() + 1);
    for (const auto& h : constraints) {
        Vec a = h.normal;
        Rational l1 = 0;
        for (const auto& c : h.normal) {
            l1 += abs(c);
        }
        a.push_back(l1);
        rows.push_back(Row{std::move(a), h.offset});
    }
    Vec cap = zeros(dim + 1);
    cap[dim] = 1;
    rows.push_back(Row{cap, Rational(1)});

    LPResult r = solve_rows(cap, std::move(rows), seed);
    if (r.status != LpStatus::optimal || sgn(r.value) <= 0) {
        return std::nullopt;
    }
    r.point.pop_back();
    return std::move(r.point);
}

std::optional<std::size_t> ray_shoot_index(std::span<const Halfspace> constraints, const Vec& origin,
                                           const Vec& target)
{
    const std::size_t dim = origin.size();
    if (target.size() != dim) {
        throw std::invalid_argument("ray_shoot: dimension mismatch");
    }
    check_dimensions(constraints, dim);
    Vec direction = sub(target, origin);

    // Translated ray origin + (eps, ..., eps^d) + t * direction meets
    // a.x = b at t(eps) = (b - a.origin - sum_k a_k eps^k) / (a.direction).
    std::optional<std::size_t> best;
    EpsPoly best_t;
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const Halfspace& h = constraints[i];
        Rational g = dot(h.normal, direction);
        if (sgn(g) <= 0) {
            continue;
        }
        EpsPoly t(dim + 1);
        t[0] = (h.offset - dot(h.normal, origin)) / g;
        for (std::size_t k = 0; k < dim; ++k) {
            t[k + 1] = -h.normal[k] / g;
        }
        if (!best || compare_lex(t, best_t) < 0) {
            best = i;
            best_t = std::move(t);
        }
    }
    return best;
}

std::optional<Tag> ray_shoot(std::span<const Halfspace> constraints, const Vec& origin, const Vec& target)
{
    auto idx = ray_shoot_index(constraints, origin, target);
    if (!idx) {
        return std::nullopt;
    }
    return constraints[*idx].label;
}

std::vector<std::size_t> clarkson_reduce(std::span<const Halfspace> constraints, const Vec& interior,
                                         std::uint64_t seed)
{
    const std::size_t dim = interior.size();
    check_dimensions(constraints, dim);
    for (const auto& h : constraints) {
        if (!h.strictly_contains(interior)) {
            throw std::invalid_argument("clarkson_reduce: interior point is not strictly feasible");
        }
    }

    std::vector<bool> pending(constraints.size(), true);
    std::size_t remaining = constraints.size();
    std::vector<std::size_t> kept;
    std::vector<Halfspace> system;

    std::size_t cursor = 0;
    while (remaining > 0) {
        while (!pending[cursor]) {
            ++cursor;
        }
        const std::size_t k = cursor;
        const Halfspace& hk = constraints[k];

        // maximize a_k.x over the kept constraints and a_k.x <= b_k + 1
        system.push_back(Halfspace{hk.normal, hk.offset + 1, hk.label});
        LPResult r = solve_lp(hk.normal, system, Sense::maximize, seed);
        system.pop_back();
        if (r.status != LpStatus::optimal) {
            throw std::logic_error("clarkson_reduce: relaxed redundancy LP not optimal");
        }
        if (r.value <= hk.offset) {
            pending[k] = false;
            --remaining;
            continue;
        }
        auto hit = ray_shoot_index(constraints, interior, r.point);
        if (!hit || !pending[*hit]) {
            throw std::logic_error("clarkson_reduce: ray shooting did not find a pending facet");
        }
        pending[*hit] = false;
        --remaining;
        kept.push_back(*hit);
        system.push_back(constraints[*hit]);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::optional<ConvexCell> reduce_cell(std::size_t dimension, std::vector<Halfspace> constraints,
                                      std::uint64_t seed)
{
    if (constraints.empty()) {
        throw std::invalid_argument("reduce_cell: no constraints");
    }
    auto z = find_interior_point(constraints, seed);
    if (!z) {
        return std::nullopt;
    }
    auto keep = clarkson_reduce(constraints, *z, seed);
    ConvexCell cell;
    cell.dimension = dimension;
    cell.constraints.reserve(keep.size());
    for (auto i : keep) {
        cell.constraints.push_back(std::move(constraints[i]));
    }
    cell.witness = std::move(*z);
    return cell;
}

std::optional<std::vector<Halfspace>> restrict_to_hyperplane(std::span<const Halfspace> constraints,
                                                             const Halfspace& plane)
{
    const std::size_t dim = plane.dimension();
    std::size_t pivot = 0;
    while (pivot < dim && sgn(plane.normal[pivot]) == 0) {
        ++pivot;
    }
    if (pivot == dim) {
        throw std::invalid_argument("restrict_to_hyperplane: zero normal");
    }
    const Rational& np = plane.normal[pivot];
    std::vector<Halfspace> out;
    for (const auto& h : constraints) {
        Rational factor = h.normal[pivot] / np;
        Vec a;
        a.reserve(dim - 1);
        for (std::size_t j = 0; j < dim; ++j) {
            if (j != pivot) {
                a.push_back(h.normal[j] - factor * plane.normal[j]);
            }
        }
        Rational b = h.offset - factor * plane.offset;
        if (is_zero(a)) {
            if (sgn(b) < 0) {
                return std::nullopt;
            }
            continue;
        }
        out.push_back(Halfspace{std::move(a), std::move(b), h.label});
    }
    return out;
}

bool facet_adjacent(const ConvexCell& a, const ConvexCell& b)
{
    for (std::size_t i = 0; i < a.constraints.size(); ++i) {
        for (std::size_t j = 0; j < b.constraints.size(); ++j) {
            if (!a.constraints[i].is_opposite_of(b.constraints[j])) {
                continue;
            }
            std::vector<Halfspace> others;
            for (std::size_t k = 0; k < a.constraints.size(); ++k) {
                if (k != i) {
                    others.push_back(a.constraints[k]);
                }
            }
            for (std::size_t k = 0; k < b.constraints.size(); ++k) {
                if (k != j) {
                    others.push_back(b.constraints[k]);
                }
            }
            auto restricted = restrict_to_hyperplane(others, a.constraints[i]);
            if (!restricted) {
                continue;
            }
            if (restricted->empty() || find_interior_point(*restricted)) {
                return true;
            }
        }
    }
    return false;
}

} // namespace ptune
