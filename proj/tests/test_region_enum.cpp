#include "doctest.h"

#include "ptune/region_enum.hpp"

#include <random>

using namespace ptune;

namespace {

// Behavior = index of the smallest affine function c_l . x + b_l, lowest
// index on ties.
class AffineArgmin : public CellProblem {
public:
    std::vector<Vec> slopes;
    std::vector<Rational> intercepts;
    std::vector<Tag> tags;

    Rational value(std::size_t l, const Vec& x) const { return dot(slopes[l], x) + intercepts[l]; }

    std::size_t index_of(const Tag& t) const
    {
        for (std::size_t l = 0; l < tags.size(); ++l) {
            if (tags[l] == t) {
                return l;
            }
        }
        throw std::out_of_range("unknown tag");
    }

    Tag seed_label(const Vec& x) const override
    {
        std::size_t best = 0;
        for (std::size_t l = 1; l < slopes.size(); ++l) {
            if (value(l, x) < value(best, x)) {
                best = l;
            }
        }
        return tags[best];
    }

    CandidateSet candidate_constraints(const Tag& label) const override
    {
        std::size_t l = index_of(label);
        CandidateSet out;
        for (std::size_t o = 0; o < slopes.size(); ++o) {
            if (o != l) {
                out.add_comparison(sub(slopes[l], slopes[o]), intercepts[o] - intercepts[l], tags[o], l < o);
            }
        }
        return out;
    }
};

Rational q(long p, long d = 1)
{
    return make_rational(p, d);
}

// Four points 0, 1, 3, 28/5 on a line after {0,1} merged, mixing single and
// complete linkage with weight alpha on single.
AffineArgmin line_instance()
{
    AffineArgmin p;
    p.slopes = {{q(-1)}, {q(-1)}, {q(0)}};
    p.intercepts = {q(3), q(28, 5), q(13, 5)};
    p.tags = {Tag{0, 1}, Tag{0, 2}, Tag{1, 2}};
    return p;
}

// One buyer, quantities 0..2 valued 0, 3, 5. Maximizing utility is the argmin
// of price paid minus value: q=0 -> 0, q=1 -> p1 + p2 - 3, q=2 -> p1 + 2 p2 - 5.
AffineArgmin tariff_instance()
{
    AffineArgmin p;
    p.slopes = {{q(0), q(0)}, {q(1), q(1)}, {q(1), q(2)}};
    p.intercepts = {q(0), q(-3), q(-5)};
    p.tags = {Tag{0}, Tag{1}, Tag{2}};
    return p;
}

AffineArgmin random_instance(std::mt19937_64& rng, std::size_t d, std::size_t count)
{
    std::uniform_int_distribution<int> c(-20, 20);
    AffineArgmin p;
    for (std::size_t l = 0; l < count; ++l) {
        Vec s(d);
        for (auto& x : s) {
            x = c(rng);
        }
        p.slopes.push_back(s);
        p.intercepts.emplace_back(c(rng));
        p.tags.push_back(Tag{static_cast<std::int64_t>(l)});
    }
    return p;
}

Vec random_point(std::mt19937_64& rng, std::size_t d, long lo, long hi)
{
    std::uniform_int_distribution<long> u(lo * 100003, hi * 100003);
    Vec x(d);
    for (auto& v : x) {
        v = make_rational(u(rng), 100003);
    }
    return x;
}

bool has_constraint(const ConvexCell& c, Vec normal, Rational offset)
{
    Halfspace want = make_halfspace(std::move(normal), std::move(offset));
    for (const auto& h : c.constraints) {
        if (h.same_set(want)) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("vertex cell on the four-point line")
{
    auto p = line_instance();
    ConvexCell unit = make_box(1, 0, 1);
    auto vc = compute_vertex_cell(unit, Tag{0, 1}, p);
    REQUIRE(vc);
    CHECK(vc->neighbors == std::vector<Tag>{Tag{1, 2}});
    CHECK(has_constraint(vc->cell, {q(-1)}, q(-2, 5)));
    CHECK(has_constraint(vc->cell, {q(1)}, q(1)));
    CHECK(vc->cell.constraints.size() == 2);
    // 28/5 - alpha never wins
    CHECK_FALSE(compute_vertex_cell(unit, Tag{0, 2}, p));
}

TEST_CASE("single behavior fills the parent")
{
    AffineArgmin p;
    p.slopes = {{q(1), q(1)}};
    p.intercepts = {q(0)};
    p.tags = {Tag{7}};
    ConvexCell unit = make_box(2, 0, 1);
    auto vc = compute_vertex_cell(unit, Tag{7}, p);
    REQUIRE(vc);
    CHECK(vc->neighbors.empty());
    CHECK(vc->cell.constraints.size() == 4);
}

TEST_CASE("tariff cell for two units")
{
    auto p = tariff_instance();
    ConvexCell quad = make_box(2, 0, 10);
    auto vc = compute_vertex_cell(quad, Tag{2}, p);
    REQUIRE(vc);
    CHECK(vc->neighbors == std::vector<Tag>{Tag{0}, Tag{1}});
    CHECK(has_constraint(vc->cell, {q(0), q(1)}, q(2)));
    CHECK(has_constraint(vc->cell, {q(1), q(2)}, q(5)));
    CHECK(has_constraint(vc->cell, {q(-1), q(0)}, q(0)));
    CHECK(has_constraint(vc->cell, {q(0), q(-1)}, q(0)));
    CHECK(vc->cell.constraints.size() == 4);

    Subdivision s = compute_subdivision(quad, p, {q(1, 3), q(1, 7)});
    CHECK(s.cells.size() == 3);
    CHECK(s.adjacency.size() == 3);
}

TEST_CASE("subdivision of the four-point line")
{
    auto p = line_instance();
    ConvexCell unit = make_box(1, 0, 1);
    Subdivision s = compute_subdivision(unit, p, {q(1, 2)});
    REQUIRE(s.cells.size() == 2);
    CHECK(s.adjacency == std::set<std::pair<Tag, Tag>>{{Tag{0, 1}, Tag{1, 2}}});
    CHECK(has_constraint(s.cells.at(Tag{1, 2}), {q(1)}, q(2, 5)));
    CHECK(has_constraint(s.cells.at(Tag{0, 1}), {q(-1)}, q(-2, 5)));
    // starting in the other cell gives the same result
    Subdivision t = compute_subdivision(unit, p, {q(1, 10)});
    CHECK(t.adjacency == s.adjacency);
    CHECK(t.cells.size() == 2);
}

TEST_CASE("identical objectives collapse to the smallest label")
{
    AffineArgmin p;
    p.slopes = {{q(2), q(-1)}, {q(2), q(-1)}, {q(2), q(-1)}};
    p.intercepts = {q(1), q(1), q(1)};
    p.tags = {Tag{1}, Tag{3}, Tag{2}};
    ConvexCell unit = make_box(2, 0, 1);
    Subdivision s = compute_subdivision(unit, p, {q(1, 2), q(1, 3)});
    REQUIRE(s.cells.size() == 1);
    CHECK(s.cells.begin()->first == Tag{1});
    CHECK(s.adjacency.empty());
}

TEST_CASE("start must be interior")
{
    auto p = line_instance();
    CHECK_THROWS_AS(compute_subdivision(make_box(1, 0, 1), p, {q(0)}), std::invalid_argument);
}

TEST_CASE("random lower envelopes agree with pointwise argmin")
{
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t d = 1 + trial % 3;
        auto p = random_instance(rng, d, 4 + trial % 9);
        ConvexCell box = make_box(d, -3, 3);
        Subdivision s = compute_subdivision(box, p, random_point(rng, d, -2, 2));

        int located = 0;
        for (int k = 0; k < 250; ++k) {
            Vec x = random_point(rng, d, -3, 3);
            auto where = s.locate(x);
            if (!where) {
                continue; // on a boundary
            }
            ++located;
            CHECK(*where == p.seed_label(x));
        }
        CHECK(located > 240);

        for (const auto& [a, b] : s.adjacency) {
            CHECK(a < b);
            CHECK(s.cells.count(a));
            CHECK(s.cells.count(b));
        }
        if (d == 2) {
            CHECK(s.adjacency.size() <= 3 * s.cells.size());
        }

        // a different start yields the same cells
        Subdivision t = compute_subdivision(box, p, random_point(rng, d, -2, 2));
        REQUIRE(t.cells.size() == s.cells.size());
        for (const auto& [label, cell] : s.cells) {
            REQUIRE(t.cells.count(label));
            const auto& other = t.cells.at(label);
            CHECK(other.constraints.size() == cell.constraints.size());
            for (const auto& h : cell.constraints) {
                CHECK(has_constraint(other, h.normal, h.offset));
            }
        }
        CHECK(t.adjacency == s.adjacency);
    }
}
