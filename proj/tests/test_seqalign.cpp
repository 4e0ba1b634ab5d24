#include "doctest.h"

#include "ptune/seqalign.hpp"

#include <algorithm>
#include <functional>
#include <random>

using namespace ptune;

namespace {

Rational q(long p, long d = 1)
{
    return make_rational(p, d);
}

// Every alignment of s1 and s2 (no all-space columns).
std::vector<Alignment> all_alignments(const std::string& s1, const std::string& s2)
{
    std::vector<Alignment> out;
    std::string a, b;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
        if (i == s1.size() && j == s2.size()) {
            out.push_back({a, b, {}});
            return;
        }
        if (i < s1.size() && j < s2.size()) {
            a.push_back(s1[i]), b.push_back(s2[j]);
            rec(i + 1, j + 1);
            a.pop_back(), b.pop_back();
        }
        if (i < s1.size()) {
            a.push_back(s1[i]), b.push_back('-');
            rec(i + 1, j);
            a.pop_back(), b.pop_back();
        }
        if (j < s2.size()) {
            a.push_back('-'), b.push_back(s2[j]);
            rec(i, j + 1);
            a.pop_back(), b.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

// Mismatches, spaces and (optionally) maximal runs of spaces in either row.
std::vector<std::int64_t> count_features(const std::string& t1, const std::string& t2, bool gaps)
{
    std::int64_t mis = 0, spaces = 0, runs = 0;
    for (std::size_t k = 0; k < t1.size(); ++k) {
        if (t1[k] != '-' && t2[k] != '-' && t1[k] != t2[k]) {
            ++mis;
        }
        spaces += (t1[k] == '-') + (t2[k] == '-');
        runs += t1[k] == '-' && (k == 0 || t1[k - 1] != '-');
        runs += t2[k] == '-' && (k == 0 || t2[k - 1] != '-');
    }
    if (gaps) {
        return {mis, spaces, runs};
    }
    return {mis, spaces};
}

std::string strip(const std::string& t)
{
    std::string s;
    std::copy_if(t.begin(), t.end(), std::back_inserter(s), [](char c) { return c != '-'; });
    return s;
}

Rational brute_min(const std::string& s1, const std::string& s2, const Vec& rho)
{
    std::optional<Rational> best;
    for (auto& a : all_alignments(s1, s2)) {
        a.features = count_features(a.t1, a.t2, rho.size() == 3);
        Rational c = a.cost(rho);
        if (!best || c < *best) {
            best = c;
        }
    }
    return *best;
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len, const std::string& alphabet)
{
    std::size_t len = rng() % (max_len + 1);
    std::string s;
    for (std::size_t k = 0; k < len; ++k) {
        s.push_back(alphabet[rng() % alphabet.size()]);
    }
    return s;
}

Vec random_point(std::mt19937_64& rng, std::size_t d)
{
    Vec v;
    for (std::size_t k = 0; k < d; ++k) {
        v.push_back(make_rational(static_cast<long>(rng() % 97 + 1), 97));
    }
    return v;
}

void check_wellformed(const Alignment& a, const std::string& s1, const std::string& s2, bool gaps)
{
    REQUIRE(a.t1.size() == a.t2.size());
    CHECK(strip(a.t1) == s1);
    CHECK(strip(a.t2) == s2);
    for (std::size_t k = 0; k < a.t1.size(); ++k) {
        CHECK_FALSE((a.t1[k] == '-' && a.t2[k] == '-'));
    }
    CHECK(a.features == count_features(a.t1, a.t2, gaps));
}

} // namespace

TEST_CASE("presets validate and reject malformed specs")
{
    for (const auto& name : preset_names()) {
        CHECK_NOTHROW(preset_spec(name).validate());
    }
    CHECK_THROWS_AS(preset_spec("nope"), std::invalid_argument);

    auto spec = preset_spec("mismatch-space");
    auto bad = spec;
    bad.tables[0].cases[static_cast<std::size_t>(DPCase::row)][0].dj = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.tables[0].cases[static_cast<std::size_t>(DPCase::match)][0].weight = {0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.tables[0].cases[static_cast<std::size_t>(DPCase::match)].push_back({{0, 0}, 0, 0, 0, Transform::copy});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = spec;
    bad.final_table = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK(parse_transform(to_string(Transform::extend_space_2)) == Transform::extend_space_2);
    CHECK_THROWS_AS(parse_transform("stretch"), std::invalid_argument);
}

TEST_CASE("small alignments")
{
    auto ms = preset_spec("mismatch-space");
    auto gap = preset_spec("mismatch-space-gap");

    auto same = dp_solve(ms, "A", "A", {q(1), q(1)});
    CHECK(same.cost == std::vector<Rational>{0});
    CHECK(same.alignment.t1 == "A");
    CHECK(same.alignment.t2 == "A");

    auto at = dp_solve(ms, "A", "T", {q(3), q(1)});
    CHECK(at.cost[0] == 2);
    CHECK(at.alignment.t1 == "A-");
    CHECK(at.alignment.t2 == "-T");
    CHECK(at.alignment.features == std::vector<std::int64_t>{0, 2});

    auto aa = dp_solve(gap, "AA", "A", {q(1), q(1), q(5)});
    CHECK(aa.cost[0] == 6);
    check_wellformed(aa.alignment, "AA", "A", true);

    auto empty = dp_solve(gap, "", "", {q(1), q(1), q(1)});
    CHECK(empty.cost[0] == 0);
    CHECK(empty.alignment.t1.empty());

    auto one_side = dp_solve(gap, "", "ACG", {q(1), q(2), q(3)});
    CHECK(one_side.cost[0] == 9);
    CHECK(one_side.alignment.t1 == "---");

    CHECK_THROWS_AS(dp_solve(ms, "A-", "A", {q(1), q(1)}), std::invalid_argument);
    CHECK_THROWS_AS(dp_solve(ms, "A", "A", {q(1)}), std::invalid_argument);
}

TEST_CASE("lexicographic tie-breaking")
{
    auto ms = preset_spec("mismatch-space");
    // at rho = (2, 1) a mismatch and two spaces tie; the secondary level decides
    auto prefer_spaces = dp_solve_lex(ms, "A", "T", {{q(2), q(1)}, {q(1), q(0)}});
    CHECK(prefer_spaces.alignment.features == std::vector<std::int64_t>{0, 2});
    auto prefer_mismatch = dp_solve_lex(ms, "A", "T", {{q(2), q(1)}, {q(0), q(1)}});
    CHECK(prefer_mismatch.alignment.features == std::vector<std::int64_t>{1, 0});
    CHECK(prefer_mismatch.cost == std::vector<Rational>{2, 0});
}

TEST_CASE("dp matches exhaustive enumeration")
{
    std::mt19937_64 rng(11);
    for (const auto& name : preset_names()) {
        auto spec = preset_spec(name);
        bool gaps = spec.dimension() == 3;
        for (int trial = 0; trial < 150; ++trial) {
            auto s1 = random_string(rng, 5, "ACG");
            auto s2 = random_string(rng, 5, "ACG");
            Vec rho = random_point(rng, spec.dimension());
            auto r = dp_solve(spec, s1, s2, rho);
            CHECK(r.cost[0] == brute_min(s1, s2, rho));
            CHECK(r.alignment.cost(rho) == r.cost[0]);
            check_wellformed(r.alignment, s1, s2, gaps);

            // positive rescaling keeps the alignment and scales the cost
            Vec scaled = scale(rho, q(7, 3));
            auto rs = dp_solve(spec, s1, s2, scaled);
            CHECK(rs.alignment == r.alignment);
            CHECK(rs.cost[0] == r.cost[0] * q(7, 3));
        }
    }
}

TEST_CASE("overlay")
{
    auto box = alignment_domain(2);
    auto half = [&](Vec a, Rational b) {
        auto c = box.constraints;
        c.push_back(make_halfspace(std::move(a), std::move(b), Tag{9}));
        return *reduce_cell(2, c);
    };
    std::vector<ConvexCell> vertical{half({q(1), q(0)}, q(1, 2)), half({q(-1), q(0)}, q(-1, 2))};
    std::vector<ConvexCell> horizontal{half({q(0), q(1)}, q(1, 2)), half({q(0), q(-1)}, q(-1, 2))};

    auto quads = compute_overlay({vertical, horizontal});
    CHECK(quads.size() == 4);
    for (const auto& oc : quads) {
        Vec w = *oc.cell.witness;
        CHECK(vertical[oc.parts[0]].strictly_contains(w));
        CHECK(horizontal[oc.parts[1]].strictly_contains(w));
    }

    auto same = compute_overlay({vertical, vertical});
    CHECK(same.size() == 2);
    for (const auto& oc : same) {
        CHECK(oc.parts[0] == oc.parts[1]);
    }
    CHECK(compute_overlay({vertical}).size() == 2);
}

TEST_CASE("execution dag on two-character inputs")
{
    auto ms = preset_spec("mismatch-space");
    auto box = alignment_domain(2);

    auto swap = build_execution_dag(ms, "AB", "BA", box);
    CHECK(swap.logical_count() == 2);
    auto below = swap.locate({q(1, 5), q(4, 5)});
    REQUIRE(below);
    CHECK(swap.pieces[*below].alignment.features == std::vector<std::int64_t>{2, 0});
    auto above = swap.locate({q(4, 5), q(1, 5)});
    REQUIRE(above);
    CHECK(swap.pieces[*above].alignment.features == std::vector<std::int64_t>{0, 2});
    CHECK_FALSE(swap.locate({q(1, 2), q(1, 2)}));

    auto at = build_execution_dag(ms, "A", "T", box);
    CHECK(at.logical_count() == 2);
    CHECK(at.pieces[*at.locate({q(1, 2), q(1, 5)})].alignment.features == std::vector<std::int64_t>{0, 2});
    CHECK(at.pieces[*at.locate({q(1, 2), q(3, 10)})].alignment.features == std::vector<std::int64_t>{1, 0});
    CHECK_FALSE(at.locate({q(1, 2), q(1, 4)}));

    auto trivial = build_execution_dag(ms, "AC", "AC", box);
    CHECK(trivial.pieces.size() == 1);
    CHECK(trivial.pieces[0].alignment.t1 == "AC");
}

TEST_CASE("execution dag agrees with the dp everywhere")
{
    std::mt19937_64 rng(5);
    for (const auto& name : preset_names()) {
        auto spec = preset_spec(name);
        const std::size_t d = spec.dimension();
        bool gaps = d == 3;
        auto box = alignment_domain(d);
        for (int trial = 0; trial < (gaps ? 6 : 20); ++trial) {
            auto s1 = random_string(rng, gaps ? 3 : 4, "AC");
            auto s2 = random_string(rng, gaps ? 3 : 4, "AC");
            DagStats stats;
            auto part = build_execution_dag(spec, s1, s2, box, &stats);
            CHECK(stats.nodes > 0);
            REQUIRE_FALSE(part.pieces.empty());
            for (const auto& piece : part.pieces) {
                check_wellformed(piece.alignment, s1, s2, gaps);
                Vec w = *piece.cell.witness;
                CHECK(piece.alignment.cost(w) == brute_min(s1, s2, w));
            }
            for (int k = 0; k < 25; ++k) {
                Vec rho = random_point(rng, d);
                auto r = dp_solve(spec, s1, s2, rho);
                auto at = part.locate(rho);
                if (at) {
                    CHECK(part.pieces[*at].alignment.cost(rho) == r.cost[0]);
                }
            }
            // distinct logical cells carry distinct alignments or are disconnected
            CHECK(part.logical_count() <= part.pieces.size());
        }
    }
}

TEST_CASE("ray search matches the dag")
{
    auto ms = preset_spec("mismatch-space");
    auto box = alignment_domain(2);

    auto at = ray_search_2d(ms, "A", "T");
    REQUIRE(at.breaks.size() == 1);
    CHECK(at.breaks[0] == q(2, 3)); // rho1 = 2 rho2
    CHECK(at.alignments.front().features == std::vector<std::int64_t>{1, 0});
    CHECK(at.alignments.back().features == std::vector<std::int64_t>{0, 2});

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        auto s1 = random_string(rng, 6, "ACGT");
        auto s2 = random_string(rng, 6, "ACGT");
        auto rs = ray_search_2d(ms, s1, s2);
        CHECK(rs.alignments.size() == rs.breaks.size() + 1);
        CHECK(std::is_sorted(rs.breaks.begin(), rs.breaks.end()));
        CHECK(std::adjacent_find(rs.breaks.begin(), rs.breaks.end()) == rs.breaks.end());
        CHECK(rs.dp_solves <= 2 * rs.alignments.size() + 1);

        auto dag = build_execution_dag(ms, s1, s2, box);
        auto sectors = rs.to_partition(box);
        CHECK(sectors.pieces.size() == rs.alignments.size());
        for (int k = 0; k < 30; ++k) {
            Vec rho = random_point(rng, 2);
            auto r = dp_solve(ms, s1, s2, rho);
            if (auto p = sectors.locate(rho)) {
                CHECK(sectors.pieces[*p].alignment.cost(rho) == r.cost[0]);
            }
            if (auto p = dag.locate(rho)) {
                CHECK(dag.pieces[*p].alignment.cost(rho) == r.cost[0]);
            }
        }
    }
    CHECK_THROWS_AS(ray_search_2d(preset_spec("mismatch-space-gap"), "A", "C"), std::invalid_argument);
}

TEST_CASE("alignment agreement")
{
    Alignment ref{"AC-", "A-C", {}};
    CHECK(alignment_agreement(ref, ref) == 1);
    CHECK(alignment_agreement({"AC", "AC", {}}, ref) == 1);
    CHECK(alignment_agreement({"-AC", "AC-", {}}, ref) == 0);
    CHECK(alignment_agreement({"AB-", "A-C", {}}, {"AB", "AC", {}}) == q(1, 2));
    CHECK(alignment_agreement({"A-", "-C", {}}, {"A-", "-C", {}}) == 1);
}
