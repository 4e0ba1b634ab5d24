#include "doctest.h"

#include "ptune/clustering.hpp"
#include "ptune/datasets.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>

using namespace ptune;

namespace {

Rational q(long p, long d = 1)
{
    return make_rational(p, d);
}

ClusteringInstance line_points(std::vector<Rational> xs)
{
    ClusteringInstance inst;
    for (auto& x : xs) {
        inst.points.push_back({x});
    }
    inst.metric_names = {"euclidean"};
    inst.metrics.push_back(manhattan_table(inst.points));
    return inst;
}

ClusteringInstance four_points()
{
    auto inst = line_points({q(0), q(1), q(3), q(28, 5)});
    inst.target = {{0, 1}, {2, 3}};
    inst.k = 2;
    return inst;
}

ClusteringInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t metrics)
{
    std::uniform_int_distribution<int> c(0, 40);
    ClusteringInstance inst;
    for (std::size_t i = 0; i < n; ++i) {
        inst.points.push_back({q(c(rng), 4), q(c(rng), 4)});
    }
    inst.metric_names = {"manhattan"};
    inst.metrics.push_back(manhattan_table(inst.points));
    if (metrics > 1) {
        inst.metric_names.push_back("euclidean");
        inst.metrics.push_back(euclidean_table(inst.points, 1000));
    }
    return inst;
}

Vec random_interior(std::mt19937_64& rng, std::size_t d)
{
    // uniform on a fine lattice of the open simplex
    std::uniform_int_distribution<long> u(1, 99991);
    while (true) {
        Vec x(d);
        Rational s;
        for (auto& v : x) {
            v = make_rational(u(rng), 100003);
            s += v;
        }
        if (s < 1) {
            return x;
        }
    }
}

const ExecutionTreeNode* leaf_at(const ExecutionTreeNode& root, const Vec& rho, int& hits)
{
    const ExecutionTreeNode* found = nullptr;
    hits = 0;
    for (const auto* leaf : collect_leaves(root)) {
        if (leaf->region.strictly_contains(rho)) {
            found = leaf;
            ++hits;
        }
    }
    return found;
}

// max of a over the cell, by LP
Rational max_over(const ConvexCell& c, const Vec& a)
{
    LPResult r = solve_lp(a, c.constraints);
    REQUIRE(r.status == LpStatus::optimal);
    return r.value;
}

bool contained(const ConvexCell& inner, const ConvexCell& outer)
{
    for (const auto& h : outer.constraints) {
        if (max_over(inner, h.normal) > h.offset) {
            return false;
        }
    }
    return true;
}

// Exhaustive closest-pruning search.
Rational brute_loss(const ClusterTree& t, const std::vector<std::vector<std::size_t>>& target, std::size_t k)
{
    std::function<std::vector<std::vector<std::size_t>>(std::size_t)> prunings = [&](std::size_t id) {
        std::vector<std::vector<std::size_t>> out{{id}};
        if (id >= t.n) {
            auto [l, r] = t.merges[id - t.n];
            for (const auto& a : prunings(l)) {
                for (const auto& b : prunings(r)) {
                    if (a.size() + b.size() <= k) {
                        auto u = a;
                        u.insert(u.end(), b.begin(), b.end());
                        out.push_back(u);
                    }
                }
            }
        }
        return out;
    };
    long best = -1;
    for (const auto& p : prunings(2 * t.n - 2)) {
        if (p.size() != k) {
            continue;
        }
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            long miss = 0;
            for (std::size_t i = 0; i < k; ++i) {
                auto mem = t.members(p[perm[i]]);
                for (auto x : target[i]) {
                    if (!std::binary_search(mem.begin(), mem.end(), x)) {
                        ++miss;
                    }
                }
            }
            if (best < 0 || miss < best) {
                best = miss;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return make_rational(best, static_cast<std::int64_t>(t.n));
}

ClusterTree random_tree(std::mt19937_64& rng, std::size_t n)
{
    ClusterTree t{n, {}};
    std::vector<std::size_t> live(n);
    std::iota(live.begin(), live.end(), 0);
    while (live.size() > 1) {
        std::shuffle(live.begin(), live.end(), rng);
        std::size_t a = live.back();
        live.pop_back();
        std::size_t b = live.back();
        live.pop_back();
        t.merges.emplace_back(std::min(a, b), std::max(a, b));
        live.push_back(n + t.merges.size() - 1);
    }
    return t;
}

// Leaf count for a two-component family by sweeping alpha, with boundaries
// found by solving every pairwise crossing and the merge at each piece
// evaluated from scratch.
std::size_t sweep_leaf_count(const ClusteringInstance& inst, const MergeFamily& fam,
                             std::vector<std::vector<std::size_t>> clusters, std::vector<std::size_t> ids,
                             std::size_t next_id, Rational lo, Rational hi)
{
    if (clusters.size() == 1) {
        return 1;
    }
    struct Line {
        Rational slope, icpt;
        ClusterPair tag;
        std::size_t i, j;
    };
    std::vector<Line> lines;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            Rational v0 = merge_value(inst, fam.linkage_of(0), fam.metric_of(0), clusters[i], clusters[j]);
            Rational v1 = merge_value(inst, fam.linkage_of(1), fam.metric_of(1), clusters[i], clusters[j]);
            lines.push_back({v0 - v1, v1, {std::min(ids[i], ids[j]), std::max(ids[i], ids[j])}, i, j});
        }
    }
    std::vector<Rational> cuts{lo, hi};
    for (std::size_t a = 0; a < lines.size(); ++a) {
        for (std::size_t b = a + 1; b < lines.size(); ++b) {
            if (lines[a].slope != lines[b].slope) {
                Rational x = (lines[b].icpt - lines[a].icpt) / (lines[a].slope - lines[b].slope);
                if (x > lo && x < hi) {
                    cuts.push_back(x);
                }
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    auto winner = [&](const Rational& x) {
        std::size_t best = 0;
        for (std::size_t a = 1; a < lines.size(); ++a) {
            Rational va = lines[a].icpt + lines[a].slope * x, vb = lines[best].icpt + lines[best].slope * x;
            if (va < vb || (va == vb && lines[a].tag < lines[best].tag)) {
                best = a;
            }
        }
        return best;
    };
    std::size_t total = 0;
    std::size_t k = 0;
    while (k + 1 < cuts.size()) {
        std::size_t w = winner((cuts[k] + cuts[k + 1]) / 2);
        std::size_t end = k + 1;
        while (end + 1 < cuts.size() && winner((cuts[end] + cuts[end + 1]) / 2) == w) {
            ++end;
        }
        auto cl = clusters;
        auto id = ids;
        std::vector<std::size_t> merged;
        std::merge(cl[lines[w].i].begin(), cl[lines[w].i].end(), cl[lines[w].j].begin(), cl[lines[w].j].end(),
                   std::back_inserter(merged));
        cl.erase(cl.begin() + static_cast<long>(lines[w].j));
        cl.erase(cl.begin() + static_cast<long>(lines[w].i));
        id.erase(id.begin() + static_cast<long>(lines[w].j));
        id.erase(id.begin() + static_cast<long>(lines[w].i));
        cl.push_back(merged);
        id.push_back(next_id);
        total += sweep_leaf_count(inst, fam, cl, id, next_id + 1, cuts[k], cuts[end]);
        k = end;
    }
    return total;
}

} // namespace

TEST_CASE("merge values on small clusters")
{
    auto inst = four_points();
    std::vector<std::size_t> a{0}, b{1}, ab{0, 1}, c{2};
    CHECK(merge_value(inst, Linkage::single, 0, a, b) == 1);
    for (auto l : {Linkage::single, Linkage::complete, Linkage::median, Linkage::average, Linkage::mediod}) {
        CHECK(merge_value(inst, l, 0, a, c) == 3);
    }
    CHECK(merge_value(inst, Linkage::complete, 0, ab, c) == 3);
    CHECK(merge_value(inst, Linkage::single, 0, ab, c) == 2);
    CHECK(merge_value(inst, Linkage::average, 0, ab, c) == q(5, 2));

    MergeFamily fam{{Linkage::single, Linkage::complete}};
    CHECK(interpolated_merge(inst, fam, {q(2, 5)}, ab, c) == q(13, 5));
    CHECK(interpolated_merge(inst, fam, {q(1)}, ab, c) == 2);
    CHECK(interpolated_merge(inst, fam, {q(0)}, ab, c) == 3);
    CHECK_THROWS_AS(interpolated_merge(inst, fam, {q(3, 2)}, ab, c), std::invalid_argument);
    CHECK_THROWS_AS(interpolated_merge(inst, fam, {q(-1, 2)}, ab, c), std::invalid_argument);
}

TEST_CASE("median follows the lower-median rule")
{
    // distances from point 0 to points 1..4 are 1, 2, 3, 4
    auto inst = line_points({q(0), q(1), q(2), q(3), q(4)});
    std::vector<std::size_t> a{0}, three{1, 2, 3}, four{1, 2, 3, 4};
    CHECK(merge_value(inst, Linkage::median, 0, a, three) == 2);
    CHECK(merge_value(inst, Linkage::median, 0, a, four) == 2);
}

TEST_CASE("mediod picks the lowest index on ties")
{
    auto inst = line_points({q(0), q(2), q(10)});
    std::vector<std::size_t> pair{0, 1}, far{2};
    // both members of {0, 2} have the same summed distance; point 0 is used
    CHECK(merge_value(inst, Linkage::mediod, 0, pair, far) == 10);
}

TEST_CASE("execution tree for the four-point line")
{
    auto inst = four_points();
    MergeFamily fam{{Linkage::single, Linkage::complete}};
    auto root = build_execution_tree(inst, fam, simplex_cell(1));
    auto leaves = collect_leaves(root);
    REQUIRE(leaves.size() == 2);

    // leaves in label order: merge (2,4) then (3,5) on alpha > 2/5; (2,3) first otherwise
    const ExecutionTreeNode* high = nullptr;
    const ExecutionTreeNode* low = nullptr;
    for (const auto* l : leaves) {
        (l->region.strictly_contains({q(1, 2)}) ? high : low) = l;
    }
    REQUIRE(high);
    REQUIRE(low);
    CHECK(low->region.strictly_contains({q(1, 5)}));
    CHECK(high->merges == std::vector<ClusterPair>{{0, 1}, {2, 4}, {3, 5}});
    CHECK(low->merges == std::vector<ClusterPair>{{0, 1}, {2, 3}, {4, 5}});
    CHECK(max_over(low->region, {q(1)}) == q(2, 5));
    CHECK(max_over(high->region, {q(-1)}) == q(-2, 5));

    CHECK(hamming_loss(ClusterTree{4, low->merges}, inst.target, 2) == 0);
    CHECK(hamming_loss(ClusterTree{4, high->merges}, inst.target, 2) == q(1, 4));

    auto best = best_parameter(inst, fam, simplex_cell(1));
    CHECK(best.loss == 0);
    REQUIRE(best.rho.size() == 1);
    CHECK(best.rho[0] < q(2, 5));
}

TEST_CASE("trivial execution trees")
{
    auto two = line_points({q(0), q(1)});
    auto root = build_execution_tree(two, MergeFamily{{Linkage::single, Linkage::complete}}, simplex_cell(1));
    auto leaves = collect_leaves(root);
    REQUIRE(leaves.size() == 1);
    CHECK(leaves[0]->merges == std::vector<ClusterPair>{{0, 1}});

    // one linkage and one metric: the parameter space is a point
    auto inst = four_points();
    auto path = build_execution_tree(inst, MergeFamily{{Linkage::single}}, simplex_cell(0));
    CHECK(collect_leaves(path).size() == 1);

    // the same linkage twice: every merge value is constant in rho
    auto dup = build_execution_tree(inst, MergeFamily{{Linkage::single, Linkage::single}}, simplex_cell(1));
    CHECK(collect_leaves(dup).size() == 1);
}

TEST_CASE("hamming loss")
{
    ClusterTree two{2, {{0, 1}}};
    CHECK(hamming_loss(two, {{0}, {1}}, 2) == 0);
    CHECK(hamming_loss(two, {{1}, {0}}, 2) == 0);
    CHECK(hamming_loss(two, {{0, 1}}, 1) == 0);
    CHECK_THROWS_AS(hamming_loss(two, {{0}, {1}, {}}, 3), std::invalid_argument);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 3 + trial % 7;
        std::size_t k = 1 + trial % 3;
        if (k > n) {
            continue;
        }
        ClusterTree t = random_tree(rng, n);
        std::vector<std::vector<std::size_t>> target(k);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < n; ++i) {
            target[i < k ? i : rng() % k].push_back(order[i]);
        }
        Rational loss = hamming_loss(t, target, k);
        CHECK(loss == brute_loss(t, target, k));
        CHECK(loss >= 0);
        CHECK(loss <= 1);
    }
}

TEST_CASE("datasets")
{
    auto rings = generate_dataset("Rings", 3);
    CHECK(rings.size() == 100);
    REQUIRE(rings.target.size() == 2);
    CHECK(rings.target[0].size() == 50);
    CHECK(rings.target[1].size() == 50);
    rings.validate();

    auto outliers = generate_dataset("Outliers", 3);
    CHECK(outliers.size() == 152);
    CHECK(outliers.k == 3);
    outliers.validate();

    auto again = generate_dataset("Rings", 3);
    CHECK(again.points == rings.points);
    CHECK(generate_dataset("Rings", 4).points != rings.points);
    CHECK(generate_dataset("BalancedOutliers", 1).size() == 102);
    CHECK(generate_dataset("Disks", 1).size() == 100);
    CHECK_THROWS_AS(generate_dataset("Spirals", 1), std::invalid_argument);

    for (const auto& p : rings.points) {
        for (const auto& c : p) {
            CHECK(Rational(c * 1000000).get_den() == 1);
        }
    }
}

TEST_CASE("execution-tree leaves match direct simulation")
{
    std::mt19937_64 rng(31);
    const std::vector<MergeFamily> families{
        {{Linkage::single, Linkage::complete, Linkage::median}},
        {{Linkage::single, Linkage::average}},
        {{Linkage::complete, Linkage::mediod}},
        {{Linkage::single}, {0, 1}},
        {{Linkage::single, Linkage::median}, {0, 1}},
    };
    for (int trial = 0; trial < 25; ++trial) {
        const auto& fam = families[trial % families.size()];
        auto inst = random_instance(rng, 5 + trial % 4, 2);
        auto root = build_execution_tree(inst, fam, simplex_cell(fam.dimension()));
        auto leaves = collect_leaves(root);
        int located = 0;
        for (int s = 0; s < 60; ++s) {
            Vec rho = random_interior(rng, fam.dimension());
            int hits = 0;
            const auto* leaf = leaf_at(root, rho, hits);
            CHECK(hits <= 1);
            if (!leaf) {
                continue;
            }
            ++located;
            CHECK(leaf->merges == simulate_linkage(inst, fam, rho).merges);
        }
        CHECK(located >= 55);

        // each level refines the one above
        std::function<void(const ExecutionTreeNode&)> walk = [&](const ExecutionTreeNode& node) {
            for (const auto& child : node.children) {
                CHECK(contained(child.region, node.region));
                walk(child);
            }
        };
        walk(root);

        // common rescaling of all metrics changes nothing
        auto scaled = inst;
        for (auto& m : scaled.metrics) {
            m = m.scaled(q(7, 3));
        }
        auto root2 = build_execution_tree(scaled, fam, simplex_cell(fam.dimension()));
        auto leaves2 = collect_leaves(root2);
        REQUIRE(leaves2.size() == leaves.size());
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            CHECK(leaves[i]->merges == leaves2[i]->merges);
            CHECK(contained(leaves[i]->region, leaves2[i]->region));
            CHECK(contained(leaves2[i]->region, leaves[i]->region));
        }
    }
}

TEST_CASE("d=1 leaf count matches the sweep oracle")
{
    std::mt19937_64 rng(77);
    const std::vector<MergeFamily> families{
        {{Linkage::single, Linkage::complete}},
        {{Linkage::median, Linkage::complete}},
        {{Linkage::average, Linkage::single}},
        {{Linkage::single}, {0, 1}},
    };
    for (int trial = 0; trial < 24; ++trial) {
        const auto& fam = families[trial % families.size()];
        auto inst = random_instance(rng, 5 + trial % 4, 2);
        auto root = build_execution_tree(inst, fam, simplex_cell(1));
        std::vector<std::vector<std::size_t>> clusters;
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            clusters.push_back({i});
            ids.push_back(i);
        }
        CHECK(collect_leaves(root).size() ==
              sweep_leaf_count(inst, fam, clusters, ids, inst.size(), q(0), q(1)));
    }
}
