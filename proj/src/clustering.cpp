#include "ptune/clustering.hpp"

#include "ptune/region_enum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace ptune {

Linkage parse_linkage(std::string_view name)
{
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "median") return Linkage::median;
    if (name == "average") return Linkage::average;
    if (name == "mediod" || name == "medoid") return Linkage::mediod;
    throw std::invalid_argument("unknown linkage: " + std::string(name));
}

std::string to_string(Linkage linkage)
{
    switch (linkage) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::median: return "median";
    case Linkage::average: return "average";
    case Linkage::mediod: return "mediod";
    }
    return "?";
}

DistanceTable::DistanceTable(const std::vector<std::vector<Rational>>& matrix) : n_(matrix.size())
{
    for (std::size_t i = 0; i < n_; ++i) {
        if (matrix[i].size() != n_) {
            throw std::invalid_argument("distance table must be square");
        }
        if (sgn(matrix[i][i]) != 0) {
            throw std::invalid_argument("distance table must have a zero diagonal");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (matrix[i][j] != matrix[j][i]) {
                throw std::invalid_argument("distance table must be symmetric");
            }
            if (sgn(matrix[i][j]) < 0) {
                throw std::invalid_argument("distances must be nonnegative");
            }
        }
    }
    for (const auto& row : matrix) {
        values_.insert(values_.end(), row.begin(), row.end());
    }
    std::sort(values_.begin(), values_.end());
    values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
    ranks_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            auto it = std::lower_bound(values_.begin(), values_.end(), matrix[i][j]);
            ranks_[i * n_ + j] = static_cast<std::int32_t>(it - values_.begin());
        }
    }
}

DistanceTable DistanceTable::scaled(const Rational& factor) const
{
    if (sgn(factor) <= 0) {
        throw std::invalid_argument("scale factor must be positive");
    }
    DistanceTable out = *this;
    for (auto& v : out.values_) {
        v *= factor;
    }
    return out;
}

DistanceTable euclidean_table(const std::vector<Vec>& points, std::int64_t denominator)
{
    const std::size_t n = points.size();
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Vec diff = sub(points[i], points[j]);
            Rational sq = dot(diff, diff);
            m[i][j] = m[j][i] = snap(std::sqrt(to_double(sq)), denominator);
        }
    }
    return DistanceTable(m);
}

DistanceTable manhattan_table(const std::vector<Vec>& points)
{
    const std::size_t n = points.size();
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Rational s;
            for (std::size_t c = 0; c < points[i].size(); ++c) {
                s += abs(points[i][c] - points[j][c]);
            }
            m[i][j] = m[j][i] = s;
        }
    }
    return DistanceTable(m);
}

void ClusteringInstance::validate() const
{
    if (metrics.empty()) {
        throw std::invalid_argument("instance needs at least one metric");
    }
    const std::size_t n = size();
    for (const auto& t : metrics) {
        if (t.size() != n) {
            throw std::invalid_argument("metric tables disagree on the point count");
        }
    }
    if (!points.empty() && points.size() != n) {
        throw std::invalid_argument("point list and metric tables disagree");
    }
    if (!metric_names.empty() && metric_names.size() != metrics.size()) {
        throw std::invalid_argument("metric names and tables disagree");
    }
    if (target.empty()) {
        return;
    }
    std::vector<bool> seen(n, false);
    std::size_t total = 0;
    for (const auto& c : target) {
        if (c.empty()) {
            throw std::invalid_argument("target clusters must be nonempty");
        }
        for (auto p : c) {
            if (p >= n || seen[p]) {
                throw std::invalid_argument("target is not a partition of the points");
            }
            seen[p] = true;
            ++total;
        }
    }
    if (total != n) {
        throw std::invalid_argument("target is not a partition of the points");
    }
    if (k != target.size()) {
        throw std::invalid_argument("k must equal the number of target clusters");
    }
}

std::vector<std::size_t> ClusterTree::members(std::size_t id) const
{
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{id};
    while (!stack.empty()) {
        std::size_t c = stack.back();
        stack.pop_back();
        if (c < n) {
            out.push_back(c);
        } else {
            stack.push_back(merges.at(c - n).first);
            stack.push_back(merges.at(c - n).second);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

std::size_t medoid(const DistanceTable& t, std::span<const std::size_t> cluster)
{
    std::size_t best = cluster.front();
    Rational best_sum;
    bool first = true;
    for (auto x : cluster) {
        Rational s;
        for (auto y : cluster) {
            s += t.at(x, y);
        }
        if (first || s < best_sum || (s == best_sum && x < best)) {
            best = x;
            best_sum = s;
            first = false;
        }
    }
    return best;
}

} // namespace

Rational merge_value(const ClusteringInstance& instance, Linkage linkage, std::size_t metric,
                     std::span<const std::size_t> a, std::span<const std::size_t> b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("merge_value needs nonempty clusters");
    }
    const DistanceTable& t = instance.metrics.at(metric);
    if (linkage == Linkage::mediod) {
        return t.at(medoid(t, a), medoid(t, b));
    }
    std::vector<Rational> d;
    d.reserve(a.size() * b.size());
    for (auto x : a) {
        for (auto y : b) {
            d.push_back(t.at(x, y));
        }
    }
    switch (linkage) {
    case Linkage::single: return *std::min_element(d.begin(), d.end());
    case Linkage::complete: return *std::max_element(d.begin(), d.end());
    case Linkage::median:
        std::sort(d.begin(), d.end());
        return d[(d.size() - 1) / 2];
    case Linkage::average: {
        Rational s;
        for (const auto& v : d) {
            s += v;
        }
        return s / static_cast<long>(d.size());
    }
    case Linkage::mediod: break;
    }
    return {};
}

Vec mixture_weights(const MergeFamily& family, const Vec& rho)
{
    if (family.components() == 0) {
        throw std::invalid_argument("family has no components");
    }
    if (rho.size() != family.dimension()) {
        throw std::invalid_argument("parameter has the wrong dimension");
    }
    Vec alpha = rho;
    Rational rest = 1;
    for (const auto& r : rho) {
        if (sgn(r) < 0) {
            throw std::invalid_argument("parameter lies outside the simplex");
        }
        rest -= r;
    }
    if (sgn(rest) < 0) {
        throw std::invalid_argument("parameter lies outside the simplex");
    }
    alpha.push_back(rest);
    return alpha;
}

Rational interpolated_merge(const ClusteringInstance& instance, const MergeFamily& family, const Vec& rho,
                            std::span<const std::size_t> a, std::span<const std::size_t> b)
{
    Vec alpha = mixture_weights(family, rho);
    Rational out;
    for (std::size_t c = 0; c < alpha.size(); ++c) {
        if (sgn(alpha[c]) != 0) {
            out += alpha[c] * merge_value(instance, family.linkage_of(c), family.metric_of(c), a, b);
        }
    }
    return out;
}

namespace {

// Merge values of one (linkage, metric) component for all live cluster
// pairs, updated in place as clusters merge.
class Component {
public:
    Component(const DistanceTable& table, Linkage linkage, std::size_t n)
        : table_(&table), linkage_(linkage), cap_(n == 0 ? 0 : 2 * n - 1), size_(cap_, 1)
    {
        switch (linkage_) {
        case Linkage::single:
        case Linkage::complete:
            rank_.assign(cap_ * cap_, 0);
            break;
        case Linkage::median:
            lists_.resize(cap_ * cap_);
            break;
        case Linkage::average:
            sums_.resize(cap_ * cap_);
            break;
        case Linkage::mediod:
            medoid_.resize(cap_);
            for (std::size_t i = 0; i < n; ++i) {
                medoid_[i] = i;
            }
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                std::size_t k = idx(i, j);
                if (!rank_.empty()) {
                    rank_[k] = table.rank(i, j);
                } else if (!lists_.empty()) {
                    lists_[k] = {table.rank(i, j)};
                } else if (!sums_.empty()) {
                    sums_[k] = table.at(i, j);
                }
            }
        }
    }

    bool rank_based() const { return linkage_ != Linkage::average; }

    std::int32_t rank(std::size_t a, std::size_t b) const
    {
        switch (linkage_) {
        case Linkage::single:
        case Linkage::complete:
            return rank_[idx(a, b)];
        case Linkage::median: {
            const auto& l = lists_[idx(a, b)];
            return l[(l.size() - 1) / 2];
        }
        case Linkage::mediod:
            return table_->rank(medoid_[a], medoid_[b]);
        case Linkage::average:
            break;
        }
        throw std::logic_error("average linkage has no rank");
    }

    Rational value(std::size_t a, std::size_t b) const
    {
        if (linkage_ == Linkage::average) {
            return sums_[idx(a, b)] / (static_cast<long>(size_[a]) * static_cast<long>(size_[b]));
        }
        return table_->value_of_rank(rank(a, b));
    }

    void merge(std::size_t a, std::size_t b, std::size_t id, std::span<const std::size_t> others,
               std::span<const std::size_t> new_members)
    {
        size_[id] = size_[a] + size_[b];
        if (linkage_ == Linkage::mediod) {
            medoid_[id] = medoid(*table_, new_members);
            return;
        }
        for (auto c : others) {
            std::size_t ac = idx(a, c), bc = idx(b, c), nc = idx(id, c);
            switch (linkage_) {
            case Linkage::single:
                rank_[nc] = std::min(rank_[ac], rank_[bc]);
                break;
            case Linkage::complete:
                rank_[nc] = std::max(rank_[ac], rank_[bc]);
                break;
            case Linkage::median: {
                auto& out = lists_[nc];
                out.resize(lists_[ac].size() + lists_[bc].size());
                std::merge(lists_[ac].begin(), lists_[ac].end(), lists_[bc].begin(), lists_[bc].end(),
                           out.begin());
                std::vector<std::int32_t>().swap(lists_[ac]);
                std::vector<std::int32_t>().swap(lists_[bc]);
                break;
            }
            case Linkage::average:
                sums_[nc] = sums_[ac] + sums_[bc];
                break;
            case Linkage::mediod:
                break;
            }
        }
    }

private:
    std::size_t idx(std::size_t a, std::size_t b) const { return a < b ? a * cap_ + b : b * cap_ + a; }

    const DistanceTable* table_;
    Linkage linkage_;
    std::size_t cap_;
    std::vector<std::size_t> size_;
    std::vector<std::int32_t> rank_;
    std::vector<std::vector<std::int32_t>> lists_;
    std::vector<Rational> sums_;
    std::vector<std::size_t> medoid_;
};

struct ClusterState {
    std::size_t n = 0;
    std::vector<std::size_t> live; // ascending
    std::vector<std::vector<std::size_t>> members;
    std::vector<Component> components;
    std::vector<ClusterPair> merges;

    ClusterState(const ClusteringInstance& instance, const MergeFamily& family) : n(instance.size())
    {
        if (family.components() == 0) {
            throw std::invalid_argument("family has no components");
        }
        live.resize(n);
        members.resize(n == 0 ? 0 : 2 * n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            live[i] = i;
            members[i] = {i};
        }
        for (std::size_t c = 0; c < family.components(); ++c) {
            components.emplace_back(instance.metrics.at(family.metric_of(c)), family.linkage_of(c), n);
        }
    }

    void merge(std::size_t a, std::size_t b)
    {
        std::size_t id = n + merges.size();
        auto& m = members[id];
        std::merge(members[a].begin(), members[a].end(), members[b].begin(), members[b].end(),
                   std::back_inserter(m));
        std::vector<std::size_t> others;
        others.reserve(live.size());
        for (auto c : live) {
            if (c != a && c != b) {
                others.push_back(c);
            }
        }
        for (auto& comp : components) {
            comp.merge(a, b, id, others, m);
        }
        others.push_back(id);
        live = std::move(others);
        merges.emplace_back(a, b);
    }

    // intercept = last component's value, slope_c = v_c - v_last
    void affine(std::size_t a, std::size_t b, Vec& slope, Rational& intercept) const
    {
        intercept = components.back().value(a, b);
        slope.resize(components.size() - 1);
        for (std::size_t c = 0; c + 1 < components.size(); ++c) {
            slope[c] = components[c].value(a, b) - intercept;
        }
    }
};

// One merge step of the execution tree as a region-enumeration problem.
class MergeStepProblem : public CellProblem {
public:
    explicit MergeStepProblem(const ClusterState& state)
    {
        const auto& live = state.live;
        for (std::size_t i = 0; i < live.size(); ++i) {
            for (std::size_t j = i + 1; j < live.size(); ++j) {
                pairs_.emplace_back(live[i], live[j]);
                slopes_.emplace_back();
                intercepts_.emplace_back();
                state.affine(live[i], live[j], slopes_.back(), intercepts_.back());
            }
        }
    }

    std::size_t argmin(const Vec& rho) const
    {
        std::size_t best = 0;
        Rational best_value;
        for (std::size_t p = 0; p < pairs_.size(); ++p) {
            Rational v = intercepts_[p] + dot(slopes_[p], rho);
            if (p == 0 || v < best_value) {
                best = p;
                best_value = std::move(v);
            }
        }
        return best;
    }

    Tag seed_label(const Vec& rho) const override { return tag(argmin(rho)); }

    CandidateSet candidate_constraints(const Tag& label) const override
    {
        ClusterPair key{static_cast<std::size_t>(label.parts.at(0)), static_cast<std::size_t>(label.parts.at(1))};
        auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key);
        if (it == pairs_.end() || *it != key) {
            throw std::invalid_argument("unknown cluster pair " + label.to_string());
        }
        std::size_t l = static_cast<std::size_t>(it - pairs_.begin());
        CandidateSet out;
        out.constraints.reserve(pairs_.size());
        for (std::size_t o = 0; o < pairs_.size(); ++o) {
            if (o != l) {
                out.add_comparison(sub(slopes_[l], slopes_[o]), intercepts_[o] - intercepts_[l], tag(o), l < o);
                if (out.empty) {
                    break;
                }
            }
        }
        return out;
    }

private:
    Tag tag(std::size_t p) const
    {
        return Tag{static_cast<std::int64_t>(pairs_[p].first), static_cast<std::int64_t>(pairs_[p].second)};
    }

    std::vector<ClusterPair> pairs_;
    std::vector<Vec> slopes_;
    std::vector<Rational> intercepts_;
};

ClusterPair pick_at(const ClusterState& state, const Vec& alpha)
{
    const auto& live = state.live;
    ClusterPair best{live[0], live[1]};
    if (state.components.size() == 1 && state.components[0].rank_based()) {
        const Component& comp = state.components[0];
        std::int32_t best_rank = std::numeric_limits<std::int32_t>::max();
        for (std::size_t i = 0; i < live.size(); ++i) {
            for (std::size_t j = i + 1; j < live.size(); ++j) {
                std::int32_t r = comp.rank(live[i], live[j]);
                if (r < best_rank) {
                    best_rank = r;
                    best = {live[i], live[j]};
                }
            }
        }
        return best;
    }
    Rational best_value;
    bool first = true;
    for (std::size_t i = 0; i < live.size(); ++i) {
        for (std::size_t j = i + 1; j < live.size(); ++j) {
            Rational v;
            for (std::size_t c = 0; c < alpha.size(); ++c) {
                if (sgn(alpha[c]) != 0) {
                    v += alpha[c] * state.components[c].value(live[i], live[j]);
                }
            }
            if (first || v < best_value) {
                best_value = std::move(v);
                best = {live[i], live[j]};
                first = false;
            }
        }
    }
    return best;
}

ExecutionTreeNode grow(const ClusterState& state, ConvexCell region)
{
    ExecutionTreeNode node;
    node.merges = state.merges;
    if (state.live.size() <= 1) {
        node.region = std::move(region);
        return node;
    }
    MergeStepProblem problem(state);
    if (region.dimension == 0) {
        ClusterState child = state;
        Tag t = problem.seed_label({});
        child.merge(static_cast<std::size_t>(t.parts[0]), static_cast<std::size_t>(t.parts[1]));
        node.children.push_back(grow(child, region));
        node.region = std::move(region);
        return node;
    }
    Vec start = region.witness ? *region.witness : [&] {
        auto z = find_interior_point(region.constraints);
        if (!z) {
            throw std::invalid_argument("execution tree region has empty interior");
        }
        return *z;
    }();
    Subdivision sub = compute_subdivision(region, problem, start);
    for (auto& [label, cell] : sub.cells) {
        ClusterState child = state;
        child.merge(static_cast<std::size_t>(label.parts[0]), static_cast<std::size_t>(label.parts[1]));
        node.children.push_back(grow(child, std::move(cell)));
    }
    node.region = std::move(region);
    return node;
}

} // namespace

ClusterTree simulate_linkage(const ClusteringInstance& instance, const MergeFamily& family, const Vec& rho)
{
    Vec alpha = mixture_weights(family, rho);
    ClusterState state(instance, family);
    while (state.live.size() > 1) {
        auto [a, b] = pick_at(state, alpha);
        state.merge(a, b);
    }
    return ClusterTree{state.n, std::move(state.merges)};
}

ConvexCell simplex_cell(std::size_t dimension)
{
    ConvexCell cell;
    cell.dimension = dimension;
    for (std::size_t i = 0; i < dimension; ++i) {
        Vec e = zeros(dimension);
        e[i] = -1;
        cell.constraints.push_back(make_halfspace(e, 0, Tag::parent_facet(i)));
    }
    if (dimension > 0) {
        cell.constraints.push_back(make_halfspace(Vec(dimension, Rational(1)), 1, Tag::parent_facet(dimension)));
    }
    cell.witness = Vec(dimension, make_rational(1, static_cast<std::int64_t>(dimension + 1)));
    return cell;
}

ExecutionTreeNode build_execution_tree(const ClusteringInstance& instance, const MergeFamily& family,
                                       const ConvexCell& parent)
{
    instance.validate();
    if (parent.dimension != family.dimension()) {
        throw std::invalid_argument("parent cell dimension does not match the family");
    }
    ConvexCell region = parent;
    if (region.dimension > 0) {
        if (!region.witness || !region.strictly_contains(*region.witness)) {
            region.witness = find_interior_point(region.constraints);
        }
        if (!region.witness) {
            throw std::invalid_argument("parent cell has empty interior");
        }
    }
    return grow(ClusterState(instance, family), std::move(region));
}

std::vector<const ExecutionTreeNode*> collect_leaves(const ExecutionTreeNode& root)
{
    std::vector<const ExecutionTreeNode*> out;
    std::vector<const ExecutionTreeNode*> stack{&root};
    while (!stack.empty()) {
        const ExecutionTreeNode* n = stack.back();
        stack.pop_back();
        if (n->is_leaf()) {
            out.push_back(n);
            continue;
        }
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) {
            stack.push_back(&*it);
        }
    }
    return out;
}

Rational hamming_loss(const ClusterTree& tree, const std::vector<std::vector<std::size_t>>& target, std::size_t k)
{
    const std::size_t n = tree.n;
    if (k == 0 || k > n) {
        throw std::invalid_argument("k must be between 1 and the number of points");
    }
    if (target.size() != k) {
        throw std::invalid_argument("target must have exactly k clusters");
    }
    if (tree.merges.size() + 1 != n) {
        throw std::invalid_argument("cluster tree is incomplete");
    }
    if (k > 16) {
        throw std::invalid_argument("k too large for exact pruning search");
    }
    std::vector<std::size_t> owner(n, k);
    for (std::size_t c = 0; c < k; ++c) {
        for (auto p : target[c]) {
            owner.at(p) = c;
        }
    }

    // best[id][S]: largest total overlap when the subtree at id is cut into
    // |S| parts matched one-to-one with the target clusters in S.
    constexpr long none = std::numeric_limits<long>::min() / 4;
    const std::size_t full = (std::size_t{1} << k) - 1;
    const std::size_t ids = 2 * n - 1;
    std::vector<std::vector<long>> best(ids, std::vector<long>(full + 1, none));
    std::vector<std::vector<long>> count(ids, std::vector<long>(k, 0));

    for (std::size_t id = 0; id < ids; ++id) {
        if (id < n) {
            if (owner[id] < k) {
                count[id][owner[id]] = 1;
            }
        } else {
            auto [l, r] = tree.merges[id - n];
            if (l >= id || r >= id) {
                throw std::invalid_argument("cluster tree references a later cluster");
            }
            for (std::size_t c = 0; c < k; ++c) {
                count[id][c] = count[l][c] + count[r][c];
            }
            for (std::size_t s = 1; s <= full; ++s) {
                if ((s & (s - 1)) == 0) {
                    continue;
                }
                long v = none;
                for (std::size_t s1 = (s - 1) & s; s1 > 0; s1 = (s1 - 1) & s) {
                    long a = best[l][s1], b = best[r][s & ~s1];
                    if (a > none && b > none) {
                        v = std::max(v, a + b);
                    }
                }
                best[id][s] = v;
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            best[id][std::size_t{1} << c] = count[id][c];
        }
    }
    long overlap = best[ids - 1][full];
    if (overlap <= none) {
        throw std::logic_error("no k-pruning found");
    }
    return make_rational(static_cast<std::int64_t>(n) - overlap, static_cast<std::int64_t>(n));
}

BestParameter best_parameter(const ClusteringInstance& instance, const MergeFamily& family,
                             const ConvexCell& parent)
{
    if (instance.target.empty()) {
        throw std::invalid_argument("best_parameter needs a target clustering");
    }
    ExecutionTreeNode root = build_execution_tree(instance, family, parent);
    const ExecutionTreeNode* pick = nullptr;
    Rational pick_loss;
    for (const auto* leaf : collect_leaves(root)) {
        Rational loss = hamming_loss(ClusterTree{instance.size(), leaf->merges}, instance.target, instance.k);
        if (!pick || loss < pick_loss || (loss == pick_loss && leaf->merges < pick->merges)) {
            pick = leaf;
            pick_loss = loss;
        }
    }
    BestParameter out;
    out.rho = pick->region.witness ? *pick->region.witness : Vec{};
    out.loss = pick_loss;
    out.region = pick->region;
    out.merges = pick->merges;
    return out;
}

} // namespace ptune
