#include "ptune/tariff.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ptune {

Rational TariffInstance::value(std::size_t i, std::size_t q) const
{
    if (q == 0) {
        return 0;
    }
    return valuations.at(i).at(q - 1);
}

Rational TariffInstance::cap() const
{
    if (price_cap) {
        return *price_cap;
    }
    Rational top = 0;
    for (const auto& v : valuations) {
        for (const auto& x : v) {
            top = std::max(top, x);
        }
    }
    return top + 1;
}

void TariffInstance::validate() const
{
    if (K == 0) {
        throw std::invalid_argument("tariff instance needs K >= 1");
    }
    if (menu_length == 0) {
        throw std::invalid_argument("menu length must be at least 1");
    }
    if (valuations.empty()) {
        throw std::invalid_argument("tariff instance has no valuation samples");
    }
    for (const auto& v : valuations) {
        if (v.size() != K) {
            throw std::invalid_argument("each valuation needs exactly K entries");
        }
        for (const auto& x : v) {
            if (sgn(x) < 0) {
                throw std::invalid_argument("valuations must be nonnegative");
            }
        }
    }
    if (price_cap && sgn(*price_cap) <= 0) {
        throw std::invalid_argument("price cap must be positive");
    }
}

namespace {

std::size_t p1(std::size_t j) { return 2 * (j - 1); }
std::size_t p2(std::size_t j) { return 2 * (j - 1) + 1; }

Rational utility(const TariffInstance& inst, std::size_t i, const Purchase& b, const Vec& prices)
{
    if (b.quantity == 0) {
        return 0;
    }
    return inst.value(i, b.quantity) - prices[p1(b.tariff)] - make_rational(static_cast<std::int64_t>(b.quantity)) * prices[p2(b.tariff)];
}

// Options in tie-break order: larger quantity first, then smaller tariff.
std::vector<Purchase> options(const TariffInstance& inst)
{
    std::vector<Purchase> out;
    for (std::size_t q = inst.K; q >= 1; --q) {
        for (std::size_t j = 1; j <= inst.menu_length; ++j) {
            out.push_back({q, j});
        }
    }
    out.push_back({0, 1});
    return out;
}

void check_prices(const TariffInstance& inst, const Vec& prices)
{
    if (prices.size() != inst.dimension()) {
        throw std::invalid_argument("price vector has the wrong dimension");
    }
}

// p1^j + q p2^j as a linear form; zero for q = 0.
Vec payment(const TariffInstance& inst, const Purchase& b)
{
    Vec f = zeros(inst.dimension());
    if (b.quantity > 0) {
        f[p1(b.tariff)] = 1;
        f[p2(b.tariff)] = make_rational(static_cast<std::int64_t>(b.quantity));
    }
    return f;
}

class PriceProblem : public CellProblem {
public:
    explicit PriceProblem(const TariffInstance& inst) : inst_(inst), options_(options(inst)) {}

    Tag seed_label(const Vec& prices) const override { return profile_label(purchase_profile(inst_, prices)); }

    CandidateSet candidate_constraints(const Tag& label) const override
    {
        PurchaseProfile profile = label_profile(label);
        if (profile.size() != inst_.samples()) {
            throw std::invalid_argument("purchase label has the wrong number of samples");
        }
        CandidateSet out;
        for (std::size_t i = 0; i < profile.size() && !out.empty; ++i) {
            const Purchase& mine = profile[i];
            Vec pay = payment(inst_, mine);
            Rational v = inst_.value(i, mine.quantity);
            for (const auto& alt : options_) {
                if (alt == mine) {
                    continue;
                }
                // u(mine) >= u(alt)
                PurchaseProfile other = profile;
                other[i] = alt;
                bool wins = mine.quantity > alt.quantity ||
                            (mine.quantity == alt.quantity && mine.tariff < alt.tariff);
                out.add_comparison(sub(pay, payment(inst_, alt)), v - inst_.value(i, alt.quantity),
                                   profile_label(other), wins);
                if (out.empty) {
                    break;
                }
            }
        }
        return out;
    }

    std::optional<Tag> label_across(const Vec& point, const Vec& direction) const override
    {
        PurchaseProfile profile(inst_.samples());
        for (std::size_t i = 0; i < inst_.samples(); ++i) {
            std::optional<std::pair<Rational, Rational>> best;
            for (const auto& b : options_) {
                std::pair<Rational, Rational> key{utility(inst_, i, b, point), -dot(payment(inst_, b), direction)};
                if (!best || key > *best) {
                    best = std::move(key);
                    profile[i] = b;
                }
            }
        }
        return profile_label(profile);
    }

private:
    const TariffInstance& inst_;
    std::vector<Purchase> options_;
};

} // namespace

Purchase buyer_choice(const TariffInstance& inst, std::size_t sample, const Vec& prices)
{
    check_prices(inst, prices);
    if (sample >= inst.samples()) {
        throw std::out_of_range("sample index out of range");
    }
    Purchase best{0, 1};
    std::optional<Rational> best_u;
    for (const auto& b : options(inst)) {
        Rational u = utility(inst, sample, b, prices);
        if (!best_u || u > *best_u) {
            best_u = std::move(u);
            best = b;
        }
    }
    return best;
}

PurchaseProfile purchase_profile(const TariffInstance& inst, const Vec& prices)
{
    PurchaseProfile out;
    for (std::size_t i = 0; i < inst.samples(); ++i) {
        out.push_back(buyer_choice(inst, i, prices));
    }
    return out;
}

Tag profile_label(const PurchaseProfile& profile)
{
    std::vector<std::int64_t> parts;
    for (const auto& b : profile) {
        parts.push_back(static_cast<std::int64_t>(b.quantity));
    }
    for (const auto& b : profile) {
        parts.push_back(b.quantity == 0 ? 1 : static_cast<std::int64_t>(b.tariff));
    }
    return Tag(std::move(parts));
}

PurchaseProfile label_profile(const Tag& label)
{
    if (label.parts.size() % 2 != 0) {
        throw std::invalid_argument("purchase label must have an even number of parts");
    }
    const std::size_t n = label.parts.size() / 2;
    PurchaseProfile out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (label.parts[i] < 0 || label.parts[n + i] < 1) {
            throw std::invalid_argument("malformed purchase label");
        }
        out[i].quantity = static_cast<std::size_t>(label.parts[i]);
        out[i].tariff = out[i].quantity == 0 ? 1 : static_cast<std::size_t>(label.parts[n + i]);
    }
    return out;
}

Vec revenue_form(const TariffInstance& inst, const PurchaseProfile& profile)
{
    Vec f = zeros(inst.dimension());
    for (const auto& b : profile) {
        f = add(f, payment(inst, b));
    }
    return f;
}

Rational revenue_at(const TariffInstance& inst, const Vec& prices)
{
    return dot(revenue_form(inst, purchase_profile(inst, prices)), prices);
}

ConvexCell price_domain(const TariffInstance& inst)
{
    Rational cap = inst.cap();
    ConvexCell c = make_box(inst.dimension(), 0, cap);
    c.witness = Vec(inst.dimension(), cap / 2);
    return c;
}

Subdivision compute_price_regions(const TariffInstance& inst, std::uint64_t seed)
{
    inst.validate();
    ConvexCell parent = price_domain(inst);
    // every buyer takes its favourite bundle near zero prices
    Vec start(inst.dimension(), inst.cap() / 1024);
    PriceProblem problem(inst);
    return compute_subdivision(parent, problem, start, seed);
}

RevenueOptimum maximize_revenue(const TariffInstance& inst, const Subdivision& regions, std::uint64_t seed)
{
    std::optional<RevenueOptimum> best;
    for (const auto& [label, cell] : regions.cells) {
        Vec form = revenue_form(inst, label_profile(label));
        LPResult r = solve_lp(form, cell.constraints, Sense::maximize, seed);
        if (r.status != LpStatus::optimal) {
            continue;
        }
        if (!best || r.value > best->revenue) {
            best = RevenueOptimum{std::move(r.point), std::move(r.value), label};
        }
    }
    if (!best) {
        return {zeros(inst.dimension()), 0, profile_label(purchase_profile(inst, zeros(inst.dimension())))};
    }
    return *best;
}

namespace {

// Line key with the sign fixed so both sides of a facet agree.
std::pair<Vec, Rational> line_key(const Halfspace& h)
{
    Halfspace c = h;
    normalize(c);
    for (const auto& x : c.normal) {
        if (sgn(x) != 0) {
            if (sgn(x) < 0) {
                return {scale(c.normal, -1), -c.offset};
            }
            break;
        }
    }
    return {c.normal, c.offset};
}

std::size_t interior_lines(const Subdivision& s)
{
    std::set<std::pair<Vec, Rational>> lines;
    for (const auto& [label, cell] : s.cells) {
        for (const auto& h : cell.constraints) {
            if (!h.label.is_parent_facet()) {
                lines.insert(line_key(h));
            }
        }
    }
    return lines.size();
}

} // namespace

PieceBoundReport check_piece_bound(const TariffInstance& inst, const Subdivision& regions, const Rational& constant)
{
    if (inst.menu_length != 1) {
        throw std::invalid_argument("the piece bound applies to single tariffs");
    }
    PieceBoundReport rep;
    const auto n = static_cast<std::int64_t>(inst.samples());
    const auto k = static_cast<std::int64_t>(inst.K);
    rep.regions = regions.cells.size();
    rep.adjacencies = regions.adjacency.size();
    rep.constant = constant;
    rep.bound = constant * make_rational(n * n * k * std::min(n, k));
    rep.holds = make_rational(static_cast<std::int64_t>(rep.regions)) <= rep.bound;
    rep.line_bound = 2 * inst.K + 2;
    rep.lines_hold = true;
    for (std::size_t i = 0; i < inst.samples(); ++i) {
        TariffInstance one{inst.K, 1, {inst.valuations[i]}, inst.cap()};
        rep.sample_lines.push_back(interior_lines(compute_price_regions(one)));
        rep.lines_hold = rep.lines_hold && rep.sample_lines.back() <= rep.line_bound;
    }
    return rep;
}

} // namespace ptune
