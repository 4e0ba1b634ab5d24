#pragma once

#include "ptune/region_enum.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

namespace ptune {

/// Buyers with valuations over 0..K units facing a menu of L two-part
/// tariffs. Prices are laid out as (p1^1, p2^1, ..., p1^L, p2^L).
struct TariffInstance {
    std::size_t K = 0;
    std::size_t menu_length = 1;
    std::vector<std::vector<Rational>> valuations; // valuations[i][q - 1] = v_i(q)
    std::optional<Rational> price_cap;             // default: max valuation + 1

    std::size_t samples() const { return valuations.size(); }
    std::size_t dimension() const { return 2 * menu_length; }
    /// v_i(q), with v_i(0) = 0.
    Rational value(std::size_t i, std::size_t q) const;
    Rational cap() const;
    /// Throws std::invalid_argument on ragged or negative valuations.
    void validate() const;
};

struct Purchase {
    std::size_t quantity = 0;
    std::size_t tariff = 1; // 1-based; always 1 when nothing is bought

    auto operator<=>(const Purchase&) const = default;
    bool operator==(const Purchase&) const = default;
};

using PurchaseProfile = std::vector<Purchase>;

/// Utility-maximizing purchase. Ties go to the larger quantity, then the
/// smaller tariff index.
Purchase buyer_choice(const TariffInstance& inst, std::size_t sample, const Vec& prices);
PurchaseProfile purchase_profile(const TariffInstance& inst, const Vec& prices);

/// Label layout: (q_1..q_N, j_1..j_N).
Tag profile_label(const PurchaseProfile& profile);
PurchaseProfile label_profile(const Tag& label);

/// Seller revenue as a linear form in the prices.
Vec revenue_form(const TariffInstance& inst, const PurchaseProfile& profile);
Rational revenue_at(const TariffInstance& inst, const Vec& prices);

/// 0 <= price <= cap in every coordinate.
ConvexCell price_domain(const TariffInstance& inst);

/// Price-space regions of constant purchase profile, labelled by
/// profile_label.
Subdivision compute_price_regions(const TariffInstance& inst, std::uint64_t seed = default_lp_seed);

struct RevenueOptimum {
    Vec prices;
    Rational revenue;
    Tag label;
};

/// Best closed-region optimum; the first label wins ties.
RevenueOptimum maximize_revenue(const TariffInstance& inst, const Subdivision& regions,
                                std::uint64_t seed = default_lp_seed);

struct PieceBoundReport {
    std::size_t regions = 0;
    std::size_t adjacencies = 0;
    Rational constant;
    Rational bound; // constant * N^2 K min(N, K)
    bool holds = false;
    std::vector<std::size_t> sample_lines; // distinct interior boundary lines per sample
    std::size_t line_bound = 0;            // 2K + 2
    bool lines_hold = false;
};

/// Single-tariff instances only; throws std::invalid_argument otherwise.
PieceBoundReport check_piece_bound(const TariffInstance& inst, const Subdivision& regions,
                                   const Rational& constant = 10);

} // namespace ptune
