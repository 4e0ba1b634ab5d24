#include "ptune/polygon.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace ptune {

std::optional<BoundingBox> bounding_box(const ConvexCell& cell, std::uint64_t seed)
{
    BoundingBox box{Vec(cell.dimension), Vec(cell.dimension)};
    for (std::size_t k = 0; k < cell.dimension; ++k) {
        Vec e = zeros(cell.dimension);
        e[k] = 1;
        auto hi = solve_lp(e, cell.constraints, Sense::maximize, seed);
        auto lo = solve_lp(e, cell.constraints, Sense::minimize, seed);
        if (hi.status != LpStatus::optimal || lo.status != LpStatus::optimal) {
            return std::nullopt;
        }
        box.lo[k] = lo.value;
        box.hi[k] = hi.value;
    }
    return box;
}

std::vector<Vec> interior_samples(const ConvexCell& cell, std::size_t density, std::uint64_t seed)
{
    std::vector<Vec> out;
    if (cell.witness && cell.strictly_contains(*cell.witness)) {
        out.push_back(*cell.witness);
    }
    if (cell.dimension == 0 || density == 0) {
        if (cell.dimension == 0 && out.empty()) {
            out.emplace_back();
        }
        return out;
    }
    auto box = bounding_box(cell, seed);
    if (!box) {
        return out;
    }
    const auto den = static_cast<std::int64_t>(2 * density);
    auto at = [&](std::size_t k, std::int64_t num, std::int64_t d) -> Rational {
        return box->lo[k] + (box->hi[k] - box->lo[k]) * make_rational(num, d);
    };
    auto keep = [&](Vec p) {
        if (cell.strictly_contains(p)) {
            out.push_back(std::move(p));
        }
    };
    const auto n = static_cast<std::int64_t>(density);
    if (cell.dimension == 1) {
        for (std::int64_t a = 0; a < n; ++a) {
            keep({at(0, 2 * a + 1, den)});
        }
    } else if (cell.dimension == 2) {
        for (std::int64_t a = 0; a < n; ++a) {
            for (std::int64_t b = 0; b < n; ++b) {
                keep({at(0, 2 * a + 1, den), at(1, 2 * b + 1, den)});
            }
        }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::int64_t> u(1, 9999);
        for (std::size_t t = 0; t < density * density; ++t) {
            Vec p(cell.dimension);
            for (std::size_t k = 0; k < cell.dimension; ++k) {
                p[k] = at(k, u(rng), 10000);
            }
            keep(std::move(p));
        }
    }
    return out;
}

Rational polygon_area(const std::vector<Vec>& loop)
{
    Rational twice = 0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec& a = loop[i];
        const Vec& b = loop[(i + 1) % loop.size()];
        twice += a[0] * b[1] - a[1] * b[0];
    }
    return twice / 2;
}

std::vector<Vec> polygon_vertices(const ConvexCell& cell)
{
    if (cell.dimension != 2) {
        throw std::invalid_argument("polygon_vertices needs a 2D cell");
    }
    const auto& hs = cell.constraints;
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            const Vec& a = hs[i].normal;
            const Vec& b = hs[j].normal;
            Rational det = a[0] * b[1] - a[1] * b[0];
            if (sgn(det) == 0) {
                continue;
            }
            Vec p{(hs[i].offset * b[1] - a[1] * hs[j].offset) / det, (a[0] * hs[j].offset - hs[i].offset * b[0]) / det};
            if (cell.contains(p) && std::find(pts.begin(), pts.end(), p) == pts.end()) {
                pts.push_back(std::move(p));
            }
        }
    }
    if (pts.size() < 3) {
        return {};
    }
    Vec c{0, 0};
    for (const auto& p : pts) {
        c = add(c, p);
    }
    c = scale(c, make_rational(1, static_cast<std::int64_t>(pts.size())));
    auto upper = [&](const Vec& p) {
        int dy = sgn(p[1] - c[1]);
        return dy > 0 || (dy == 0 && sgn(p[0] - c[0]) > 0);
    };
    std::sort(pts.begin(), pts.end(), [&](const Vec& p, const Vec& q) {
        bool up = upper(p), uq = upper(q);
        if (up != uq) {
            return up;
        }
        Rational cross = (p[0] - c[0]) * (q[1] - c[1]) - (p[1] - c[1]) * (q[0] - c[0]);
        return sgn(cross) > 0;
    });
    if (sgn(polygon_area(pts)) == 0) {
        return {};
    }
    return pts;
}

} // namespace ptune
