#pragma once

#include "ptune/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ptune {

struct BoundingBox {
    Vec lo, hi;
};

/// Exact coordinate-wise extent; nullopt for an empty or unbounded cell.
std::optional<BoundingBox> bounding_box(const ConvexCell& cell, std::uint64_t seed = default_lp_seed);

/// Strictly interior sample points. Cells of dimension <= 2 use a
/// density^d grid over the bounding box (cell-centred, so box corners are
/// never sampled); higher dimensions draw density^2 seeded random points.
/// The witness, when present, is always included.
std::vector<Vec> interior_samples(const ConvexCell& cell, std::size_t density, std::uint64_t seed = default_lp_seed);

/// Vertex loop of a bounded 2D cell in counter-clockwise order; empty when
/// the cell has zero area. Throws std::invalid_argument unless d = 2.
std::vector<Vec> polygon_vertices(const ConvexCell& cell);

/// Shoelace area of a vertex loop (positive for counter-clockwise).
Rational polygon_area(const std::vector<Vec>& loop);

} // namespace ptune
