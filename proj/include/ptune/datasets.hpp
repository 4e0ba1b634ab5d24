#pragma once

#include "ptune/clustering.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ptune {

/// "Rings", "Disks", "Outliers", "BalancedOutliers".
const std::vector<std::string>& dataset_names();

/// Synthetic 2D clustering instance with `per_component` points per
/// generating shape. Coordinates are snapped to multiples of 1e-6; the
/// instance carries a Euclidean table and the generating components as the
/// target (isolated outliers join the component with the nearest center).
/// Throws std::invalid_argument for an unknown name.
ClusteringInstance generate_dataset(std::string_view name, std::uint64_t seed, std::size_t per_component = 50);

} // namespace ptune
