#pragma once

#include "ptune/serialize.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ptune {

inline constexpr int exit_ok = 0;
inline constexpr int exit_parse_error = 2;
inline constexpr int exit_infeasible = 3;
inline constexpr int exit_oracle_failure = 4;

/// Environment variable holding the default --seed.
inline constexpr const char* seed_env_var = "PTUNE_SEED";

struct RunOptions {
    std::uint64_t seed = 1;
    bool oracle = false;
    std::size_t oracle_density = 50; // samples per axis of a 2D cell's bounding box
};

struct OracleReport {
    std::size_t regions = 0;
    std::size_t samples = 0;
    std::size_t agreements = 0;

    bool passed() const { return samples == agreements; }
    Json to_json() const;
};

Json cluster_regions(const ClusteringInstance& inst, const MergeFamily& fam, const RunOptions& opts,
                     OracleReport* oracle = nullptr);

enum class AlignMethod { dag, ray, both };
AlignMethod parse_align_method(std::string_view name);

Json align_regions(const AlignmentSpec& spec, const std::string& s1, const std::string& s2, const Rational& box,
                   AlignMethod method, const RunOptions& opts, OracleReport* oracle = nullptr);

/// Boundaries s = rho1 / (rho1 + rho2) between consecutive feature vectors of
/// a two-feature partition, ascending.
std::vector<Rational> angular_breaks(const AlignmentPartition& partition);

Json tariff_regions(const TariffInstance& inst, const RunOptions& opts, OracleReport* oracle = nullptr);
Json tariff_optimize(const TariffInstance& inst, const RunOptions& opts);

Json dataset_document(std::string_view name, std::uint64_t seed, std::size_t per_component);

/// CSV rows "region,label,vertex,x,y,x_exact,y_exact" for every 2D region of
/// a regions document; zero-area regions are skipped. Throws
/// std::invalid_argument for other dimensions.
std::string plot_csv(const Json& doc);

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ptune
