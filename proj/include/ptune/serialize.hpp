#pragma once

#include "ptune/clustering.hpp"
#include "ptune/region_enum.hpp"
#include "ptune/seqalign.hpp"
#include "ptune/tariff.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

namespace ptune {

// std::map-backed objects, so keys always come out sorted.
using Json = nlohmann::json;

inline constexpr int schema_version = 1;

/// Malformed input text or JSON structure.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json encode(const Rational& r); // always "p/q"
Json encode(const Vec& v);
Json encode(const Tag& t);
Json encode(const Halfspace& h);
Json encode(const ConvexCell& c); // constraints sorted by (normal, offset, label)
Json encode(const Subdivision& s);
Json encode(const ClusteringInstance& inst);
Json encode(const MergeFamily& fam);
Json encode(const AlignmentSpec& spec);
Json encode(const Alignment& a);
Json encode(const TariffInstance& inst);

// Decoders accept "p/q", integer and decimal strings, and JSON numbers for
// rationals. They throw ParseError on malformed input.
Rational decode_rational(const Json& j);
Vec decode_vec(const Json& j);
Tag decode_tag(const Json& j);
Halfspace decode_halfspace(const Json& j);
ConvexCell decode_cell(const Json& j);
Subdivision decode_subdivision(const Json& j);
ClusteringInstance decode_clustering(const Json& j);
MergeFamily decode_family(const Json& j);
/// A preset name or a full table description.
AlignmentSpec decode_alignment_spec(const Json& j);
TariffInstance decode_tariff(const Json& j);

/// Two sequences as FASTA or as the first two non-empty lines.
std::pair<std::string, std::string> parse_sequences(std::string_view text);

/// Two-space indented dump with a trailing newline.
std::string dump_canonical(const Json& j);

Json parse_json_text(std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace ptune
