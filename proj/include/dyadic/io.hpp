#pragma once

#include <dyadic/adjacent_family.hpp>
#include <dyadic/dimensions.hpp>
#include <dyadic/metric_space.hpp>

#include <json.hpp>

#include <string>

namespace dyadic {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Point-set document:
///   {"metric": {"kind": "euclidean"}, "points": [[x, y], ...]}
///   {"metric": {"kind": "ultrametric", "arity": 2, "base": 0.0625}, "points": ["0110", ...]}
///   {"metric": {"kind": "matrix"}, "matrix": [d10, d20, d21, d30, ...]}
///   {"metric": {"kind": "snowflake", "epsilon": 0.5, "base_metric": {...}}, "points": ...}
/// Throws ParseError naming the offending line or field.
MetricSpace parse_points(const std::string& text);
MetricSpace load_points(const std::string& path);
nlohmann::json points_to_json(const MetricSpace& space);

/// 16 hex digits of MetricSpace::fingerprint().
std::string fingerprint_hex(const MetricSpace& space);

/// Cube-system document: params, per-system nets and parent links, the
/// certified constants and the fingerprint of the point set.
nlohmann::json family_to_json(const AdjacentFamily& family);

/// Rebuilds the family over `space`. Throws StaleCubes on a fingerprint
/// mismatch, ParseError on malformed content. When `require_valid`, refuses
/// (InvariantFailure) files whose systems fail partition or sandwich checks.
AdjacentFamily parse_cubes(const std::string& text, const MetricSpace& space, bool require_valid = true);

nlohmann::json estimate_to_json(const DimensionEstimate& est);
nlohmann::json report_to_json(const SystemReport& report);

}  // namespace dyadic
