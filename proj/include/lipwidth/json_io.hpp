#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "lipwidth/lip_maps.hpp"
#include "lipwidth/metric.hpp"

namespace lipwidth {

/// {"dim": 3, "norm": "l2"}; weighted_linf adds "weights", l1_step "breakpoints".
nlohmann::json space_to_json(const NormedSpace& space);
NormedSpace space_from_json(const nlohmann::json& j);

/// {"space": {...}, "points": [[...], ...], "labels": [...]}
nlohmann::json set_to_json(const FiniteSet& set);
FiniteSet set_from_json(const nlohmann::json& j);

/// Full map description with a "variant" discriminator. Bump sums above
/// `max_bumps` are summarised (counts and extremes) instead of listed.
nlohmann::json map_to_json(const LipschitzMapSpec& map, std::size_t max_bumps = 4096);
LipschitzMapSpec map_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal form, used for every number in reports.
std::string format_double(double v);

/// Serialises with sorted keys and fixed float formatting.
std::string canonical_dump(const nlohmann::json& j, int indent = 2);

}  // namespace lipwidth
