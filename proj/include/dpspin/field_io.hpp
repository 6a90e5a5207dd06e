#pragma once

// JSON documents for spin fields and multiphase targets.
//
// Field:  {"eps": "1/32", "domain": {"lo": [0], "hi": [1]}, "rle": [[1, 15], [-1, 16]]}
//         run-length pairs (spin, count) over Z^eps(domain), first coordinate slowest.
// Target: {"domain": {...}, "phases": [{"slab": {"normal": [1], "offset": "1/2"}},
//                                      {"boxes": [{"lo": [0], "hi": ["1/4"]}]}]}
// Rationals may be given as JSON numbers or as strings ("0.25", "1/4").

#include "dpspin/gamma_limit.hpp"
#include "dpspin/geometry.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace dpspin {

SpinField parse_field(std::string_view document);
SpinField load_field(const std::string& path);
std::string serialize_field(const SpinField& field);

MultiphaseTarget parse_target(std::string_view document);
MultiphaseTarget load_target(const std::string& path);
std::string serialize_target(const MultiphaseTarget& target);

nlohmann::json domain_to_json(const DomainSpec& domain);

}  // namespace dpspin
