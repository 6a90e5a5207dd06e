#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

namespace dpspin {

/// Parses JSON, rejecting duplicate object keys. Errors are reported as ModelParseError.
nlohmann::json parse_json_strict(std::string_view document, const std::string& what);

std::string read_text_file(const std::string& path);

}  // namespace dpspin
