#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace flowledger {

using Json = nlohmann::json;

/// Sorted keys, no insignificant whitespace, UTF-8, integers only.
/// Throws Error(Malformed) if the document holds a floating-point number.
std::string canonical_json(const Json& doc);

/// Parses text and requires it to already be in canonical form, so that any
/// byte-level change to a stored document is detectable.
Json parse_canonical_json(std::string_view text);

}  // namespace flowledger
