#include "flowledger/canonical_json.hpp"

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
void reject_floats(const Json& j) {
    if (j.is_number_float()) throw Error(Errc::Malformed, "floating-point values are not canonical");
    if (j.is_structured()) {
        for (const auto& child : j) reject_floats(child);
    }
}
}  // namespace

std::string canonical_json(const Json& doc) {
    reject_floats(doc);
    return doc.dump();
}

Json parse_canonical_json(std::string_view text) {
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::Malformed, "invalid JSON");
    if (canonical_json(doc) != text) throw Error(Errc::Malformed, "JSON is not in canonical form");
    return doc;
}

}  // namespace flowledger
