#include "flowledger/address.hpp"

#include <algorithm>

#include "flowledger/digest.hpp"
#include "flowledger/error.hpp"

namespace flowledger {

bool Address::is_reserved() const noexcept {
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Address Address::from_view(ByteView data) {
    if (data.size() != size) throw Error(Errc::Malformed, "address must be 20 bytes");
    Address a;
    std::copy(data.begin(), data.end(), a.bytes.begin());
    return a;
}

Address Address::from_hex(std::string_view prefixed_hex) { return from_view(from_hex_prefixed(prefixed_hex)); }

Address Address::derive(std::string_view label) {
    auto d = sha256("flowledger:address:" + std::string(label));
    return from_view(d.view().first(size));
}

}  // namespace flowledger
