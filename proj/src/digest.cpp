#include "flowledger/digest.hpp"

#include <openssl/sha.h>

#include <algorithm>

#include "flowledger/error.hpp"

namespace flowledger {

bool Digest::is_zero() const noexcept {
    return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Digest Digest::from_view(ByteView data) {
    if (data.size() != size) throw Error(Errc::Malformed, "digest must be 32 bytes");
    Digest d;
    std::copy(data.begin(), data.end(), d.bytes.begin());
    return d;
}

Digest Digest::from_hex(std::string_view hex) { return from_view(flowledger::from_hex(hex)); }

Digest sha256(ByteView data) {
    Digest d;
    SHA256(data.data(), data.size(), d.bytes.data());
    return d;
}

}  // namespace flowledger
