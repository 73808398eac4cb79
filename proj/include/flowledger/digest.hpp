#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "flowledger/bytes.hpp"

namespace flowledger {

struct Digest {
    static constexpr std::size_t size = 32;
    std::array<std::uint8_t, size> bytes{};

    [[nodiscard]] ByteView view() const noexcept { return {bytes.data(), bytes.size()}; }
    [[nodiscard]] bool is_zero() const noexcept;
    [[nodiscard]] std::string hex() const { return to_hex(view()); }

    static Digest from_view(ByteView data);  // exactly 32 bytes
    static Digest from_hex(std::string_view hex);

    auto operator<=>(const Digest&) const = default;
};

Digest sha256(ByteView data);
inline Digest sha256(std::string_view text) { return sha256(as_bytes(text)); }

}  // namespace flowledger

template <>
struct std::hash<flowledger::Digest> {
    std::size_t operator()(const flowledger::Digest& d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
        return h;
    }
};
