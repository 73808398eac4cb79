#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "flowledger/bytes.hpp"

namespace flowledger {

struct Address {
    static constexpr std::size_t size = 20;
    std::array<std::uint8_t, size> bytes{};

    [[nodiscard]] ByteView view() const noexcept { return {bytes.data(), bytes.size()}; }
    /// 0x00…00 is the mint/burn sentinel and never holds an account.
    [[nodiscard]] bool is_reserved() const noexcept;
    [[nodiscard]] std::string hex() const { return to_hex_prefixed(view()); }

    static Address from_view(ByteView data);
    static Address from_hex(std::string_view prefixed_hex);
    /// First 20 bytes of SHA-256("flowledger:address:" ‖ label). Deterministic role addresses.
    static Address derive(std::string_view label);

    auto operator<=>(const Address&) const = default;
};

}  // namespace flowledger
