#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace flowledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using u128 = unsigned __int128;

inline ByteView as_bytes(std::string_view s) noexcept {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline Bytes to_bytes(std::string_view s) { return {s.begin(), s.end()}; }

/// Lowercase hex, no prefix.
std::string to_hex(ByteView data);
/// Lowercase hex with a leading "0x".
std::string to_hex_prefixed(ByteView data);
/// Strict decoder: lowercase digits only, even length. Throws Error(Malformed).
Bytes from_hex(std::string_view hex);
/// Requires the "0x" prefix, then behaves like from_hex.
Bytes from_hex_prefixed(std::string_view hex);

void put_be32(Bytes& out, std::uint32_t v);
void put_be64(Bytes& out, std::uint64_t v);
void put_be128(Bytes& out, u128 v);
Bytes be32(std::uint32_t v);
Bytes be64(std::uint64_t v);
Bytes be128(u128 v);
std::uint32_t read_be32(ByteView in);
std::uint64_t read_be64(ByteView in);
u128 read_be128(ByteView in);

std::string u128_to_string(u128 v);
/// Decimal digits only, no sign, no leading zeros (except "0"). Throws Error(Malformed).
u128 u128_from_string(std::string_view s);

/// Length-prefixed record: tag ‖ be32 field count ‖ (be32 length ‖ bytes)*.
/// Shared by trie nodes, accounts, transactions, block headers and lien tokens.
class RecordWriter {
public:
    explicit RecordWriter(std::uint8_t tag) : tag_(tag) {}

    RecordWriter& field(ByteView data);
    RecordWriter& field(std::string_view text) { return field(as_bytes(text)); }
    RecordWriter& field_u8(std::uint8_t v) { return field(ByteView(&v, 1)); }
    RecordWriter& field_u32(std::uint32_t v);
    RecordWriter& field_u64(std::uint64_t v);
    RecordWriter& field_u128(u128 v);

    [[nodiscard]] Bytes finish() const;

private:
    std::uint8_t tag_;
    std::uint32_t count_ = 0;
    Bytes body_;
};

struct Record {
    std::uint8_t tag = 0;
    std::vector<Bytes> fields;

    /// Field accessors that check the exact width. Throw Error(Malformed).
    [[nodiscard]] std::uint8_t u8(std::size_t i) const;
    [[nodiscard]] std::uint32_t u32(std::size_t i) const;
    [[nodiscard]] std::uint64_t u64(std::size_t i) const;
    [[nodiscard]] u128 u128_at(std::size_t i) const;
    [[nodiscard]] const Bytes& at(std::size_t i) const;
};

/// Parses a complete record; trailing bytes or truncation throw Error(Malformed).
Record parse_record(ByteView data);

}  // namespace flowledger
