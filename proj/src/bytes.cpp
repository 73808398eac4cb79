#include "flowledger/bytes.hpp"

#include <algorithm>

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) noexcept {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}
}  // namespace

std::string to_hex(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::string to_hex_prefixed(ByteView data) { return "0x" + to_hex(data); }

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error(Errc::Malformed, "odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_value(hex[i]);
        int lo = hex_value(hex[i + 1]);
        if (hi < 0 || lo < 0) throw Error(Errc::Malformed, "invalid hex digit");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

Bytes from_hex_prefixed(std::string_view hex) {
    if (hex.size() < 2 || hex[0] != '0' || hex[1] != 'x') {
        throw Error(Errc::Malformed, "hex string lacks 0x prefix");
    }
    return from_hex(hex.substr(2));
}

void put_be32(Bytes& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}
void put_be64(Bytes& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}
void put_be128(Bytes& out, u128 v) {
    put_be64(out, static_cast<std::uint64_t>(v >> 64));
    put_be64(out, static_cast<std::uint64_t>(v));
}

Bytes be32(std::uint32_t v) { Bytes b; put_be32(b, v); return b; }
Bytes be64(std::uint64_t v) { Bytes b; put_be64(b, v); return b; }
Bytes be128(u128 v) { Bytes b; put_be128(b, v); return b; }

std::uint32_t read_be32(ByteView in) {
    if (in.size() != 4) throw Error(Errc::Malformed, "expected 4-byte integer");
    std::uint32_t v = 0;
    for (auto b : in) v = (v << 8) | b;
    return v;
}
std::uint64_t read_be64(ByteView in) {
    if (in.size() != 8) throw Error(Errc::Malformed, "expected 8-byte integer");
    std::uint64_t v = 0;
    for (auto b : in) v = (v << 8) | b;
    return v;
}
u128 read_be128(ByteView in) {
    if (in.size() != 16) throw Error(Errc::Malformed, "expected 16-byte integer");
    u128 v = 0;
    for (auto b : in) v = (v << 8) | b;
    return v;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

u128 u128_from_string(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s[0] == '0')) {
        throw Error(Errc::Malformed, "not a canonical decimal integer");
    }
    constexpr u128 kMax = ~static_cast<u128>(0);
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') throw Error(Errc::Malformed, "not a decimal integer");
        auto digit = static_cast<unsigned>(c - '0');
        if (v > (kMax - digit) / 10) throw Error(Errc::Malformed, "integer exceeds 128 bits");
        v = v * 10 + digit;
    }
    return v;
}

RecordWriter& RecordWriter::field(ByteView data) {
    put_be32(body_, static_cast<std::uint32_t>(data.size()));
    body_.insert(body_.end(), data.begin(), data.end());
    ++count_;
    return *this;
}

RecordWriter& RecordWriter::field_u32(std::uint32_t v) { return field(be32(v)); }
RecordWriter& RecordWriter::field_u64(std::uint64_t v) { return field(be64(v)); }
RecordWriter& RecordWriter::field_u128(u128 v) { return field(be128(v)); }

Bytes RecordWriter::finish() const {
    Bytes out;
    out.reserve(5 + body_.size());
    out.push_back(tag_);
    put_be32(out, count_);
    out.insert(out.end(), body_.begin(), body_.end());
    return out;
}

const Bytes& Record::at(std::size_t i) const {
    if (i >= fields.size()) throw Error(Errc::Malformed, "record field index out of range");
    return fields[i];
}
std::uint8_t Record::u8(std::size_t i) const {
    const auto& f = at(i);
    if (f.size() != 1) throw Error(Errc::Malformed, "expected 1-byte field");
    return f[0];
}
std::uint32_t Record::u32(std::size_t i) const { return read_be32(at(i)); }
std::uint64_t Record::u64(std::size_t i) const { return read_be64(at(i)); }
u128 Record::u128_at(std::size_t i) const { return read_be128(at(i)); }

Record parse_record(ByteView data) {
    if (data.size() < 5) throw Error(Errc::Malformed, "record shorter than header");
    Record rec;
    rec.tag = data[0];
    std::uint32_t count = read_be32(data.subspan(1, 4));
    std::size_t pos = 5;
    // Each field needs at least its 4-byte length, which bounds count before reserving.
    if (count > (data.size() - pos) / 4) throw Error(Errc::Malformed, "field count exceeds record size");
    rec.fields.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (data.size() - pos < 4) throw Error(Errc::Malformed, "truncated field length");
        std::uint32_t len = read_be32(data.subspan(pos, 4));
        pos += 4;
        if (data.size() - pos < len) throw Error(Errc::Malformed, "truncated field body");
        rec.fields.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(pos),
                                data.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    if (pos != data.size()) throw Error(Errc::Malformed, "trailing bytes after record");
    return rec;
}

}  // namespace flowledger
