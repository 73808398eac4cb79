#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowledger/bytes.hpp"
#include "flowledger/digest.hpp"

namespace flowledger {

/// Content identifier: version 1, multihash code 0x12 (SHA-256), digest of the content.
struct Cid {
    static constexpr std::uint8_t kVersion = 1;
    static constexpr std::uint8_t kSha256 = 0x12;
    static constexpr std::size_t kBinarySize = 2 + Digest::size;

    Digest digest;

    static Cid of(ByteView content) { return Cid{sha256(content)}; }

    /// "cidv1-12-" followed by the lowercase hex digest.
    [[nodiscard]] std::string str() const;
    static Cid parse(std::string_view text);

    /// version ‖ hash code ‖ digest; used inside transactions and lien tokens.
    [[nodiscard]] Bytes binary() const;
    static Cid from_binary(ByteView data);

    auto operator<=>(const Cid&) const = default;
};

/// Local content-addressed store standing in for a private IPFS network.
///
/// With a directory, every object is a file named by its hex digest and reads
/// always go to disk, so on-disk corruption is caught on the next read.
/// Without a directory the store is purely in memory. Every read re-hashes
/// the bytes before returning them.
class ContentStore {
public:
    ContentStore() = default;
    /// Opens (creating if needed) a directory-backed store and indexes any
    /// objects already present.
    explicit ContentStore(std::filesystem::path dir);

    ContentStore(const ContentStore&) = delete;
    ContentStore& operator=(const ContentStore&) = delete;

    /// Idempotent. Throws EmptyContent.
    Cid put(ByteView content);
    Cid put(std::string_view text) { return put(as_bytes(text)); }

    /// Throws NotFound or IntegrityFailure.
    [[nodiscard]] Bytes get(const Cid& cid) const;
    [[nodiscard]] std::string get_text(const Cid& cid) const;

    [[nodiscard]] bool contains(const Cid& cid) const;
    /// Present and re-verifies against its digest.
    [[nodiscard]] bool resolves(const Cid& cid) const noexcept;

    [[nodiscard]] std::vector<Cid> list() const;
    /// Files in the store directory whose names are not a valid digest.
    [[nodiscard]] std::vector<std::string> stray_files() const;
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }
    [[nodiscard]] std::filesystem::path object_path(const Cid& cid) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::set<Digest> index_;
    std::map<Digest, Bytes> memory_;
    std::vector<std::string> stray_;
};

}  // namespace flowledger
