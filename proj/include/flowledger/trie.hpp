#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "flowledger/bytes.hpp"
#include "flowledger/digest.hpp"

namespace flowledger {

namespace trie_detail {
struct Node;
}

/// One node on the path from the root to a key. `depth` is the nibble offset
/// into the key at which the node sits; `node` is its canonical serialization,
/// which carries the digests of every sibling subtree.
struct ProofStep {
    std::uint32_t depth = 0;
    Bytes node;

    bool operator==(const ProofStep&) const = default;
};

struct InclusionProof {
    std::vector<ProofStep> path;

    bool operator==(const InclusionProof&) const = default;
};

/// Hash-committed key/value map backed by a persistent hexary radix trie.
///
/// Keys are split into nibbles (high nibble first). Nodes are leaf (tag 0x00),
/// branch (0x01) or extension (0x02); a node's hash is SHA-256 of its
/// canonical record encoding, see docs/trie-format.md. Every mutation returns a
/// new snapshot sharing unchanged subtrees with the old one, so copies are
/// cheap and existing snapshots are never disturbed.
class AuthenticatedMap {
public:
    static constexpr std::size_t kMaxKeyBytes = 64;

    AuthenticatedMap() = default;

    /// Returns a new snapshot with key mapped to value. Throws EmptyKey / KeyTooLong.
    [[nodiscard]] AuthenticatedMap put(ByteView key, ByteView value) const;
    /// In-place variant of put() for single-owner call sites.
    void assign(ByteView key, ByteView value) { *this = put(key, value); }

    [[nodiscard]] std::optional<Bytes> get(ByteView key) const;
    [[nodiscard]] bool contains(ByteView key) const { return get(key).has_value(); }

    [[nodiscard]] Digest root_hash() const;
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

    /// Throws AbsentKey if the key is not present.
    [[nodiscard]] InclusionProof prove(ByteView key) const;

    /// Visits entries in lexicographic key order.
    void for_each(const std::function<void(const Bytes& key, const Bytes& value)>& fn) const;

    /// Root of the map with no entries: SHA-256 of the single byte 0x00.
    static const Digest& empty_root();

private:
    std::shared_ptr<const trie_detail::Node> root_;
    std::size_t size_ = 0;
};

/// Pure check that `proof` ties (key, value) to `root`. Malformed proofs yield false.
[[nodiscard]] bool verify_proof(const Digest& root, ByteView key, ByteView value,
                                const InclusionProof& proof);

}  // namespace flowledger
