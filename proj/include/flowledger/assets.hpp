#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "flowledger/address.hpp"
#include "flowledger/bytes.hpp"
#include "flowledger/store.hpp"
#include "flowledger/trie.hpp"

namespace flowledger {

/// Answers whether a CID can be fetched (and re-verified) from off-chain storage.
using CidResolver = std::function<bool(const Cid&)>;

/// ERC20-like balance sheet. Storage trie layout: key = holder address (20 bytes),
/// value = balance as 16-byte big-endian.
class FungibleLedger {
public:
    FungibleLedger(Address contract, Address owner) : contract_(contract), owner_(owner) {}

    /// Throws SupplyOverflow; minting zero is a no-op.
    void mint(const Address& to, u128 amount);
    /// Throws InsufficientTokens; leaves state untouched on failure.
    void transfer(const Address& from, const Address& to, u128 amount);

    [[nodiscard]] u128 balance_of(const Address& holder) const;
    [[nodiscard]] u128 total_supply() const noexcept { return total_supply_; }
    [[nodiscard]] const std::map<Address, u128>& balances() const noexcept { return balances_; }
    [[nodiscard]] const Address& contract() const noexcept { return contract_; }
    [[nodiscard]] const Address& owner() const noexcept { return owner_; }
    [[nodiscard]] const AuthenticatedMap& storage() const noexcept { return storage_; }
    [[nodiscard]] Digest storage_root() const { return storage_.root_hash(); }

private:
    void write(const Address& holder, u128 balance);

    Address contract_;
    Address owner_;
    u128 total_supply_ = 0;
    std::map<Address, u128> balances_;
    AuthenticatedMap storage_;
};

struct LienToken {
    std::uint64_t token_id = 0;
    Address owner;
    Cid uri_cid;
    /// Canonical JSON of the work scope (element GUIDs, trades, billing period).
    std::string scope;

    [[nodiscard]] Bytes encode() const;
    static LienToken decode(ByteView data);

    bool operator==(const LienToken&) const = default;
};

/// ERC721-like registry of lien rights. Tokens live only in the storage trie
/// under key 0x4C ‖ be64(token_id), so registry copies are O(1).
class LienRegistry {
public:
    static constexpr std::uint8_t kKeyPrefix = 0x4C;

    LienRegistry(Address contract, Address minter) : contract_(contract), minter_(minter) {}

    /// Mints token next_id to `to_owner`. Throws UnresolvableCID if the resolver rejects the URI.
    std::uint64_t mint_and_transfer(const Address& to_owner, const Cid& uri_cid, std::string scope,
                                    const CidResolver& resolver);
    /// Throws UnknownToken, or Unauthorized when `from` is not the current owner.
    void transfer(std::uint64_t token_id, const Address& from, const Address& to);

    [[nodiscard]] LienToken token(std::uint64_t token_id) const;  // UnknownToken
    [[nodiscard]] Address owner_of(std::uint64_t token_id) const { return token(token_id).owner; }
    [[nodiscard]] Cid token_uri(std::uint64_t token_id) const { return token(token_id).uri_cid; }
    [[nodiscard]] std::uint64_t next_id() const noexcept { return next_id_; }

    [[nodiscard]] const Address& contract() const noexcept { return contract_; }
    [[nodiscard]] const Address& minter() const noexcept { return minter_; }
    [[nodiscard]] const AuthenticatedMap& storage() const noexcept { return storage_; }
    [[nodiscard]] Digest storage_root() const { return storage_.root_hash(); }

    static Bytes storage_key(std::uint64_t token_id);

private:
    Address contract_;
    Address minter_;
    std::uint64_t next_id_ = 0;
    AuthenticatedMap storage_;
};

}  // namespace flowledger
