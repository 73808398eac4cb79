#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowledger/address.hpp"
#include "flowledger/assets.hpp"
#include "flowledger/digest.hpp"
#include "flowledger/store.hpp"
#include "flowledger/trie.hpp"

namespace flowledger {

// Deterministic single-node ledger. There is no gas, no fee market and no
// signature checking: the harness that submits transactions is trusted to
// speak for their senders. Do not mistake this for a secure chain.

struct Account {
    std::uint64_t nonce = 0;
    u128 balance = 0;
    Digest storage_root = AuthenticatedMap::empty_root();
    Digest code_hash{};  // all-zero for externally owned accounts

    [[nodiscard]] bool is_contract() const noexcept { return !code_hash.is_zero(); }
    [[nodiscard]] Bytes encode() const;
    static Account decode(ByteView data);

    bool operator==(const Account&) const = default;
};

enum class TxKind : std::uint8_t {
    NativeTransfer = 0,
    TokenTransfer = 1,
    LienMintTransfer = 2,
    ContractCall = 3,
};

std::string_view tx_kind_name(TxKind kind) noexcept;
TxKind tx_kind_from_name(std::string_view name);

struct Transaction {
    Address from;
    Address to;
    TxKind kind = TxKind::NativeTransfer;
    u128 amount = 0;
    Bytes payload;
    std::optional<Cid> evidence_cid;
    std::uint64_t nonce = 0;

    /// Canonical record encoding, see docs/tx-format.md.
    [[nodiscard]] Bytes encode() const;
    [[nodiscard]] Digest id() const { return sha256(encode()); }
    static Transaction decode(ByteView data);

    bool operator==(const Transaction&) const = default;
};

// Kind-specific payloads.
struct TokenTransferPayload {
    Address contract;
};
struct LienMintPayload {
    Address registry;
    Cid uri_cid;
    std::string scope;
};
enum class CallOp : std::uint8_t { FungibleMint = 1, LienTransfer = 2 };
/// ContractCall: tx.to is the contract. FungibleMint credits `recipient` with tx.amount;
/// LienTransfer moves `token_id` from tx.from to `recipient`.
struct ContractCallPayload {
    CallOp op = CallOp::FungibleMint;
    Address recipient;
    std::uint64_t token_id = 0;
};

Bytes encode_payload(const TokenTransferPayload& p);
Bytes encode_payload(const LienMintPayload& p);
Bytes encode_payload(const ContractCallPayload& p);
TokenTransferPayload decode_token_transfer(ByteView payload);
LienMintPayload decode_lien_mint(ByteView payload);
ContractCallPayload decode_contract_call(ByteView payload);

struct AtomicBatch {
    std::vector<Transaction> transactions;

    /// SHA-256 over the concatenated transaction ids.
    [[nodiscard]] Digest batch_id() const;

    bool operator==(const AtomicBatch&) const = default;
};

/// Code hashes marking the built-in contract kinds.
const Digest& fungible_code_hash();
const Digest& lien_registry_code_hash();
const Digest& escrow_code_hash();

/// Accounts plus the asset contracts whose storage roots they commit to.
/// State trie: key = address bytes, value = Account::encode().
class WorldState {
public:
    /// Throws ReservedAddress / AddressInUse.
    void create_account(const Address& address, u128 initial_balance, const Digest& code_hash = Digest{});
    /// Creates the contract account and its empty token ledger.
    void deploy_fungible(const Address& contract, const Address& owner);
    void deploy_lien_registry(const Address& contract, const Address& minter);
    /// Owner-side mint outside of a transaction (genesis funding). Throws SupplyOverflow.
    void genesis_mint(const Address& contract, const Address& to, u128 amount);

    /// Applies one transaction in place. On error the state may be partially
    /// modified; callers needing all-or-nothing go through execute_atomic_batch.
    void apply(const Transaction& tx, const CidResolver& resolver);

    [[nodiscard]] const Account* find(const Address& address) const;
    [[nodiscard]] u128 balance(const Address& address) const;
    [[nodiscard]] std::uint64_t nonce(const Address& address) const;
    [[nodiscard]] const std::map<Address, Account>& accounts() const noexcept { return accounts_; }
    [[nodiscard]] const FungibleLedger& fungible(const Address& contract) const;  // UnknownContract
    [[nodiscard]] const LienRegistry& liens(const Address& contract) const;       // UnknownContract
    [[nodiscard]] bool has_fungible(const Address& contract) const { return fungibles_.contains(contract); }
    [[nodiscard]] bool has_liens(const Address& contract) const { return liens_.contains(contract); }
    /// Storage trie of a contract account (empty map for EOAs).
    [[nodiscard]] AuthenticatedMap storage_of(const Address& address) const;

    [[nodiscard]] Digest root() const { return trie_.root_hash(); }
    [[nodiscard]] const AuthenticatedMap& trie() const noexcept { return trie_; }
    /// Sum of all native balances.
    [[nodiscard]] u128 native_supply() const;

    /// Writes an account record without any transaction rule. Used by fault
    /// injection and importers; the resulting state need not be reachable.
    void overwrite_account(const Address& address, const Account& account);

private:
    void commit(const Address& address, const Account& account);
    void sync_storage(const Address& contract, const Digest& storage_root);
    Account& sender(const Transaction& tx);

    std::map<Address, Account> accounts_;
    std::map<Address, FungibleLedger> fungibles_;
    std::map<Address, LienRegistry> liens_;
    AuthenticatedMap trie_;
};

/// All-or-nothing: returns the state after every transaction, or throws
/// BatchAborted leaving `state` untouched. Throws EmptyBatch for no transactions.
[[nodiscard]] WorldState execute_atomic_batch(const WorldState& state, const AtomicBatch& batch,
                                              const CidResolver& resolver);

struct Block {
    std::uint64_t height = 0;
    Digest parent{};
    Digest state_root{};
    Digest tx_root{};
    std::uint64_t timestamp = 0;
    std::vector<AtomicBatch> batches;

    /// Header record: height, parent, state_root, tx_root, timestamp, batch sizes.
    [[nodiscard]] Bytes header_encoding() const;
    [[nodiscard]] Digest hash() const { return sha256(header_encoding()); }
    /// Root of the map be32(index) → transaction encoding over all batches in order.
    [[nodiscard]] Digest compute_tx_root() const;
    [[nodiscard]] std::size_t transaction_count() const;

    bool operator==(const Block&) const = default;
};

/// Deterministic genesis allocation. Block 0 commits the state it builds.
struct GenesisSpec {
    struct Alloc {
        Address address;
        u128 balance = 0;
        Digest code_hash{};
        bool operator==(const Alloc&) const = default;
    };
    struct FungibleDeploy {
        Address contract;
        Address owner;
        std::vector<std::pair<Address, u128>> mints;
        bool operator==(const FungibleDeploy&) const = default;
    };
    struct LienDeploy {
        Address contract;
        Address minter;
        bool operator==(const LienDeploy&) const = default;
    };

    std::uint64_t timestamp = 0;
    std::vector<Alloc> accounts;
    std::vector<FungibleDeploy> fungibles;
    std::vector<LienDeploy> lien_registries;

    [[nodiscard]] WorldState build() const;

    bool operator==(const GenesisSpec&) const = default;
};

/// One chain, one writer. Reads of sealed blocks are safe from any thread
/// once the writer is done.
class Chain {
public:
    explicit Chain(GenesisSpec genesis, CidResolver resolver = {});

    /// Reassembles a chain from stored parts without validating it; see verify_chain().
    static Chain from_parts(GenesisSpec genesis, std::vector<Block> blocks, WorldState state, CidResolver resolver);

    /// Executes every batch in order and appends the block. Throws
    /// NonMonotonicTimestamp or BatchAborted; on error the chain is unchanged.
    const Block& seal_block(std::vector<AtomicBatch> batches, std::uint64_t timestamp);

    [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
    [[nodiscard]] const Block& tip() const { return blocks_.back(); }
    [[nodiscard]] const WorldState& state() const noexcept { return state_; }
    [[nodiscard]] const GenesisSpec& genesis() const noexcept { return genesis_; }
    [[nodiscard]] const CidResolver& resolver() const noexcept { return resolver_; }

    // Fault-injection access for tamper tests.
    WorldState& mutable_state_for_testing() noexcept { return state_; }
    std::vector<Block>& mutable_blocks_for_testing() noexcept { return blocks_; }

private:
    Chain() = default;

    GenesisSpec genesis_;
    CidResolver resolver_;
    std::vector<Block> blocks_;
    WorldState state_;
};

struct ChainReport {
    bool ok = true;
    std::optional<std::uint64_t> height;  // first offending height
    std::string finding;
};

/// Replays `blocks` from `genesis`, checking height, parent links, timestamps,
/// tx_root and state_root block by block. `replayed` receives the state after
/// the last block that replayed cleanly.
[[nodiscard]] ChainReport replay_blocks(const GenesisSpec& genesis, const std::vector<Block>& blocks,
                                        const CidResolver& resolver, WorldState& replayed);

/// Replays every batch from genesis and reports the first height whose parent
/// link, timestamp, tx_root or state_root disagrees, then checks the live
/// state against the replayed tip.
[[nodiscard]] ChainReport verify_chain(const Chain& chain);

}  // namespace flowledger
