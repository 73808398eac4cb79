#include "flowledger/ledger.hpp"

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
constexpr std::uint8_t kAccountTag = 0xA0;
constexpr std::uint8_t kTransactionTag = 0xB0;
constexpr std::uint8_t kTokenTransferTag = 0xC1;
constexpr std::uint8_t kLienMintTag = 0xC2;
constexpr std::uint8_t kContractCallTag = 0xC3;
constexpr std::uint8_t kHeaderTag = 0xD0;

Digest code_hash_for(std::string_view kind) { return sha256("flowledger:code:" + std::string(kind)); }
}  // namespace

const Digest& fungible_code_hash() {
    static const Digest d = code_hash_for("fungible-token");
    return d;
}
const Digest& lien_registry_code_hash() {
    static const Digest d = code_hash_for("lien-registry");
    return d;
}
const Digest& escrow_code_hash() {
    static const Digest d = code_hash_for("payment-escrow");
    return d;
}

// --- Account ---------------------------------------------------------------

Bytes Account::encode() const {
    return RecordWriter(kAccountTag)
        .field_u64(nonce)
        .field_u128(balance)
        .field(storage_root.view())
        .field(code_hash.view())
        .finish();
}

Account Account::decode(ByteView data) {
    Record rec = parse_record(data);
    if (rec.tag != kAccountTag || rec.fields.size() != 4) throw Error(Errc::Malformed, "not an account record");
    Account a;
    a.nonce = rec.u64(0);
    a.balance = rec.u128_at(1);
    a.storage_root = Digest::from_view(rec.at(2));
    a.code_hash = Digest::from_view(rec.at(3));
    return a;
}

// --- Transaction -----------------------------------------------------------

std::string_view tx_kind_name(TxKind kind) noexcept {
    switch (kind) {
        case TxKind::NativeTransfer: return "native_transfer";
        case TxKind::TokenTransfer: return "token_transfer";
        case TxKind::LienMintTransfer: return "lien_mint_transfer";
        case TxKind::ContractCall: return "contract_call";
    }
    return "unknown";
}

TxKind tx_kind_from_name(std::string_view name) {
    for (auto k : {TxKind::NativeTransfer, TxKind::TokenTransfer, TxKind::LienMintTransfer, TxKind::ContractCall}) {
        if (tx_kind_name(k) == name) return k;
    }
    throw Error(Errc::Malformed, "unknown transaction kind " + std::string(name));
}

Bytes Transaction::encode() const {
    RecordWriter w(kTransactionTag);
    w.field(from.view()).field(to.view()).field_u8(static_cast<std::uint8_t>(kind)).field_u128(amount).field(payload);
    if (evidence_cid) {
        w.field(evidence_cid->binary());
    } else {
        w.field(ByteView{});
    }
    w.field_u64(nonce);
    return w.finish();
}

Transaction Transaction::decode(ByteView data) {
    Record rec = parse_record(data);
    if (rec.tag != kTransactionTag || rec.fields.size() != 7) throw Error(Errc::Malformed, "not a transaction record");
    Transaction tx;
    tx.from = Address::from_view(rec.at(0));
    tx.to = Address::from_view(rec.at(1));
    auto kind = rec.u8(2);
    if (kind > static_cast<std::uint8_t>(TxKind::ContractCall)) throw Error(Errc::Malformed, "bad transaction kind");
    tx.kind = static_cast<TxKind>(kind);
    tx.amount = rec.u128_at(3);
    tx.payload = rec.at(4);
    if (!rec.at(5).empty()) tx.evidence_cid = Cid::from_binary(rec.at(5));
    tx.nonce = rec.u64(6);
    return tx;
}

Bytes encode_payload(const TokenTransferPayload& p) {
    return RecordWriter(kTokenTransferTag).field(p.contract.view()).finish();
}
Bytes encode_payload(const LienMintPayload& p) {
    return RecordWriter(kLienMintTag).field(p.registry.view()).field(p.uri_cid.binary()).field(p.scope).finish();
}
Bytes encode_payload(const ContractCallPayload& p) {
    return RecordWriter(kContractCallTag)
        .field_u8(static_cast<std::uint8_t>(p.op))
        .field(p.recipient.view())
        .field_u64(p.token_id)
        .finish();
}

TokenTransferPayload decode_token_transfer(ByteView payload) {
    Record rec = parse_record(payload);
    if (rec.tag != kTokenTransferTag || rec.fields.size() != 1) throw Error(Errc::Malformed, "bad token transfer payload");
    return {Address::from_view(rec.at(0))};
}
LienMintPayload decode_lien_mint(ByteView payload) {
    Record rec = parse_record(payload);
    if (rec.tag != kLienMintTag || rec.fields.size() != 3) throw Error(Errc::Malformed, "bad lien mint payload");
    return {Address::from_view(rec.at(0)), Cid::from_binary(rec.at(1)), std::string(rec.at(2).begin(), rec.at(2).end())};
}
ContractCallPayload decode_contract_call(ByteView payload) {
    Record rec = parse_record(payload);
    if (rec.tag != kContractCallTag || rec.fields.size() != 3) throw Error(Errc::Malformed, "bad contract call payload");
    ContractCallPayload p;
    auto op = rec.u8(0);
    if (op != 1 && op != 2) throw Error(Errc::Malformed, "unknown contract call op");
    p.op = static_cast<CallOp>(op);
    p.recipient = Address::from_view(rec.at(1));
    p.token_id = rec.u64(2);
    return p;
}

Digest AtomicBatch::batch_id() const {
    Bytes ids;
    for (const auto& tx : transactions) {
        auto id = tx.id();
        ids.insert(ids.end(), id.bytes.begin(), id.bytes.end());
    }
    return sha256(ids);
}

// --- WorldState ------------------------------------------------------------

void WorldState::commit(const Address& address, const Account& account) {
    accounts_[address] = account;
    trie_.assign(address.view(), account.encode());
}

void WorldState::overwrite_account(const Address& address, const Account& account) { commit(address, account); }

void WorldState::create_account(const Address& address, u128 initial_balance, const Digest& code_hash) {
    if (address.is_reserved()) throw Error(Errc::ReservedAddress, "the zero address is reserved");
    if (accounts_.contains(address)) throw Error(Errc::AddressInUse, address.hex());
    Account a;
    a.balance = initial_balance;
    a.code_hash = code_hash;
    commit(address, a);
}

void WorldState::deploy_fungible(const Address& contract, const Address& owner) {
    create_account(contract, 0, fungible_code_hash());
    fungibles_.emplace(contract, FungibleLedger(contract, owner));
}

void WorldState::deploy_lien_registry(const Address& contract, const Address& minter) {
    create_account(contract, 0, lien_registry_code_hash());
    liens_.emplace(contract, LienRegistry(contract, minter));
}

void WorldState::sync_storage(const Address& contract, const Digest& storage_root) {
    Account a = accounts_.at(contract);
    a.storage_root = storage_root;
    commit(contract, a);
}

void WorldState::genesis_mint(const Address& contract, const Address& to, u128 amount) {
    auto it = fungibles_.find(contract);
    if (it == fungibles_.end()) throw Error(Errc::UnknownContract, contract.hex());
    it->second.mint(to, amount);
    sync_storage(contract, it->second.storage_root());
}

const Account* WorldState::find(const Address& address) const {
    auto it = accounts_.find(address);
    return it == accounts_.end() ? nullptr : &it->second;
}

u128 WorldState::balance(const Address& address) const {
    const auto* a = find(address);
    return a ? a->balance : 0;
}

std::uint64_t WorldState::nonce(const Address& address) const {
    const auto* a = find(address);
    return a ? a->nonce : 0;
}

const FungibleLedger& WorldState::fungible(const Address& contract) const {
    auto it = fungibles_.find(contract);
    if (it == fungibles_.end()) throw Error(Errc::UnknownContract, "no fungible token at " + contract.hex());
    return it->second;
}

const LienRegistry& WorldState::liens(const Address& contract) const {
    auto it = liens_.find(contract);
    if (it == liens_.end()) throw Error(Errc::UnknownContract, "no lien registry at " + contract.hex());
    return it->second;
}

AuthenticatedMap WorldState::storage_of(const Address& address) const {
    if (auto f = fungibles_.find(address); f != fungibles_.end()) return f->second.storage();
    if (auto l = liens_.find(address); l != liens_.end()) return l->second.storage();
    return {};
}

u128 WorldState::native_supply() const {
    u128 total = 0;
    for (const auto& [_, a] : accounts_) total += a.balance;
    return total;
}

Account& WorldState::sender(const Transaction& tx) {
    auto it = accounts_.find(tx.from);
    if (it == accounts_.end()) throw Error(Errc::UnknownSender, tx.from.hex());
    if (it->second.nonce != tx.nonce) {
        throw Error(Errc::NonceMismatch, "expected nonce " + std::to_string(it->second.nonce) + ", got " +
                                             std::to_string(tx.nonce));
    }
    return it->second;
}

void WorldState::apply(const Transaction& tx, const CidResolver& resolver) {
    Account from = sender(tx);
    switch (tx.kind) {
        case TxKind::NativeTransfer: {
            if (tx.to.is_reserved()) throw Error(Errc::ReservedAddress, "cannot transfer to the zero address");
            if (from.balance < tx.amount) {
                throw Error(Errc::InsufficientFunds, tx.from.hex() + " has " + u128_to_string(from.balance) +
                                                         ", needs " + u128_to_string(tx.amount));
            }
            if (tx.to != tx.from) {
                if (!accounts_.contains(tx.to)) create_account(tx.to, 0);
                Account to = accounts_.at(tx.to);
                to.balance += tx.amount;
                commit(tx.to, to);
                from.balance -= tx.amount;
            }
            break;
        }
        case TxKind::TokenTransfer: {
            auto payload = decode_token_transfer(tx.payload);
            auto it = fungibles_.find(payload.contract);
            if (it == fungibles_.end()) throw Error(Errc::UnknownContract, payload.contract.hex());
            if (tx.to.is_reserved()) throw Error(Errc::ReservedAddress, "cannot transfer tokens to the zero address");
            it->second.transfer(tx.from, tx.to, tx.amount);
            sync_storage(payload.contract, it->second.storage_root());
            break;
        }
        case TxKind::LienMintTransfer: {
            auto payload = decode_lien_mint(tx.payload);
            auto it = liens_.find(payload.registry);
            if (it == liens_.end()) throw Error(Errc::UnknownContract, payload.registry.hex());
            if (it->second.minter() != tx.from) throw Error(Errc::Unauthorized, tx.from.hex() + " may not mint liens");
            if (tx.amount != 0) throw Error(Errc::Malformed, "lien mint carries no amount");
            if (tx.to.is_reserved()) throw Error(Errc::ReservedAddress, "cannot mint a lien to the zero address");
            it->second.mint_and_transfer(tx.to, payload.uri_cid, payload.scope, resolver);
            sync_storage(payload.registry, it->second.storage_root());
            break;
        }
        case TxKind::ContractCall: {
            auto call = decode_contract_call(tx.payload);
            if (call.op == CallOp::FungibleMint) {
                auto it = fungibles_.find(tx.to);
                if (it == fungibles_.end()) throw Error(Errc::UnknownContract, tx.to.hex());
                if (it->second.owner() != tx.from) throw Error(Errc::Unauthorized, tx.from.hex() + " may not mint");
                it->second.mint(call.recipient, tx.amount);
                sync_storage(tx.to, it->second.storage_root());
            } else {
                auto it = liens_.find(tx.to);
                if (it == liens_.end()) throw Error(Errc::UnknownContract, tx.to.hex());
                if (call.recipient.is_reserved()) throw Error(Errc::ReservedAddress, "cannot transfer a lien to zero");
                it->second.transfer(call.token_id, tx.from, call.recipient);
                sync_storage(tx.to, it->second.storage_root());
            }
            break;
        }
    }
    // Re-read: the sender may also have been the recipient of a storage sync.
    Account updated = accounts_.at(tx.from);
    updated.balance = from.balance;
    updated.nonce = from.nonce + 1;
    commit(tx.from, updated);
}

WorldState execute_atomic_batch(const WorldState& state, const AtomicBatch& batch, const CidResolver& resolver) {
    if (batch.transactions.empty()) throw Error(Errc::EmptyBatch, "atomic batch has no transactions");
    WorldState next = state;
    for (std::size_t i = 0; i < batch.transactions.size(); ++i) {
        try {
            next.apply(batch.transactions[i], resolver);
        } catch (const Error& e) {
            throw BatchAborted(i, e.code(), e.what());
        }
    }
    return next;
}

// --- Block / Chain -----------------------------------------------------------

Bytes Block::header_encoding() const {
    Bytes layout;
    for (const auto& b : batches) put_be32(layout, static_cast<std::uint32_t>(b.transactions.size()));
    return RecordWriter(kHeaderTag)
        .field_u64(height)
        .field(parent.view())
        .field(state_root.view())
        .field(tx_root.view())
        .field_u64(timestamp)
        .field(layout)
        .finish();
}

Digest Block::compute_tx_root() const {
    AuthenticatedMap txs;
    std::uint32_t index = 0;
    for (const auto& b : batches) {
        for (const auto& tx : b.transactions) txs.assign(be32(index++), tx.encode());
    }
    return txs.root_hash();
}

std::size_t Block::transaction_count() const {
    std::size_t n = 0;
    for (const auto& b : batches) n += b.transactions.size();
    return n;
}

WorldState GenesisSpec::build() const {
    WorldState s;
    for (const auto& a : accounts) s.create_account(a.address, a.balance, a.code_hash);
    for (const auto& f : fungibles) {
        s.deploy_fungible(f.contract, f.owner);
        for (const auto& [to, amount] : f.mints) s.genesis_mint(f.contract, to, amount);
    }
    for (const auto& l : lien_registries) s.deploy_lien_registry(l.contract, l.minter);
    return s;
}

Chain::Chain(GenesisSpec genesis, CidResolver resolver)
    : genesis_(std::move(genesis)), resolver_(std::move(resolver)), state_(genesis_.build()) {
    Block b0;
    b0.state_root = state_.root();
    b0.tx_root = b0.compute_tx_root();
    b0.timestamp = genesis_.timestamp;
    blocks_.push_back(std::move(b0));
}

Chain Chain::from_parts(GenesisSpec genesis, std::vector<Block> blocks, WorldState state, CidResolver resolver) {
    Chain c;
    c.genesis_ = std::move(genesis);
    c.resolver_ = std::move(resolver);
    c.blocks_ = std::move(blocks);
    c.state_ = std::move(state);
    return c;
}

const Block& Chain::seal_block(std::vector<AtomicBatch> batches, std::uint64_t timestamp) {
    const Block& prev = tip();
    if (timestamp < prev.timestamp) {
        throw Error(Errc::NonMonotonicTimestamp, std::to_string(timestamp) + " < " + std::to_string(prev.timestamp));
    }
    WorldState next = state_;
    for (const auto& batch : batches) next = execute_atomic_batch(next, batch, resolver_);
    Block b;
    b.height = prev.height + 1;
    b.parent = prev.hash();
    b.timestamp = timestamp;
    b.batches = std::move(batches);
    b.tx_root = b.compute_tx_root();
    b.state_root = next.root();
    state_ = std::move(next);
    blocks_.push_back(std::move(b));
    return blocks_.back();
}

ChainReport replay_blocks(const GenesisSpec& genesis, const std::vector<Block>& blocks, const CidResolver& resolver,
                          WorldState& replay) {
    auto fail = [](std::uint64_t height, std::string finding) {
        return ChainReport{false, height, std::move(finding)};
    };
    if (blocks.empty()) return ChainReport{false, std::nullopt, "chain has no genesis block"};
    try {
        replay = genesis.build();
    } catch (const Error& e) {
        return fail(0, std::string("genesis cannot be rebuilt: ") + e.what());
    }
    Digest prev_hash{};
    std::uint64_t prev_time = 0;
    for (std::size_t h = 0; h < blocks.size(); ++h) {
        const Block& b = blocks[h];
        if (b.height != h) return fail(h, "height field is " + std::to_string(b.height));
        if (b.parent != prev_hash) return fail(h, "parent link mismatch");
        if (h == 0) {
            if (!b.batches.empty()) return fail(0, "genesis block carries batches");
            if (b.timestamp != genesis.timestamp) return fail(0, "genesis timestamp mismatch");
        } else if (b.timestamp < prev_time) {
            return fail(h, "timestamp decreases");
        }
        WorldState next = replay;
        for (std::size_t i = 0; i < b.batches.size(); ++i) {
            try {
                next = execute_atomic_batch(next, b.batches[i], resolver);
            } catch (const Error& e) {
                return fail(h, "batch " + std::to_string(i) + " does not replay: " + e.what());
            }
        }
        if (b.compute_tx_root() != b.tx_root) return fail(h, "tx_root mismatch");
        if (next.root() != b.state_root) return fail(h, "state_root mismatch");
        replay = std::move(next);
        prev_hash = b.hash();
        prev_time = b.timestamp;
    }
    return {};
}

ChainReport verify_chain(const Chain& chain) {
    WorldState replay;
    auto report = replay_blocks(chain.genesis(), chain.blocks(), chain.resolver(), replay);
    if (!report.ok) return report;
    const std::uint64_t tip = chain.blocks().size() - 1;
    if (chain.state().root() != chain.blocks().back().state_root) {
        return {false, tip, "live state_root mismatch at tip"};
    }
    if (chain.state().root() != replay.root()) return {false, tip, "live state differs from replay at tip"};
    return {};
}

}  // namespace flowledger
