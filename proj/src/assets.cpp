#include "flowledger/assets.hpp"

#include "flowledger/error.hpp"

namespace flowledger {

namespace {
constexpr std::uint8_t kLienTokenTag = 0x4C;
constexpr u128 kU128Max = ~static_cast<u128>(0);
}  // namespace

u128 FungibleLedger::balance_of(const Address& holder) const {
    auto it = balances_.find(holder);
    return it == balances_.end() ? 0 : it->second;
}

void FungibleLedger::write(const Address& holder, u128 balance) {
    balances_[holder] = balance;
    storage_.assign(holder.view(), be128(balance));
}

void FungibleLedger::mint(const Address& to, u128 amount) {
    if (amount == 0) return;
    if (amount > kU128Max - total_supply_) {
        throw Error(Errc::SupplyOverflow, "mint of " + u128_to_string(amount) + " overflows total supply");
    }
    total_supply_ += amount;
    write(to, balance_of(to) + amount);
}

void FungibleLedger::transfer(const Address& from, const Address& to, u128 amount) {
    u128 from_balance = balance_of(from);
    if (from_balance < amount) {
        throw Error(Errc::InsufficientTokens, from.hex() + " holds " + u128_to_string(from_balance) +
                                                  ", needs " + u128_to_string(amount));
    }
    if (from == to) {
        // Self-transfer still touches the holder's slot so the key exists in storage.
        write(from, from_balance);
        return;
    }
    write(from, from_balance - amount);
    write(to, balance_of(to) + amount);
}

Bytes LienToken::encode() const {
    return RecordWriter(kLienTokenTag)
        .field_u64(token_id)
        .field(owner.view())
        .field(uri_cid.binary())
        .field(scope)
        .finish();
}

LienToken LienToken::decode(ByteView data) {
    Record rec = parse_record(data);
    if (rec.tag != kLienTokenTag || rec.fields.size() != 4) throw Error(Errc::Malformed, "not a lien token record");
    LienToken t;
    t.token_id = rec.u64(0);
    t.owner = Address::from_view(rec.at(1));
    t.uri_cid = Cid::from_binary(rec.at(2));
    t.scope.assign(rec.at(3).begin(), rec.at(3).end());
    return t;
}

Bytes LienRegistry::storage_key(std::uint64_t token_id) {
    Bytes key{kKeyPrefix};
    put_be64(key, token_id);
    return key;
}

std::uint64_t LienRegistry::mint_and_transfer(const Address& to_owner, const Cid& uri_cid, std::string scope,
                                              const CidResolver& resolver) {
    if (!resolver || !resolver(uri_cid)) {
        throw Error(Errc::UnresolvableCid, uri_cid.str() + " is not resolvable in off-chain storage");
    }
    LienToken t{next_id_, to_owner, uri_cid, std::move(scope)};
    storage_.assign(storage_key(t.token_id), t.encode());
    return next_id_++;
}

void LienRegistry::transfer(std::uint64_t token_id, const Address& from, const Address& to) {
    LienToken t = token(token_id);
    if (t.owner != from) {
        throw Error(Errc::Unauthorized, from.hex() + " does not own lien token " + std::to_string(token_id));
    }
    t.owner = to;
    storage_.assign(storage_key(token_id), t.encode());
}

LienToken LienRegistry::token(std::uint64_t token_id) const {
    auto raw = token_id < next_id_ ? storage_.get(storage_key(token_id)) : std::nullopt;
    if (!raw) throw Error(Errc::UnknownToken, "lien token " + std::to_string(token_id) + " does not exist");
    return LienToken::decode(*raw);
}

}  // namespace flowledger
