#include <doctest.h>

#include <map>
#include <random>

#include "flowledger/assets.hpp"
#include "flowledger/error.hpp"
#include "flowledger/ledger.hpp"
#include "flowledger/store.hpp"

using namespace flowledger;

namespace {

const Address kToken = Address::derive("token");
const Address kOwner = Address::derive("owner");
const Address kEscrow = Address::derive("escrow");

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::Malformed;
}

}  // namespace

TEST_CASE("fungible mint") {
    FungibleLedger ft(kToken, kOwner);
    const auto root = ft.storage_root();
    ft.mint(kEscrow, 0);
    CHECK(ft.total_supply() == 0);
    CHECK(ft.storage_root() == root);
    ft.mint(kEscrow, 1'000'000);
    CHECK(ft.total_supply() == 1'000'000);
    CHECK(ft.balance_of(kEscrow) == 1'000'000);
    const u128 max = ~u128{0};
    CHECK(code_of([&] { ft.mint(kOwner, max); }) == Errc::SupplyOverflow);
    CHECK(ft.total_supply() == 1'000'000);
}

TEST_CASE("fungible storage layout") {
    FungibleLedger ft(kToken, kOwner);
    ft.mint(kEscrow, 300);
    auto stored = ft.storage().get(kEscrow.view());
    REQUIRE(stored);
    Bytes expect;
    put_be128(expect, 300);
    CHECK(*stored == expect);
}

TEST_CASE("fungible transfers") {
    FungibleLedger ft(kToken, kOwner);
    ft.mint(kEscrow, 1000);
    ft.transfer(kEscrow, kOwner, 250);
    ft.transfer(kOwner, kEscrow, 250);
    CHECK(ft.balance_of(kEscrow) == 1000);
    CHECK(ft.balance_of(kOwner) == 0);

    const auto root = ft.storage_root();
    CHECK(code_of([&] { ft.transfer(kEscrow, kOwner, 1001); }) == Errc::InsufficientTokens);
    CHECK(ft.storage_root() == root);
    CHECK(ft.balance_of(kEscrow) == 1000);
}

TEST_CASE("fungible conservation over random transfers") {
    std::mt19937_64 rng(99);
    std::vector<Address> holders;
    for (int i = 0; i < 8; ++i) holders.push_back(Address::derive("h" + std::to_string(i)));
    FungibleLedger ft(kToken, kOwner);
    u128 running = 0;
    for (const auto& h : holders) {
        auto amt = rng() % 10'000;
        ft.mint(h, amt);
        running += amt;
    }
    for (int i = 0; i < 1000; ++i) {
        const auto& from = holders[rng() % holders.size()];
        const auto& to = holders[rng() % holders.size()];
        auto bal = static_cast<std::uint64_t>(ft.balance_of(from));
        ft.transfer(from, to, bal ? rng() % (bal + 1) : 0);
        u128 sum = 0;
        for (const auto& [_, v] : ft.balances()) sum += v;
        REQUIRE(sum == running);
        REQUIRE(ft.total_supply() == running);
    }
}

TEST_CASE("lien registry") {
    ContentStore store;
    auto c1 = store.put(std::string_view("bundle-1"));
    auto c2 = store.put(std::string_view("bundle-2"));
    CidResolver resolver = [&](const Cid& c) { return store.resolves(c); };
    LienRegistry reg(Address::derive("liens"), kEscrow);

    auto id0 = reg.mint_and_transfer(kOwner, c1, "{\"s\":1}", resolver);
    auto id1 = reg.mint_and_transfer(kOwner, c2, "{\"s\":2}", resolver);
    CHECK(id1 == id0 + 1);
    CHECK(reg.owner_of(id0) == kOwner);
    CHECK(reg.owner_of(id1) == kOwner);
    CHECK(reg.token_uri(id0) == c1);
    CHECK(code_of([&] { (void)reg.token(reg.next_id()); }) == Errc::UnknownToken);
    CHECK(code_of([&] { (void)reg.mint_and_transfer(kOwner, Cid::of(as_bytes(std::string_view("missing"))), "{}", resolver); }) ==
          Errc::UnresolvableCid);

    auto stored = reg.storage().get(LienRegistry::storage_key(id0));
    REQUIRE(stored);
    CHECK(LienToken::decode(*stored) == reg.token(id0));
    CHECK(LienRegistry::storage_key(id0)[0] == 0x4C);

    SUBCASE("transfer moves only the named token") {
        const Address b = Address::derive("bank");
        auto before = reg.storage_root();
        reg.transfer(id0, kOwner, b);
        CHECK(reg.owner_of(id0) == b);
        CHECK(reg.token_uri(id0) == c1);
        CHECK(reg.owner_of(id1) == kOwner);
        CHECK(reg.token_uri(id1) == c2);
        CHECK(reg.storage_root() != before);
        CHECK(code_of([&] { reg.transfer(id0, kOwner, b); }) == Errc::Unauthorized);
    }
}

TEST_CASE("lien model: ownership and URIs under random transfers") {
    ContentStore store;
    CidResolver resolver = [&](const Cid& c) { return store.resolves(c); };
    LienRegistry reg(Address::derive("liens"), kEscrow);
    std::vector<Address> people;
    for (int i = 0; i < 5; ++i) people.push_back(Address::derive("p" + std::to_string(i)));
    std::map<std::uint64_t, std::pair<Address, Cid>> model;
    std::mt19937_64 rng(17);
    for (int i = 0; i < 30; ++i) {
        auto cid = store.put("bundle " + std::to_string(i));
        auto owner = people[rng() % people.size()];
        model[reg.mint_and_transfer(owner, cid, "{}", resolver)] = {owner, cid};
    }
    for (int step = 0; step < 500; ++step) {
        auto id = rng() % model.size();
        auto to = people[rng() % people.size()];
        reg.transfer(id, model[id].first, to);
        model[id].first = to;
        for (const auto& [tid, oc] : model) {
            REQUIRE(reg.owner_of(tid) == oc.first);
            REQUIRE(reg.token_uri(tid) == oc.second);
        }
    }
}

TEST_CASE("contract storage roots follow asset state") {
    ContentStore store;
    auto cid = store.put(std::string_view("evidence"));
    CidResolver resolver = [&](const Cid& c) { return store.resolves(c); };
    GenesisSpec g;
    g.accounts = {{kOwner, 0, {}}, {kEscrow, 0, escrow_code_hash()}};
    g.fungibles = {{kToken, kOwner, {{kEscrow, 1000}}}};
    g.lien_registries = {{Address::derive("liens"), kEscrow}};
    WorldState s = g.build();
    CHECK(s.find(kToken)->storage_root == s.fungible(kToken).storage_root());
    CHECK(s.find(kToken)->code_hash == fungible_code_hash());

    Transaction tt;
    tt.from = kEscrow;
    tt.to = kOwner;
    tt.kind = TxKind::TokenTransfer;
    tt.amount = 400;
    tt.payload = encode_payload(TokenTransferPayload{kToken});
    tt.evidence_cid = cid;
    const auto before = s.find(kToken)->storage_root;
    s.apply(tt, resolver);
    CHECK(s.fungible(kToken).balance_of(kOwner) == 400);
    CHECK(s.find(kToken)->storage_root == s.fungible(kToken).storage_root());
    CHECK(s.find(kToken)->storage_root != before);
    CHECK(s.fungible(kToken).total_supply() == 1000);

    Transaction call;
    call.from = kOwner;
    call.to = kToken;
    call.kind = TxKind::ContractCall;
    call.amount = 5;
    call.payload = encode_payload(ContractCallPayload{CallOp::FungibleMint, kOwner, 0});
    s.apply(call, resolver);
    CHECK(s.fungible(kToken).total_supply() == 1005);

    call.from = kEscrow;
    call.nonce = s.nonce(kEscrow);
    CHECK(code_of([&] { s.apply(call, resolver); }) == Errc::Unauthorized);
}
