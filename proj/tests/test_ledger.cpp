#include <doctest.h>

#include <random>

#include "flowledger/chain_io.hpp"
#include "flowledger/error.hpp"
#include "flowledger/ledger.hpp"
#include "flowledger/store.hpp"

using namespace flowledger;

namespace {

const Address kA = Address::derive("alice");
const Address kB = Address::derive("bob");
const Address kC = Address::derive("carol");
const Address kRegistry = Address::derive("registry");

Transaction native(const Address& from, const Address& to, u128 amount, std::uint64_t nonce) {
    Transaction tx;
    tx.from = from;
    tx.to = to;
    tx.kind = TxKind::NativeTransfer;
    tx.amount = amount;
    tx.nonce = nonce;
    return tx;
}

GenesisSpec two_party_genesis() {
    GenesisSpec g;
    g.timestamp = 1000;
    g.accounts = {{kA, 1000, {}}, {kB, 500, {}}};
    g.lien_registries = {{kRegistry, kA}};
    return g;
}

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::Malformed;
}

}  // namespace

TEST_CASE("accounts") {
    WorldState s;
    s.create_account(kA, 0);
    REQUIRE(s.find(kA));
    CHECK(s.nonce(kA) == 0);
    CHECK(s.balance(kA) == 0);
    CHECK(code_of([&] { s.create_account(Address{}, 1); }) == Errc::ReservedAddress);
    CHECK(code_of([&] { s.create_account(kA, 1); }) == Errc::AddressInUse);
}

TEST_CASE("account encoding round-trips") {
    Account a;
    a.nonce = 7;
    a.balance = (u128{1} << 100) + 5;
    a.code_hash = sha256(std::string_view("code"));
    CHECK(Account::decode(a.encode()) == a);
}

TEST_CASE("native transfers") {
    WorldState s = two_party_genesis().build();
    const auto none = CidResolver{};

    SUBCASE("full balance") {
        s.apply(native(kA, kC, 1000, 0), none);
        CHECK(s.balance(kA) == 0);
        CHECK(s.balance(kC) == 1000);  // auto-created
        CHECK(s.nonce(kA) == 1);
    }
    SUBCASE("zero amount only bumps the nonce") {
        auto before = s.balance(kA);
        s.apply(native(kA, kB, 0, 0), none);
        CHECK(s.balance(kA) == before);
        CHECK(s.nonce(kA) == 1);
    }
    SUBCASE("A to B 100 then B to A 30") {
        s.apply(native(kA, kB, 100, 0), none);
        s.apply(native(kB, kA, 30, 0), none);
        CHECK(s.balance(kA) == 1000 - 70);
        CHECK(s.balance(kB) == 500 + 70);
    }
    SUBCASE("errors") {
        CHECK(code_of([&] { s.apply(native(kA, kB, 1001, 0), none); }) == Errc::InsufficientFunds);
        CHECK(code_of([&] { s.apply(native(kC, kB, 1, 0), none); }) == Errc::UnknownSender);
        CHECK(code_of([&] { s.apply(native(kA, kB, 1, 5), none); }) == Errc::NonceMismatch);
    }
}

TEST_CASE("atomic batches") {
    const WorldState s = two_party_genesis().build();
    ContentStore store;
    const Cid cid = store.put(std::string_view("evidence"));
    CidResolver resolver = [&](const Cid& c) { return store.resolves(c); };

    Transaction lien;
    lien.from = kA;
    lien.to = kB;
    lien.kind = TxKind::LienMintTransfer;
    lien.payload = encode_payload(LienMintPayload{kRegistry, cid, "{}"});
    lien.evidence_cid = cid;
    lien.nonce = 1;

    SUBCASE("transfer plus lien mint") {
        auto next = execute_atomic_batch(s, AtomicBatch{{native(kA, kB, 10, 0), lien}}, resolver);
        CHECK(next.balance(kB) == 510);
        CHECK(next.liens(kRegistry).owner_of(0) == kB);
        CHECK(next.liens(kRegistry).token_uri(0) == cid);
        CHECK(next.storage_of(kRegistry).root_hash() == next.find(kRegistry)->storage_root);
    }
    SUBCASE("failing second transaction leaves state untouched") {
        const auto root = s.root();
        try {
            (void)execute_atomic_batch(s, AtomicBatch{{native(kA, kB, 10, 0), native(kA, kB, 5000, 1)}}, resolver);
            FAIL("expected BatchAborted");
        } catch (const BatchAborted& e) {
            CHECK(e.index() == 1);
            CHECK(e.cause() == Errc::InsufficientFunds);
        }
        CHECK(s.root() == root);
        CHECK(s.balance(kA) == 1000);
    }
    SUBCASE("one-transaction batch equals direct application") {
        auto direct = s;
        direct.apply(native(kA, kB, 42, 0), resolver);
        auto batched = execute_atomic_batch(s, AtomicBatch{{native(kA, kB, 42, 0)}}, resolver);
        CHECK(direct.root() == batched.root());
    }
    SUBCASE("empty batch") {
        CHECK(code_of([&] { (void)execute_atomic_batch(s, AtomicBatch{}, resolver); }) == Errc::EmptyBatch);
    }
    SUBCASE("unresolvable evidence aborts the batch") {
        auto bad = lien;
        bad.payload = encode_payload(LienMintPayload{kRegistry, Cid::of(as_bytes(std::string_view("nope"))), "{}"});
        try {
            (void)execute_atomic_batch(s, AtomicBatch{{native(kA, kB, 10, 0), bad}}, resolver);
            FAIL("expected BatchAborted");
        } catch (const BatchAborted& e) {
            CHECK(e.index() == 1);
            CHECK(e.cause() == Errc::UnresolvableCid);
        }
    }
}

TEST_CASE("atomicity under random injected failures") {
    std::mt19937_64 rng(5);
    WorldState s = two_party_genesis().build();
    std::uint64_t na = 0, nb = 0;
    const u128 supply = s.native_supply();
    for (int round = 0; round < 300; ++round) {
        AtomicBatch batch;
        const bool poison = rng() % 3 == 0;
        std::uint64_t ta = na, tb = nb;
        const int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) {
            if (rng() % 2) batch.transactions.push_back(native(kA, kB, rng() % 5, ta++));
            else batch.transactions.push_back(native(kB, kA, rng() % 5, tb++));
        }
        if (poison) batch.transactions.insert(batch.transactions.begin() + rng() % (len + 1), native(kA, kB, 1, 999));
        const auto before = s.root();
        try {
            s = execute_atomic_batch(s, batch, {});
            CHECK_FALSE(poison);
            na = ta;
            nb = tb;
        } catch (const BatchAborted&) {
            CHECK(poison);
            CHECK(s.root() == before);
        }
        CHECK(s.native_supply() == supply);
        CHECK(s.nonce(kA) == na);
        CHECK(s.nonce(kB) == nb);
    }
}

TEST_CASE("transaction encoding") {
    auto tx = native(kA, kB, 77, 3);
    tx.evidence_cid = Cid::of(as_bytes(std::string_view("e")));
    CHECK(Transaction::decode(tx.encode()) == tx);
    CHECK(transaction_from_json(transaction_to_json(tx)) == tx);
    auto other = tx;
    other.amount = 78;
    CHECK(other.id() != tx.id());
}

TEST_CASE("blocks and chains") {
    Chain chain(two_party_genesis());
    const auto genesis_root = chain.tip().state_root;

    SUBCASE("empty block keeps the state root") {
        const auto& blk = chain.seal_block({}, 2000);
        CHECK(blk.height == 1);
        CHECK(blk.state_root == genesis_root);
        CHECK(blk.parent == chain.blocks()[0].hash());
        CHECK(blk.tx_root == AuthenticatedMap::empty_root());
    }
    SUBCASE("timestamps must not go backwards") {
        chain.seal_block({}, 2000);
        CHECK(code_of([&] { chain.seal_block({}, 1999); }) == Errc::NonMonotonicTimestamp);
        CHECK(chain.blocks().size() == 2);
    }
    SUBCASE("failed batch leaves the chain unchanged") {
        const auto root = chain.state().root();
        CHECK_THROWS_AS(chain.seal_block({AtomicBatch{{native(kA, kB, 5000, 0)}}}, 2000), BatchAborted);
        CHECK(chain.blocks().size() == 1);
        CHECK(chain.state().root() == root);
    }
    SUBCASE("reordering independent batches changes the tx root") {
        AtomicBatch x{{native(kA, kC, 1, 0)}};
        AtomicBatch y{{native(kB, kC, 2, 0)}};
        Block b1{1, {}, {}, {}, 0, {x, y}};
        Block b2{1, {}, {}, {}, 0, {y, x}};
        CHECK(b1.compute_tx_root() != b2.compute_tx_root());

        // tx_root is the map be32(index) -> encoding.
        AuthenticatedMap expect;
        Bytes k0, k1;
        put_be32(k0, 0);
        put_be32(k1, 1);
        expect.assign(k0, x.transactions[0].encode());
        expect.assign(k1, y.transactions[0].encode());
        CHECK(b1.compute_tx_root() == expect.root_hash());
    }
    SUBCASE("replay on a fresh chain reproduces every header") {
        std::vector<std::vector<AtomicBatch>> plan = {
            {AtomicBatch{{native(kA, kB, 100, 0)}}},
            {AtomicBatch{{native(kB, kA, 30, 0)}}, AtomicBatch{{native(kA, kC, 5, 1)}}},
        };
        Chain other(two_party_genesis());
        std::uint64_t t = 2000;
        for (const auto& batches : plan) {
            chain.seal_block(batches, t);
            other.seal_block(batches, t);
            t += 10;
        }
        REQUIRE(chain.blocks().size() == other.blocks().size());
        for (std::size_t i = 0; i < chain.blocks().size(); ++i) {
            CHECK(chain.blocks()[i].header_encoding() == other.blocks()[i].header_encoding());
        }
        CHECK(verify_chain(chain).ok);
    }
}

TEST_CASE("verify_chain finds tampering") {
    Chain chain(two_party_genesis());
    for (std::uint64_t h = 0; h < 5; ++h) chain.seal_block({AtomicBatch{{native(kA, kB, 10, h)}}}, 2000 + h);
    REQUIRE(verify_chain(chain).ok);

    for (std::uint64_t k = 1; k <= 5; ++k) {
        SUBCASE(("amount mutated in block " + std::to_string(k)).c_str()) {
            chain.mutable_blocks_for_testing()[k].batches[0].transactions[0].amount = 11;
            auto report = verify_chain(chain);
            CHECK_FALSE(report.ok);
            CHECK(report.height == k);
        }
    }
    SUBCASE("state mutated without touching blocks") {
        auto acct = *chain.state().find(kB);
        acct.balance += 1;
        chain.mutable_state_for_testing().overwrite_account(kB, acct);
        auto report = verify_chain(chain);
        CHECK_FALSE(report.ok);
        CHECK(report.height == 5);
    }
}

TEST_CASE("chain export round-trip") {
    Chain chain(two_party_genesis());
    chain.seal_block({AtomicBatch{{native(kA, kB, 10, 0)}}}, 2000);
    auto text = export_chain_jsonl(chain);
    auto back = import_chain_jsonl(text);
    CHECK(back.genesis == chain.genesis());
    CHECK(back.blocks == chain.blocks());

    auto bad = text;
    bad[bad.find("\"amount\":\"10\"") + 11] = '2';
    try {
        (void)import_chain_jsonl(bad);
        FAIL("expected ChainImportError");
    } catch (const ChainImportError& e) {
        CHECK(e.line() == 1);
    }
}
