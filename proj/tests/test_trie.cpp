#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "flowledger/error.hpp"
#include "flowledger/trie.hpp"
#include "support/fixtures.hpp"
#include "support/sha256_ref.hpp"

using namespace flowledger;
using testsupport::random_bytes;

namespace {
Bytes b(std::string_view s) { return to_bytes(s); }
}

TEST_CASE("empty map") {
    AuthenticatedMap m;
    CHECK(m.empty());
    CHECK_FALSE(m.get(b("k")).has_value());
    // Empty root is the hash of a lone leaf tag byte.
    auto expect = testsupport::sha256_ref(std::vector<std::uint8_t>{0x00});
    CHECK(std::equal(expect.begin(), expect.end(), m.root_hash().bytes.begin()));
    CHECK(m.root_hash() == AuthenticatedMap::empty_root());
}

TEST_CASE("put and get") {
    AuthenticatedMap m;
    auto m1 = m.put(b("k"), b("v"));
    CHECK(m1.get(b("k")) == b("v"));
    CHECK(m.empty());  // snapshots are persistent
    auto m2 = m1.put(b("k"), b("w"));
    CHECK(m2.get(b("k")) == b("w"));
    CHECK(m2.size() == 1);
    CHECK(m1.root_hash() != m2.root_hash());
}

TEST_CASE("key limits") {
    AuthenticatedMap m;
    CHECK_THROWS_AS((void)m.put(Bytes{}, b("v")), Error);
    try {
        (void)m.put(Bytes{}, b("v"));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyKey);
    }
    Bytes long_key(65, 0xAA);
    try {
        (void)m.put(long_key, b("v"));
        FAIL("expected KeyTooLong");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::KeyTooLong);
    }
    CHECK_NOTHROW((void)m.put(Bytes(64, 0xAA), b("v")));
}

TEST_CASE("all six insertion orders of three entries agree") {
    std::vector<std::pair<Bytes, Bytes>> entries = {{b("a"), b("1")}, {b("ab"), b("2")}, {b("c"), b("3")}};
    std::vector<int> idx = {0, 1, 2};
    std::optional<Digest> root;
    int orders = 0;
    do {
        AuthenticatedMap m;
        for (int i : idx) m.assign(entries[i].first, entries[i].second);
        if (!root) root = m.root_hash();
        CHECK(m.root_hash() == *root);
        ++orders;
    } while (std::next_permutation(idx.begin(), idx.end()));
    CHECK(orders == 6);
}

TEST_CASE("prefix keys and values on branches") {
    AuthenticatedMap m;
    m.assign(b("do"), b("verb"));
    m.assign(b("dog"), b("puppy"));
    m.assign(b("doge"), b("coin"));
    m.assign(b("horse"), b("stallion"));
    CHECK(m.get(b("do")) == b("verb"));
    CHECK(m.get(b("dog")) == b("puppy"));
    CHECK(m.get(b("doge")) == b("coin"));
    CHECK_FALSE(m.get(b("d")).has_value());
    CHECK_FALSE(m.get(b("dogs")).has_value());
    for (auto key : {"do", "dog", "doge", "horse"}) {
        auto proof = m.prove(b(key));
        CHECK(verify_proof(m.root_hash(), b(key), *m.get(b(key)), proof));
    }
}

TEST_CASE("proofs") {
    std::mt19937_64 rng(7);
    AuthenticatedMap m;
    std::vector<Bytes> keys;
    for (int i = 0; i < 200; ++i) {
        auto k = random_bytes(rng, 1, 8);
        m.assign(k, random_bytes(rng, 0, 40));
        keys.push_back(k);
    }
    const auto root = m.root_hash();
    for (const auto& k : keys) {
        auto v = *m.get(k);
        auto proof = m.prove(k);
        CHECK(verify_proof(root, k, v, proof));
        auto other = AuthenticatedMap{}.put(b("x"), b("y")).root_hash();
        CHECK_FALSE(verify_proof(other, k, v, proof));
    }

    SUBCASE("altered values are rejected") {
        const auto& k = keys.front();
        auto v = *m.get(k);
        auto proof = m.prove(k);
        for (int i = 0; i < 100; ++i) {
            Bytes forged = v;
            if (forged.empty() || rng() % 3 == 0) {
                forged.push_back(static_cast<std::uint8_t>(rng()));
            } else {
                forged[rng() % forged.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
            }
            CHECK_FALSE(verify_proof(root, k, forged, proof));
        }
    }

    SUBCASE("absent key") {
        try {
            (void)m.prove(Bytes(40, 0xEE));
            FAIL("expected AbsentKey");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::AbsentKey);
        }
    }

    SUBCASE("truncated or corrupted proofs are rejected") {
        const auto& k = keys[3];
        auto v = *m.get(k);
        auto proof = m.prove(k);
        auto shorter = proof;
        shorter.path.pop_back();
        CHECK_FALSE(verify_proof(root, k, v, shorter));
        auto corrupted = proof;
        corrupted.path.back().node.push_back(0);
        CHECK_FALSE(verify_proof(root, k, v, corrupted));
        CHECK_FALSE(verify_proof(root, k, v, InclusionProof{}));
    }
}

TEST_CASE("single-entry mutation always changes the root") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 8; ++n) {
        AuthenticatedMap m;
        std::map<Bytes, Bytes> model;
        while (model.size() < static_cast<std::size_t>(n)) {
            auto k = random_bytes(rng, 1, 3);
            auto v = random_bytes(rng, 1, 4);
            model[k] = v;
            m.assign(k, v);
        }
        for (const auto& [k, v] : model) {
            for (std::size_t byte = 0; byte < v.size(); ++byte) {
                for (int bit = 0; bit < 8; ++bit) {
                    Bytes flipped = v;
                    flipped[byte] ^= static_cast<std::uint8_t>(1u << bit);
                    CHECK(m.put(k, flipped).root_hash() != m.root_hash());
                }
            }
        }
    }
}

TEST_CASE("for_each visits keys in order") {
    AuthenticatedMap m;
    std::map<Bytes, Bytes> model;
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        auto k = random_bytes(rng, 1, 5);
        auto v = random_bytes(rng, 0, 5);
        model[k] = v;
        m.assign(k, v);
    }
    std::vector<std::pair<Bytes, Bytes>> seen;
    m.for_each([&](const Bytes& k, const Bytes& v) { seen.emplace_back(k, v); });
    CHECK(seen == std::vector<std::pair<Bytes, Bytes>>(model.begin(), model.end()));
    CHECK(m.size() == model.size());
}
