#include <doctest.h>

#include <fstream>

#include "flowledger/canonical_json.hpp"
#include "flowledger/error.hpp"
#include "flowledger/store.hpp"
#include "support/fixtures.hpp"
#include "support/sha256_ref.hpp"

using namespace flowledger;

TEST_CASE("cid text and binary forms") {
    auto cid = Cid::of(as_bytes(std::string_view("abc")));
    CHECK(cid.str() == "cidv1-12-ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(Cid::parse(cid.str()) == cid);
    auto bin = cid.binary();
    CHECK(bin.size() == 34);
    CHECK(bin[0] == 0x01);
    CHECK(bin[1] == 0x12);
    CHECK(Cid::from_binary(bin) == cid);
    CHECK_THROWS_AS((void)Cid::parse("cidv1-12-XYZ"), Error);
    CHECK_THROWS_AS((void)Cid::parse("cidv0-12-" + cid.digest.hex()), Error);
}

TEST_CASE("cid digest matches an independent sha-256") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 200; ++i) {
        auto content = testsupport::random_bytes(rng, 1, 300);
        auto expect = testsupport::sha256_ref(content);
        CHECK(std::equal(expect.begin(), expect.end(), Cid::of(content).digest.bytes.begin()));
    }
}

TEST_CASE("cid format is independent of content length") {
    auto a = Cid::of(as_bytes(std::string_view("x")));
    auto b = Cid::of(Bytes(100000, 7));
    CHECK(a.str().size() == b.str().size());
    CHECK(a.binary().size() == b.binary().size());
}

TEST_CASE("in-memory store") {
    ContentStore s;
    auto x1 = s.put(std::string_view("x"));
    auto x2 = s.put(std::string_view("x"));
    auto y = s.put(std::string_view("y"));
    CHECK(x1 == x2);
    CHECK(x1 != y);
    CHECK(s.size() == 2);
    CHECK(s.get_text(x1) == "x");
    try {
        (void)s.get(Cid::of(as_bytes(std::string_view("z"))));
        FAIL("expected NotFound");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotFound);
    }
    try {
        (void)s.put(Bytes{});
        FAIL("expected EmptyContent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::EmptyContent);
    }
}

TEST_CASE("directory store") {
    testsupport::TempDir dir("store");
    Cid cid;
    {
        ContentStore s(dir.path());
        cid = s.put(std::string_view("hello"));
        CHECK(std::filesystem::exists(dir.path() / cid.digest.hex()));
        CHECK(s.list().size() == 1);
    }
    ContentStore reopened(dir.path());
    CHECK(reopened.contains(cid));
    CHECK(reopened.get_text(cid) == "hello");

    SUBCASE("corruption on disk is caught on read") {
        {
            std::ofstream f(reopened.object_path(cid), std::ios::binary | std::ios::trunc);
            f << "hellp";
        }
        CHECK_FALSE(reopened.resolves(cid));
        try {
            (void)reopened.get(cid);
            FAIL("expected IntegrityFailure");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::IntegrityFailure);
        }
    }
    SUBCASE("deleted objects are not found") {
        std::filesystem::remove(reopened.object_path(cid));
        CHECK_FALSE(reopened.resolves(cid));
        try {
            (void)reopened.get(cid);
            FAIL("expected NotFound");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NotFound);
        }
    }
    SUBCASE("stray files are reported") {
        { std::ofstream(dir.path() / "notes.txt") << "hi"; }
        ContentStore again(dir.path());
        CHECK(again.stray_files().size() == 1);
    }
}

TEST_CASE("canonical json") {
    Json doc = {{"b", 1}, {"a", {{"y", "s"}, {"x", Json::array({3, 2})}}}};
    CHECK(canonical_json(doc) == R"({"a":{"x":[3,2],"y":"s"},"b":1})");
    CHECK(parse_canonical_json(canonical_json(doc)) == doc);
    CHECK_THROWS_AS((void)parse_canonical_json(R"({"b":1,"a":2})"), Error);
    CHECK_THROWS_AS((void)parse_canonical_json(R"({"a": 2})"), Error);
    CHECK_THROWS_AS((void)canonical_json(Json{{"f", 1.5}}), Error);
    CHECK_THROWS_AS((void)parse_canonical_json(R"({"f":1.5})"), Error);
}
