#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "flowledger/error.hpp"
#include "flowledger/harness.hpp"
#include "support/fixtures.hpp"

using namespace flowledger;
namespace fs = std::filesystem;

TEST_CASE("generator is deterministic") {
    for (auto p : {Profile::UavLike, Profile::UgvLike}) {
        auto a = canonical_json(generate_dataset({p, 0, 7, false}));
        auto b = canonical_json(generate_dataset({p, 0, 7, false}));
        CHECK(a == b);
        CHECK(a != canonical_json(generate_dataset({p, 0, 8, false})));
    }
}

TEST_CASE("generated datasets have the profile shapes") {
    auto uav = generate_dataset({Profile::UavLike, 0, 42, false});
    CHECK(uav.at("elements").size() == 104);
    auto ugv = generate_dataset({Profile::UgvLike, 0, 42, false});
    std::set<std::string> types;
    for (const auto& e : ugv.at("elements")) types.insert(e.at("type").get<std::string>());
    for (const auto& s : ugv.at("snapshots")) {
        CHECK(s.at("lod") == "aggregate");
        for (const auto& e : s.at("progress")) CHECK(types.contains(e.at("key").get<std::string>()));
    }
    for (const auto& doc : {uav, ugv}) {
        CHECK(doc.at("snapshots").size() == 4);
        std::map<std::pair<std::string, std::string>, std::uint32_t> last;
        for (const auto& s : doc.at("snapshots")) {
            for (const auto& e : s.at("progress")) {
                auto& prev = last[{e.at("key").get<std::string>(), e.at("trade").get<std::string>()}];
                auto bp = e.at("bp").get<std::uint32_t>();
                CHECK(bp >= prev);
                CHECK(bp <= 10000u);
                prev = bp;
            }
        }
    }
    auto divisible = generate_dataset({Profile::UavLike, 10, 1, true});
    for (const auto& v : divisible.at("schedule_of_values")) CHECK(v.at("value_cents").get<std::uint64_t>() % 10000 == 0);
}

TEST_CASE("paper test numbering") {
    std::set<int> seen;
    for (auto p : {Profile::UgvLike, Profile::UavLike}) {
        for (const auto& c : GranularityConfig::all()) seen.insert(paper_test_number(p, c));
    }
    CHECK(seen.size() == 16);
    CHECK(paper_test_number(Profile::UgvLike, {}) == 1);
    // UGV tests 4, 5, 7, 8 are exactly the high product configs.
    std::set<int> high_product;
    for (const auto& c : GranularityConfig::all()) {
        if (c.product == Level::High) high_product.insert(paper_test_number(Profile::UgvLike, c));
    }
    CHECK(high_product == std::set<int>{4, 5, 7, 8});
}

namespace {

struct SmallRun {
    testsupport::TempDir dir{"run"};
    MatrixResult result;

    SmallRun() {
        write_text_file(dir / "uav.json", canonical_json(generate_dataset({Profile::UavLike, 8, 1, false})) + "\n");
        write_text_file(dir / "ugv.json", canonical_json(generate_dataset({Profile::UgvLike, 9, 1, false})) + "\n");
        MatrixOptions opt;
        opt.datasets = {dir / "uav.json", dir / "ugv.json"};
        opt.out = dir / "out";
        opt.seed = 1;
        result = run_matrix(opt);
    }
};

}  // namespace

TEST_CASE("matrix run, report and verify") {
    SmallRun run;
    CHECK(run.result.scenarios.size() == 16);
    for (const auto& c : run.result.report.at("checks")) CHECK(c.at("passed").get<bool>());
    CHECK(fs::exists(run.dir / "out" / "manifest.json"));
    CHECK(fs::exists(run.dir / "out" / "uav" / "scenario-8" / "chain.jsonl"));

    auto outcome = verify_run(run.dir / "out");
    for (const auto& f : outcome.findings) MESSAGE(f);
    CHECK(outcome.ok);
    CHECK(outcome.scenarios_checked == 16);

    auto md = render_report_markdown(run.result.report);
    CHECK(md.find("| uav | 1 |") != std::string::npos);
    auto csv = render_report_csv(run.result.report);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);

    SUBCASE("flipped transaction byte names the block") {
        auto path = run.dir / "out" / "uav" / "scenario-3" / "chain.jsonl";
        auto text = read_text_file(path);
        auto line2 = text.find('\n', text.find('\n') + 1) + 1;  // block 2
        auto pos = text.find("\"amount\":\"", line2) + 10;
        text[pos] = text[pos] == '9' ? '8' : static_cast<char>(text[pos] + 1);
        write_text_file(path, text);
        auto bad = verify_run(run.dir / "out");
        CHECK_FALSE(bad.ok);
        REQUIRE_FALSE(bad.findings.empty());
        CHECK(bad.findings[0].find("block 2") != std::string::npos);
    }
    SUBCASE("deleted evidence names the cid") {
        auto dir = run.dir / "out" / "uav" / "scenario-1";
        auto dataset = read_canonical_file(dir / "dataset.json");
        auto cid = Cid::parse(dataset.at("payments")[0].at("evidence_cid").get<std::string>());
        fs::remove(dir / "store" / cid.digest.hex());
        auto bad = verify_run(run.dir / "out");
        CHECK_FALSE(bad.ok);
        bool named = false;
        for (const auto& f : bad.findings) named = named || f.find(cid.str()) != std::string::npos;
        CHECK(named);
    }
}

TEST_CASE("report metrics match a one-pass count over each csv") {
    SmallRun run;
    auto same = [](const std::string& frac, std::uint64_t num, std::uint64_t den) {
        auto slash = frac.find('/');
        auto n = std::stoull(frac.substr(0, slash)), d = std::stoull(frac.substr(slash + 1));
        return den == 0 ? n == 0 : n * den == num * d;
    };
    for (const auto& row : run.result.report.at("rows")) {
        std::istringstream csv(read_text_file(run.dir / "out" / row.at("dir").get<std::string>() / "payments.csv"));
        std::string line;
        std::getline(csv, line);
        std::uint64_t payments = 0, trade_slots = 0, elements = 0;
        std::set<std::string> trades;
        while (std::getline(csv, line)) {
            std::vector<std::string> cols;
            std::stringstream ss(line);
            for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
            REQUIRE(cols.size() == 8);
            ++payments;
            std::stringstream ts(cols[3]);
            for (std::string t; std::getline(ts, t, ';');) {
                trades.insert(t);
                ++trade_slots;
            }
            elements += std::stoull(cols[4]);
        }
        const auto& m = row.at("metrics");
        CHECK(row.at("payments").get<std::uint64_t>() == payments);
        CHECK(same(m.at("payments_per_trade_per_month").get<std::string>(), payments, trades.size()));
        CHECK(same(m.at("mean_payees_per_payment").get<std::string>(), trade_slots, payments));
        CHECK(same(m.at("mean_elements_per_payment").get<std::string>(), elements, payments));
    }
}
