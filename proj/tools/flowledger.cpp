// flowledger command line: gen | run | verify | report
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "flowledger/error.hpp"
#include "flowledger/harness.hpp"

namespace fs = std::filesystem;
using namespace flowledger;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("FLOWLEDGER_SEED");
    if (!v || !*v) return std::nullopt;
    return std::stoull(v);
}

std::vector<int> parse_configs(const std::string& list) {
    std::vector<int> ids;
    if (list.empty() || list == "all") return {1, 2, 3, 4, 5, 6, 7, 8};
    std::size_t pos = 0;
    while (pos <= list.size()) {
        auto next = list.find(',', pos);
        auto item = list.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        int id = std::stoi(item);
        (void)GranularityConfig::from_scenario_id(id);
        ids.push_back(id);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Product-flow payment ledger"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string profile = "uav";
    std::uint32_t elements = 0;
    std::uint64_t seed = 42;
    bool divisible = false;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic project dataset");
    gen->add_option("--profile", profile, "uav or ugv")->check(CLI::IsMember({"uav", "ugv"}));
    gen->add_option("--elements", elements, "number of building elements (0 = profile default)");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_flag("--divisible", divisible, "round scheduled values to multiples of 10000 cents");
    gen->add_option("--out", gen_out, "output file")->required();

    std::vector<std::string> datasets;
    std::string run_out;
    std::string configs;
    std::string asset = "native";
    auto* run = app.add_subcommand("run", "run the scenario matrix");
    run->add_option("--dataset", datasets, "project dataset files (default: generated UAV and UGV datasets)");
    run->add_option("--out", run_out, "run directory")->required();
    run->add_option("--configs", configs, "comma separated scenario ids 1-8");
    run->add_option("--asset", asset, "native or token")->check(CLI::IsMember({"native", "token"}));

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "re-verify a run directory");
    verify->add_option("dir", verify_dir)->required();

    std::string report_dir;
    std::string format = "md";
    auto* report = app.add_subcommand("report", "print the report of a run directory");
    report->add_option("dir", report_dir)->required();
    report->add_option("--format", format, "json, csv or md")->check(CLI::IsMember({"json", "csv", "md"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*gen) {
            DatasetOptions opt{profile_from_name(profile), elements, env_seed().value_or(seed), divisible};
            write_text_file(gen_out, canonical_json(generate_dataset(opt)) + "\n");
            return kOk;
        }
        if (*run) {
            MatrixOptions opt;
            opt.out = run_out;
            opt.scenario_ids = parse_configs(configs);
            opt.asset = asset_from_name(asset);
            opt.seed = env_seed();
            if (datasets.empty()) {
                const auto s = opt.seed.value_or(42);
                opt.seed = s;
                for (auto p : {Profile::UavLike, Profile::UgvLike}) {
                    auto path = fs::path(run_out) / "datasets" / (std::string(profile_name(p)) + ".json");
                    write_text_file(path, canonical_json(generate_dataset({p, 0, s, false})) + "\n");
                    opt.datasets.push_back(path);
                }
            } else {
                for (const auto& d : datasets) opt.datasets.emplace_back(d);
            }
            auto result = run_matrix(opt);
            std::cout << render_report_markdown(result.report);
            return kOk;
        }
        if (*verify) {
            auto outcome = verify_run(verify_dir);
            for (const auto& f : outcome.findings) std::cout << "FINDING " << f << "\n";
            std::cout << (outcome.ok ? "OK" : "FAILED") << " (" << outcome.scenarios_checked << " scenarios)\n";
            return outcome.ok ? kOk : kVerifyFailed;
        }
        if (*report) {
            auto doc = read_canonical_file(fs::path(report_dir) / "report.json");
            if (format == "json") std::cout << doc.dump(2) << "\n";
            else if (format == "csv") std::cout << render_report_csv(doc);
            else std::cout << render_report_markdown(doc);
            return kOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::Malformed && !*verify ? kUsage : kVerifyFailed;
    }
    return kUsage;
}
