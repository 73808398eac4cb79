#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowledger/canonical_json.hpp"
#include "flowledger/engine.hpp"
#include "flowledger/store.hpp"

namespace flowledger {

inline constexpr const char* kToolVersion = "flowledger 0.3.0";

enum class Profile { UavLike, UgvLike };
std::string_view profile_name(Profile p) noexcept;  // "uav" / "ugv"
Profile profile_from_name(std::string_view name);

struct DatasetOptions {
    Profile profile = Profile::UavLike;
    /// 0 selects the profile default: 104 for UAV-like, 60 for UGV-like.
    std::uint32_t n_elements = 0;
    std::uint64_t seed = 42;
    /// Round every scheduled value to a multiple of 10000 cents so every
    /// pro-rata valuation is exact.
    bool divisible = false;
};

/// Synthetic project dataset (canonical JSON document). UAV-like: one element
/// type ("partition"), four trades, per-element weekly snapshots. UGV-like:
/// three element types, trades plumbing / indoor partitions / heating,
/// aggregate weekly snapshots. Progress is monotone per key and the horizon
/// is one 28-day month. Deterministic in the seed on any platform.
Json generate_dataset(const DatasetOptions& options);

/// Maps a scenario to the paper-style test numbering: the UGV-like dataset
/// occupies tests 1–8 and the UAV-like dataset 9–16.
int paper_test_number(Profile profile, const GranularityConfig& config);

/// Where payment evidence can be traced, compared between the crypto dataset
/// and the same payments replayed through fiat banks.
struct AtomicityComparison {
    std::uint64_t payments = 0;
    std::uint64_t crypto_recovered = 0;
    std::uint64_t lien_tokens = 0;
    std::uint64_t lien_recovered = 0;
    std::uint64_t fiat_entries = 0;
    std::uint64_t fiat_recovered = 0;
    std::uint64_t pooled_fiat_entries = 0;
    std::uint64_t pooled_fiat_recovered = 0;

    [[nodiscard]] Json to_json() const;
};

AtomicityComparison compare_atomicity(const PaymentDataset& dataset, const Chain& chain, const Parties& parties,
                                      const ContentStore& store);

struct MatrixOptions {
    std::vector<std::filesystem::path> datasets;  // project dataset files
    std::filesystem::path out;
    std::vector<int> scenario_ids = {1, 2, 3, 4, 5, 6, 7, 8};
    SettlementAsset asset = SettlementAsset::Native;
    std::optional<std::uint64_t> seed;  // recorded in the manifest
};

struct ScenarioSummary {
    std::string dataset;
    Profile profile = Profile::UavLike;
    PaymentDataset payments;
    AtomicityComparison atomicity;
    std::string scenario_dir;  // relative to the run directory
};

struct MatrixResult {
    std::vector<ScenarioSummary> scenarios;
    Json report;
};

/// Runs every (dataset, scenario) pair on its own chain and store, exporting
///   <out>/<dataset>/scenario-<id>/{chain.jsonl,state.json,payments.csv,dataset.json,store/}
/// plus <out>/manifest.json and <out>/report.json.
MatrixResult run_matrix(const MatrixOptions& options);

/// Builds the report document (metrics table, invariant checks, atomicity comparison).
Json build_report(const std::vector<ScenarioSummary>& scenarios, const Json& manifest);

std::string render_report_markdown(const Json& report);
std::string render_report_csv(const Json& report);

struct VerifyOutcome {
    bool ok = true;
    std::size_t scenarios_checked = 0;
    std::vector<std::string> findings;
};

/// Replays every chain, re-verifies every stored object, re-derives every
/// payment from its evidence and regenerates every CSV. Never throws for
/// content problems; they become findings.
VerifyOutcome verify_run(const std::filesystem::path& run_dir);

/// The per-scenario part of verify_run for one <dataset>/scenario-<id> directory.
std::vector<std::string> verify_scenario(const std::filesystem::path& scenario_dir);

/// Helpers shared by the CLI and bindings.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Reads a file holding one canonical JSON document followed by a newline.
Json read_canonical_file(const std::filesystem::path& path);

}  // namespace flowledger
