#include <algorithm>
#include <map>
#include <array>
#include <cstdio>
#include <random>

#include "flowledger/error.hpp"
#include "flowledger/harness.hpp"
#include "flowledger/product_flow.hpp"

namespace flowledger {

namespace {

constexpr std::uint64_t kHorizonStart = 1717200000;  // logical seconds, labelled "June"
constexpr std::uint64_t kDay = 24 * 3600;
constexpr int kWeeks = 4;

// std::mt19937_64's output sequence is fixed by the standard, unlike the
// standard distributions, so ranges are drawn by hand to stay portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) { return lo + engine_() % (hi - lo + 1); }
    std::string hex_tag(int digits) {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string out;
        for (int i = 0; i < digits; ++i) out.push_back(kDigits[engine_() & 0xf]);
        return out;
    }

private:
    std::mt19937_64 engine_;
};

std::uint64_t draw_value(Rng& rng, std::uint64_t lo, std::uint64_t hi, bool divisible) {
    std::uint64_t v = rng.uniform(lo, hi);
    if (divisible) v = std::max<std::uint64_t>(10000, (v + 5000) / 10000 * 10000);
    return v;
}

// Cumulative basis points at the end of each week: work starts in `start`
// and spreads over `duration` weeks with random weekly shares. Monotone and
// reaches 10000 only if the work finishes inside the horizon.
std::array<std::uint32_t, kWeeks> trajectory(Rng& rng, int start, int duration) {
    std::vector<std::uint64_t> weights(static_cast<std::size_t>(duration));
    std::uint64_t total = 0;
    for (auto& w : weights) total += (w = rng.uniform(1, 100));
    std::array<std::uint32_t, kWeeks> out{};
    std::uint64_t cumulative = 0;
    for (int week = 0; week < kWeeks; ++week) {
        int step = week - start;
        if (step >= 0 && step < duration) cumulative += weights[static_cast<std::size_t>(step)];
        out[static_cast<std::size_t>(week)] = static_cast<std::uint32_t>(kFullProgressBp * cumulative / total);
    }
    return out;
}

std::string padded(std::uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03u", i);
    return buf;
}

struct TradeSpec {
    const char* name;
    std::uint64_t lo;
    std::uint64_t hi;
};

}  // namespace

std::string_view profile_name(Profile p) noexcept { return p == Profile::UavLike ? "uav" : "ugv"; }

Profile profile_from_name(std::string_view name) {
    if (name == "uav") return Profile::UavLike;
    if (name == "ugv") return Profile::UgvLike;
    throw Error(Errc::Malformed, "unknown profile " + std::string(name) + " (expected uav or ugv)");
}

Json generate_dataset(const DatasetOptions& options) {
    const bool uav = options.profile == Profile::UavLike;
    const std::uint32_t n = options.n_elements ? options.n_elements : (uav ? 104u : 60u);
    Rng rng(options.seed);

    Json elements = Json::array();
    Json sov = Json::array();
    Json snapshots = Json::array();
    std::vector<Json> weekly(kWeeks, Json::array());

    if (uav) {
        static constexpr std::array<TradeSpec, 4> kTrades{{{"framing", 60000, 140000},
                                                           {"insulation", 20000, 60000},
                                                           {"drywall", 40000, 90000},
                                                           {"painting", 15000, 45000}}};
        std::vector<std::string> trade_names;
        for (const auto& t : kTrades) trade_names.emplace_back(t.name);
        for (std::uint32_t i = 1; i <= n; ++i) {
            std::string guid = "partition-" + padded(i) + "-" + rng.hex_tag(8);
            elements.push_back({{"guid", guid}, {"type", "partition"}, {"trades", trade_names}});
            const int lag = static_cast<int>(rng.uniform(0, 1));
            for (std::size_t k = 0; k < kTrades.size(); ++k) {
                sov.push_back({{"guid", guid}, {"trade", kTrades[k].name},
                               {"value_cents", draw_value(rng, kTrades[k].lo, kTrades[k].hi, options.divisible)}});
                int start = std::min(kWeeks - 1, static_cast<int>(k) + lag - (k > 0 ? 1 : 0));
                int duration = static_cast<int>(rng.uniform(1, 3));
                auto bp = trajectory(rng, start, duration);
                for (int w = 0; w < kWeeks; ++w) {
                    weekly[static_cast<std::size_t>(w)].push_back(
                        {{"key", guid}, {"trade", kTrades[k].name}, {"bp", bp[static_cast<std::size_t>(w)]}});
                }
            }
        }
    } else {
        struct TypeSpec {
            const char* type;
            std::vector<TradeSpec> trades;
        };
        const std::vector<TypeSpec> kTypes{
            {"partition_wall", {{"indoor_partitions", 50000, 120000}, {"plumbing", 10000, 30000}}},
            {"pipe_run", {{"plumbing", 20000, 70000}}},
            {"radiator", {{"heating", 40000, 110000}, {"plumbing", 10000, 25000}}},
        };
        for (std::uint32_t i = 1; i <= n; ++i) {
            const auto& spec = kTypes[(i - 1) % kTypes.size()];
            std::string guid = std::string(spec.type) + "-" + padded(i) + "-" + rng.hex_tag(8);
            std::vector<std::string> trades;
            for (const auto& t : spec.trades) trades.emplace_back(t.name);
            elements.push_back({{"guid", guid}, {"type", spec.type}, {"trades", trades}});
            for (const auto& t : spec.trades) {
                sov.push_back({{"guid", guid}, {"trade", t.name}, {"value_cents", draw_value(rng, t.lo, t.hi, options.divisible)}});
            }
        }
        for (const auto& spec : kTypes) {
            for (std::size_t k = 0; k < spec.trades.size(); ++k) {
                int start = static_cast<int>(std::min<std::uint64_t>(k + rng.uniform(0, 1), kWeeks - 1));
                int duration = static_cast<int>(rng.uniform(2, 4));
                auto bp = trajectory(rng, start, duration);
                for (int w = 0; w < kWeeks; ++w) {
                    weekly[static_cast<std::size_t>(w)].push_back(
                        {{"key", spec.type}, {"trade", spec.trades[k].name}, {"bp", bp[static_cast<std::size_t>(w)]}});
                }
            }
        }
    }

    const std::string tag(profile_name(options.profile));
    for (int w = 0; w < kWeeks; ++w) {
        snapshots.push_back({{"id", tag + "-w" + std::to_string(w + 1)},
                             {"captured_at", kHorizonStart + static_cast<std::uint64_t>(w + 1) * 7 * kDay},
                             {"lod", uav ? "per_element" : "aggregate"},
                             {"source", uav ? "UAV" : "UGV"},
                             {"progress", weekly[static_cast<std::size_t>(w)]}});
    }
    return {{"name", tag},
            {"profile", tag},
            {"seed", options.seed},
            {"divisible", options.divisible},
            {"horizon", {{"label", "June"}, {"start", kHorizonStart}, {"end", kHorizonStart + 28 * kDay}}},
            {"elements", elements},
            {"schedule_of_values", sov},
            {"snapshots", snapshots}};
}

int paper_test_number(Profile profile, const GranularityConfig& c) {
    // Fixed points: 1 = all low, 4 = product only, 6 = time and trade, 8 = all
    // high; the product-high tests are {4, 5, 7, 8}. Tests 2, 3, 5, 7 are
    // assigned by the remaining single-axis pattern.
    static const std::map<int, int> kByScenario{{1, 1}, {3, 2}, {2, 3}, {4, 6}, {5, 4}, {7, 5}, {6, 7}, {8, 8}};
    return kByScenario.at(c.scenario_id()) + (profile == Profile::UgvLike ? 0 : 8);
}

}  // namespace flowledger
