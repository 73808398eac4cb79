#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowledger/error.hpp"
#include "flowledger/evidence.hpp"
#include "flowledger/ledger.hpp"
#include "flowledger/product_flow.hpp"
#include "flowledger/store.hpp"

namespace flowledger {

enum class Level : std::uint8_t { Low = 0, High = 1 };

/// One of the eight granularity scenarios. Scenario ids follow the bit order
/// (product, time, trade) with Low = 0: id = 1 + 4·product + 2·time + trade.
struct GranularityConfig {
    Level product = Level::Low;  // all elements of a type | one element
    Level time = Level::Low;     // monthly | weekly
    Level trade = Level::Low;    // general contractor | subcontractors

    [[nodiscard]] int scenario_id() const noexcept;
    static GranularityConfig from_scenario_id(int id);  // 1..8, else Malformed
    static std::vector<GranularityConfig> all();
    /// e.g. "product=high,time=low,trade=high"
    [[nodiscard]] std::string label() const;

    bool operator==(const GranularityConfig&) const = default;
};

/// Low → the whole horizon as one period; High → consecutive 7-day periods,
/// the last one clipped to the horizon end.
std::vector<BillingPeriod> plan_periods(Level time, const Project::Horizon& horizon);

/// Low → one selector per element type; High → one selector per element.
std::vector<ScopeSelector> partition_scope(Level product, const std::vector<BuildingElement>& elements);

/// Deterministic addresses for every party in a scenario.
struct Parties {
    Address owner;
    Address general_contractor;
    std::map<std::string, Address> subcontractors;  // trade → subcontractor
    Address escrow;
    Address token_contract;
    Address lien_registry;

    static Parties standard(const std::vector<std::string>& trades);
};

struct PayeeRoute {
    Address payee;
    std::string role;                 // "general_contractor" or "subcontractor:<trade>"
    std::vector<std::string> trades;  // trades whose work this payee is paid for
};

/// Low → a single route to the general contractor pooling every trade;
/// High → one route per trade to its subcontractor. Throws UnmappedTrade.
std::vector<PayeeRoute> resolve_payees(Level trade, const std::vector<std::string>& trades, const Parties& parties);

enum class SettlementAsset { Native, Token };
std::string_view asset_name(SettlementAsset asset) noexcept;
SettlementAsset asset_from_name(std::string_view name);

struct PaymentRecord {
    std::uint64_t period_index = 0;
    std::string period_label;
    Address payee;
    std::string payee_role;
    std::vector<std::string> trades;
    std::string element_type;
    std::uint64_t element_count = 0;
    std::uint64_t amount_cents = 0;
    Cid evidence_cid;
    std::uint64_t lien_token_id = 0;
    std::uint64_t block_height = 0;
    Transaction payment;
    Transaction lien;
};

struct FailureRecord {
    std::string period_label;
    std::string scope;  // "<type>" or "<type>/<guid>"
    Errc code = Errc::LoDMismatch;
    std::string reason;
};

/// Exact non-negative fraction, kept in lowest terms.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Rational of(std::uint64_t num, std::uint64_t den);
    [[nodiscard]] double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    [[nodiscard]] std::string str() const;  // "n/d"

    bool operator==(const Rational&) const = default;
    std::strong_ordering operator<=>(const Rational& other) const;
};

/// Direct operationalisation of the three granularity axes, per one-month horizon.
struct GranularityMetrics {
    Rational payments_per_trade_per_month;  // payments ÷ distinct trades paid
    Rational mean_payees_per_payment;       // trade parties compensated per payment
    Rational mean_elements_per_payment;
    std::uint32_t failure_count = 0;

    bool operator==(const GranularityMetrics&) const = default;
};

GranularityMetrics compute_metrics(const std::vector<PaymentRecord>& payments, std::size_t failure_count);

struct PaymentDataset {
    std::string dataset;
    int scenario_id = 0;
    GranularityConfig config;
    SettlementAsset asset = SettlementAsset::Native;
    std::vector<PaymentRecord> payments;
    std::vector<FailureRecord> failures;
    std::vector<std::string> notes;  // progress regressions and other non-fatal findings
    GranularityMetrics metrics;

    [[nodiscard]] std::uint64_t total_paid() const;
    [[nodiscard]] Json to_json() const;
    /// scenario,period,payee,trades,element_count,amount_cents,evidence_cid,lien_token_id
    [[nodiscard]] std::string to_csv() const;
};

struct ScenarioOptions {
    SettlementAsset asset = SettlementAsset::Native;
    /// Escrow funding; 0 means the project's total scheduled value.
    std::uint64_t escrow_funding = 0;
};

/// The payment contract for one scenario: owns a fresh chain whose escrow pays
/// out against product-flow deltas.
class ScenarioRunner {
public:
    ScenarioRunner(const Project& project, GranularityConfig config, ContentStore& store, ScenarioOptions options = {});

    struct PeriodOutcome {
        std::vector<PaymentRecord> payments;
        std::vector<FailureRecord> failures;
        std::vector<std::string> notes;
    };

    /// Settles one billing period and seals one block at period.end. Each
    /// (scope × payee) group with a positive amount yields one atomic batch
    /// [asset transfer escrow→payee, lien mint to owner], both carrying the
    /// evidence CID. Throws EscrowInsufficient with nothing applied.
    PeriodOutcome settle_period(const BillingPeriod& period, std::uint64_t period_index);

    /// Plans the periods and settles each in order.
    PaymentDataset run(const std::string& dataset_name);

    [[nodiscard]] const Chain& chain() const noexcept { return chain_; }
    [[nodiscard]] const Parties& parties() const noexcept { return parties_; }
    [[nodiscard]] const PaidState& paid() const noexcept { return paid_; }
    [[nodiscard]] u128 escrow_balance() const;
    /// Moves the chain out; the runner must not be used afterwards.
    [[nodiscard]] Chain release_chain() && { return std::move(chain_); }

private:
    const Project& project_;
    GranularityConfig config_;
    ContentStore& store_;
    ScenarioOptions options_;
    Parties parties_;
    Cid sov_cid_;
    Chain chain_;
    PaidState paid_;
};

struct ScenarioRun {
    PaymentDataset dataset;
    Chain chain;
    Parties parties;
};

ScenarioRun run_scenario(const Project& project, const std::string& dataset_name, GranularityConfig config,
                         ContentStore& store, ScenarioOptions options = {});

/// Genesis used by every scenario: parties as EOAs, escrow funded with the
/// settlement asset, token contract owned by the project owner, lien registry
/// minted by the escrow.
GenesisSpec scenario_genesis(const Parties& parties, SettlementAsset asset, std::uint64_t funding,
                             std::uint64_t timestamp);

}  // namespace flowledger
