#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowledger/canonical_json.hpp"
#include "flowledger/store.hpp"

namespace flowledger {

inline constexpr std::uint32_t kFullProgressBp = 10000;

enum class Lod { PerElement, Aggregate };
std::string_view lod_name(Lod lod) noexcept;
Lod lod_from_name(std::string_view name);

struct BuildingElement {
    std::string guid;
    std::string element_type;
    std::vector<std::string> trades;  // applicable trades, non-empty
};

/// (guid, trade) for per-element progress, (element_type, trade) for aggregate progress.
struct ProgressKey {
    std::string key;
    std::string trade;

    auto operator<=>(const ProgressKey&) const = default;
};

struct ProgressSnapshot {
    std::string snapshot_id;
    std::uint64_t captured_at = 0;
    Lod lod = Lod::PerElement;
    std::map<ProgressKey, std::uint32_t> progress;  // cumulative basis points
    std::string source;                              // e.g. "UAV", "UGV"

    [[nodiscard]] Json to_json() const;
    static ProgressSnapshot from_json(const Json& doc);
};

/// A billing window (start, end]: snapshots captured after start and up to end belong to it.
struct BillingPeriod {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    std::string label;

    bool operator==(const BillingPeriod&) const = default;
};

/// What one payment scope covers: all elements of a type, or one element.
struct ScopeSelector {
    std::string element_type;
    std::optional<std::string> guid;

    bool operator==(const ScopeSelector&) const = default;
};

struct WorkItem {
    std::string key;
    std::string trade;
    std::uint32_t paid_bp_before = 0;
    std::uint32_t delta_bp = 0;
    std::uint64_t value_cents = 0;
    std::uint64_t paid_cents_before = 0;
    std::uint64_t amount_cents = 0;

    bool operator==(const WorkItem&) const = default;
};

struct Regression {
    ProgressKey key;
    std::uint32_t paid_bp = 0;
    std::uint32_t observed_bp = 0;
};

struct WorkDelta {
    BillingPeriod period;
    Lod lod = Lod::PerElement;
    std::vector<WorkItem> items;  // delta_bp > 0 for every item
    std::vector<std::string> snapshot_ids;
    std::vector<Regression> regressions;

    [[nodiscard]] std::uint64_t total_cents() const;
};

struct PaidEntry {
    std::uint32_t bp = 0;
    std::uint64_t cents = 0;
};
/// Last-compensated progress and money per (key, trade).
using PaidState = std::map<ProgressKey, PaidEntry>;

/// floor(value_cents × delta_bp / 10000) in exact integer arithmetic.
std::uint64_t valuation(std::uint32_t delta_bp, std::uint64_t value_cents);

/// Payment for one item: the pro-rata valuation, except the delta that brings an
/// item to 10000 bp pays whatever remains of its value so lifetime totals are exact.
std::uint64_t item_amount(std::uint32_t paid_bp_before, std::uint32_t delta_bp, std::uint64_t value_cents,
                          std::uint64_t paid_cents_before);

class Project {
public:
    struct Horizon {
        std::uint64_t start = 0;
        std::uint64_t end = 0;
        std::string label;
    };

    /// Throws DuplicateElement, UnknownElement / UnknownTrade for schedule entries
    /// that reference nothing, Malformed for missing schedule entries.
    Project(std::string name, Horizon horizon, std::vector<BuildingElement> elements,
            std::map<ProgressKey, std::uint64_t> schedule_of_values);

    /// Validates against the element model, stores the canonical snapshot bytes
    /// and records the CID. Throws UnknownElement, UnknownTrade,
    /// DuplicateSnapshotId, InvalidProgress.
    Cid ingest_snapshot(ProgressSnapshot snapshot, ContentStore& store);

    /// Stores the canonical schedule-of-values document; idempotent.
    Cid publish_schedule(ContentStore& store) const;
    /// Stores the schedule and every ingested snapshot into `store` (a second
    /// store, e.g. one per scenario). Returns the schedule CID.
    Cid publish(ContentStore& store) const;

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const Horizon& horizon() const noexcept { return horizon_; }
    [[nodiscard]] const std::vector<BuildingElement>& elements() const noexcept { return elements_; }
    [[nodiscard]] const BuildingElement& element(const std::string& guid) const;  // UnknownElement
    [[nodiscard]] std::vector<const BuildingElement*> elements_of_type(const std::string& type) const;
    /// Element types and trades in order of first appearance.
    [[nodiscard]] const std::vector<std::string>& element_types() const noexcept { return types_; }
    [[nodiscard]] const std::vector<std::string>& trades() const noexcept { return trades_; }
    /// Union of trades applicable to any element of the type, in project trade order.
    [[nodiscard]] std::vector<std::string> trades_of_type(const std::string& type) const;

    [[nodiscard]] std::uint64_t value_of(const std::string& guid, const std::string& trade) const;
    /// Σ scheduled value over every element of the type for that trade (0 for an empty type).
    [[nodiscard]] std::uint64_t type_value(const std::string& type, const std::string& trade) const;
    [[nodiscard]] std::uint64_t total_value() const;
    [[nodiscard]] const std::map<ProgressKey, std::uint64_t>& schedule_of_values() const noexcept { return sov_; }

    /// Timeline ordered by captured_at (ties keep ingestion order).
    [[nodiscard]] const std::vector<ProgressSnapshot>& snapshots() const noexcept { return snapshots_; }
    [[nodiscard]] std::optional<Cid> snapshot_cid(const std::string& snapshot_id) const;

    /// Canonical project dataset document (elements, schedule_of_values, snapshots).
    [[nodiscard]] Json to_json() const;
    /// Builds the project and ingests every snapshot into `store`.
    static Project from_json(const Json& doc, ContentStore& store);

private:
    std::string name_;
    Horizon horizon_;
    std::vector<BuildingElement> elements_;
    std::map<std::string, std::size_t> by_guid_;
    std::vector<std::string> types_;
    std::vector<std::string> trades_;
    std::map<ProgressKey, std::uint64_t> sov_;
    std::vector<ProgressSnapshot> snapshots_;
    std::map<std::string, Cid> snapshot_cids_;
};

/// Aggregate-LoD valuation: the percentage applies to the type's total scheduled value.
std::uint64_t aggregate_valuation(const Project& project, const std::string& element_type, const std::string& trade,
                                  std::uint32_t delta_bp);

/// Progress in `window` not yet paid for, per in-scope (key, trade).
/// delta = clamp(latest − paid, 0, 10000 − paid); zero deltas are omitted and
/// regressions are reported, never clawed back. Throws LoDMismatch when the
/// scope names one element but the window only has aggregate snapshots.
WorkDelta compute_delta(const Project& project, const PaidState& paid, const BillingPeriod& window,
                        const ScopeSelector& scope);

}  // namespace flowledger
