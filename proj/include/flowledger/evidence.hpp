#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowledger/address.hpp"
#include "flowledger/canonical_json.hpp"
#include "flowledger/product_flow.hpp"
#include "flowledger/store.hpp"

namespace flowledger {

/// The product scope a payment and its lien token cover. Its canonical JSON
/// is what the lien token stores on chain.
struct WorkScope {
    std::string element_type;
    std::vector<std::string> guids;   // elements whose work is compensated
    std::vector<std::string> trades;  // trades pooled into the payment
    BillingPeriod period;

    [[nodiscard]] Json to_json() const;
    [[nodiscard]] std::string canonical() const { return canonical_json(to_json()); }
    static WorkScope from_json(const Json& doc);

    bool operator==(const WorkScope&) const = default;
};

/// Off-chain record tying one payment to the product flow that triggered it.
/// Stored as canonical JSON; its CID is the payment's evidence_cid and the
/// lien token's URI.
struct EvidenceBundle {
    std::string project;
    int scenario_id = 0;
    std::string config;
    Address payee;
    std::string payee_role;
    Address payer_escrow;
    std::string asset;
    WorkScope scope;
    Lod lod = Lod::PerElement;
    std::vector<WorkItem> items;
    std::uint64_t amount_cents = 0;
    std::vector<std::string> snapshot_ids;
    std::vector<Cid> snapshot_cids;
    Cid sov_cid;
    std::optional<std::string> bim_ref;

    [[nodiscard]] Json to_json() const;
    [[nodiscard]] std::string canonical() const { return canonical_json(to_json()); }
    static EvidenceBundle from_json(const Json& doc);
    static EvidenceBundle load(const ContentStore& store, const Cid& cid);

    /// Recomputes the payment from the per-item progress and valuation inputs,
    /// ignoring the stored per-item and total amounts.
    [[nodiscard]] std::uint64_t rederive_amount() const;
};

}  // namespace flowledger
