#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowledger::fiat {

/// A line on a bank's books. Only window, counterparty bank and signed amount:
/// bank records carry no product-flow fields at all.
struct LedgerEntry {
    std::string window;
    std::string counterparty_bank;
    std::int64_t amount_cents = 0;

    bool operator==(const LedgerEntry&) const = default;
};

/// A depository institution. Balances are liabilities: what the bank owes each holder.
class Bank {
public:
    explicit Bank(std::string bank_id) : id_(std::move(bank_id)) {}

    void open_account(const std::string& holder, std::int64_t initial_liability = 0);

    /// Debits the payer by exactly what it credits the payee. Throws UnknownHolder.
    void same_bank_settle(const std::string& payer, const std::string& payee, std::int64_t amount_cents,
                          const std::string& window = "");

    [[nodiscard]] std::int64_t liability(const std::string& holder) const;  // UnknownHolder
    [[nodiscard]] std::int64_t total_liabilities() const;
    [[nodiscard]] std::int64_t nostro_central() const noexcept { return nostro_central_; }
    [[nodiscard]] bool has_holder(const std::string& holder) const { return liabilities_.contains(holder); }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

    /// Throws UnknownHolder.
    [[nodiscard]] const std::vector<LedgerEntry>& query_payment_records(const std::string& holder) const;

private:
    friend class CentralReserve;
    void post(const std::string& holder, const LedgerEntry& entry);

    std::string id_;
    std::map<std::string, std::int64_t> liabilities_;
    std::map<std::string, std::vector<LedgerEntry>> records_;
    std::int64_t nostro_central_ = 0;
};

struct Instruction {
    std::string from_bank;
    std::string to_bank;
    std::string from_holder;
    std::string to_holder;
    std::int64_t amount_cents = 0;
};

struct ClearingBatch {
    std::string window_id;
    std::vector<Instruction> instructions;
};

/// Central reserve where registered banks settle batches by net position.
/// Correspondent (nostro/vostro) banking is the two-bank special case.
class CentralReserve {
public:
    Bank& register_bank(const std::string& bank_id);
    [[nodiscard]] Bank& bank(const std::string& bank_id);  // UnregisteredBank
    [[nodiscard]] const Bank& bank(const std::string& bank_id) const;
    [[nodiscard]] const std::map<std::string, Bank>& banks() const noexcept { return banks_; }

    /// Per-bank net = Σ incoming − Σ outgoing, added to each bank's central
    /// position; customer liabilities move at both ends and each holder gets
    /// one aggregate entry per counterparty bank for the window. Validates the
    /// whole batch first: UnregisteredBank / UnknownHolder leave everything untouched.
    std::map<std::string, std::int64_t> net_and_settle(const ClearingBatch& batch);

private:
    std::map<std::string, Bank> banks_;
};

/// Best-effort recovery of a payment's element scope from a bank entry: the
/// only usable field is the amount, matched against per-element charges.
/// Returns the single element whose charge equals |amount|, if exactly one does.
struct ElementCharge {
    std::string guid;
    std::int64_t amount_cents = 0;
};
std::optional<std::vector<std::string>> reconstruct_scope(const LedgerEntry& entry,
                                                          const std::vector<ElementCharge>& candidates);

}  // namespace flowledger::fiat
