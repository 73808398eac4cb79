#include "flowledger/fiat.hpp"

#include <cstdlib>
#include <set>

#include "flowledger/error.hpp"

namespace flowledger::fiat {

void Bank::open_account(const std::string& holder, std::int64_t initial_liability) {
    liabilities_.emplace(holder, initial_liability);
    records_[holder];
}

std::int64_t Bank::liability(const std::string& holder) const {
    auto it = liabilities_.find(holder);
    if (it == liabilities_.end()) throw Error(Errc::UnknownHolder, holder + " at " + id_);
    return it->second;
}

std::int64_t Bank::total_liabilities() const {
    std::int64_t total = 0;
    for (const auto& [_, v] : liabilities_) total += v;
    return total;
}

void Bank::post(const std::string& holder, const LedgerEntry& entry) { records_[holder].push_back(entry); }

void Bank::same_bank_settle(const std::string& payer, const std::string& payee, std::int64_t amount_cents,
                            const std::string& window) {
    if (!has_holder(payer)) throw Error(Errc::UnknownHolder, payer + " at " + id_);
    if (!has_holder(payee)) throw Error(Errc::UnknownHolder, payee + " at " + id_);
    if (amount_cents == 0) return;
    liabilities_[payer] -= amount_cents;
    liabilities_[payee] += amount_cents;
    post(payer, {window, id_, -amount_cents});
    post(payee, {window, id_, amount_cents});
}

const std::vector<LedgerEntry>& Bank::query_payment_records(const std::string& holder) const {
    auto it = records_.find(holder);
    if (it == records_.end()) throw Error(Errc::UnknownHolder, holder + " at " + id_);
    return it->second;
}

Bank& CentralReserve::register_bank(const std::string& bank_id) { return banks_.try_emplace(bank_id, bank_id).first->second; }

Bank& CentralReserve::bank(const std::string& bank_id) {
    auto it = banks_.find(bank_id);
    if (it == banks_.end()) throw Error(Errc::UnregisteredBank, bank_id);
    return it->second;
}

const Bank& CentralReserve::bank(const std::string& bank_id) const {
    auto it = banks_.find(bank_id);
    if (it == banks_.end()) throw Error(Errc::UnregisteredBank, bank_id);
    return it->second;
}

std::map<std::string, std::int64_t> CentralReserve::net_and_settle(const ClearingBatch& batch) {
    for (const auto& ins : batch.instructions) {
        if (!bank(ins.from_bank).has_holder(ins.from_holder)) throw Error(Errc::UnknownHolder, ins.from_holder);
        if (!bank(ins.to_bank).has_holder(ins.to_holder)) throw Error(Errc::UnknownHolder, ins.to_holder);
    }
    std::map<std::string, std::int64_t> nets;
    // (bank, holder, counterparty bank) → aggregate signed amount for the window.
    std::map<std::tuple<std::string, std::string, std::string>, std::int64_t> postings;
    for (const auto& ins : batch.instructions) {
        nets[ins.from_bank] -= ins.amount_cents;
        nets[ins.to_bank] += ins.amount_cents;
        banks_.at(ins.from_bank).liabilities_[ins.from_holder] -= ins.amount_cents;
        banks_.at(ins.to_bank).liabilities_[ins.to_holder] += ins.amount_cents;
        postings[{ins.from_bank, ins.from_holder, ins.to_bank}] -= ins.amount_cents;
        postings[{ins.to_bank, ins.to_holder, ins.from_bank}] += ins.amount_cents;
    }
    for (const auto& [bank_id, net] : nets) banks_.at(bank_id).nostro_central_ += net;
    for (const auto& [key, amount] : postings) {
        const auto& [bank_id, holder, counterparty] = key;
        if (amount != 0) banks_.at(bank_id).post(holder, {batch.window_id, counterparty, amount});
    }
    return nets;
}

std::optional<std::vector<std::string>> reconstruct_scope(const LedgerEntry& entry,
                                                          const std::vector<ElementCharge>& candidates) {
    const std::int64_t target = std::llabs(entry.amount_cents);
    std::optional<std::string> match;
    for (const auto& c : candidates) {
        if (c.amount_cents != target) continue;
        if (match && *match != c.guid) return std::nullopt;
        match = c.guid;
    }
    if (!match) return std::nullopt;
    return std::vector<std::string>{*match};
}

}  // namespace flowledger::fiat
