#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flowledger/canonical_json.hpp"
#include "flowledger/error.hpp"
#include "flowledger/ledger.hpp"

namespace flowledger {

// Chain export: JSON lines, one block per line, canonical JSON, every byte
// field lowercase hex with a 0x prefix, u128 amounts as decimal strings.
// Line 0 additionally carries the genesis allocation.

Json genesis_to_json(const GenesisSpec& genesis);
GenesisSpec genesis_from_json(const Json& doc);

Json transaction_to_json(const Transaction& tx);
Transaction transaction_from_json(const Json& doc);  // checks the "id" field

Json block_to_json(const Block& block);

std::string export_chain_jsonl(const Chain& chain);

/// A stored chain could not be decoded; `line` equals the block height.
class ChainImportError : public Error {
public:
    ChainImportError(std::uint64_t line, const std::string& what)
        : Error(Errc::Malformed, "block " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::uint64_t line() const noexcept { return line_; }

private:
    std::uint64_t line_;
};

struct ChainImport {
    GenesisSpec genesis;
    std::vector<Block> blocks;
};

/// Strict: each line must be canonical and every stored id, batch_id and
/// block hash must match its recomputation. Throws ChainImportError.
ChainImport import_chain_jsonl(std::string_view text);

/// World state export: accounts in address order with their storage entries.
std::string export_state_json(const WorldState& state);

}  // namespace flowledger
