#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace flowledger {

enum class Errc {
    // authenticated-state
    EmptyKey,
    KeyTooLong,
    AbsentKey,
    // ledger-core
    AddressInUse,
    ReservedAddress,
    UnknownSender,
    InsufficientFunds,
    NonceMismatch,
    BatchAborted,
    EmptyBatch,
    NonMonotonicTimestamp,
    // crypto-assets
    SupplyOverflow,
    InsufficientTokens,
    UnresolvableCid,
    UnknownToken,
    UnknownContract,
    Unauthorized,
    // offchain-store
    EmptyContent,
    NotFound,
    IntegrityFailure,
    // product-flow
    UnknownElement,
    UnknownTrade,
    DuplicateSnapshotId,
    DuplicateElement,
    InvalidProgress,
    LoDMismatch,
    // payment-engine
    UnmappedTrade,
    EscrowInsufficient,
    // fiat-baseline
    UnknownHolder,
    UnregisteredBank,
    // shared
    Malformed,
    Io,
};

std::string_view errc_name(Errc code) noexcept;

/// Base exception for every failure raised by the library. The code is
/// stable and is what tests and bindings dispatch on.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// A transaction inside an atomic batch failed; nothing in the batch was applied.
class BatchAborted : public Error {
public:
    BatchAborted(std::size_t index, Errc cause, const std::string& detail)
        : Error(Errc::BatchAborted,
                "transaction " + std::to_string(index) + " failed with " +
                    std::string(errc_name(cause)) + " (" + detail + ")"),
          index_(index), cause_(cause) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }
    [[nodiscard]] Errc cause() const noexcept { return cause_; }

private:
    std::size_t index_;
    Errc cause_;
};

}  // namespace flowledger
