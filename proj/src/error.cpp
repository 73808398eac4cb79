#include "flowledger/error.hpp"

namespace flowledger {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::EmptyKey: return "EmptyKey";
        case Errc::KeyTooLong: return "KeyTooLong";
        case Errc::AbsentKey: return "AbsentKey";
        case Errc::AddressInUse: return "AddressInUse";
        case Errc::ReservedAddress: return "ReservedAddress";
        case Errc::UnknownSender: return "UnknownSender";
        case Errc::InsufficientFunds: return "InsufficientFunds";
        case Errc::NonceMismatch: return "NonceMismatch";
        case Errc::BatchAborted: return "BatchAborted";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
        case Errc::SupplyOverflow: return "SupplyOverflow";
        case Errc::InsufficientTokens: return "InsufficientTokens";
        case Errc::UnresolvableCid: return "UnresolvableCID";
        case Errc::UnknownToken: return "UnknownToken";
        case Errc::UnknownContract: return "UnknownContract";
        case Errc::Unauthorized: return "Unauthorized";
        case Errc::EmptyContent: return "EmptyContent";
        case Errc::NotFound: return "NotFound";
        case Errc::IntegrityFailure: return "IntegrityFailure";
        case Errc::UnknownElement: return "UnknownElement";
        case Errc::UnknownTrade: return "UnknownTrade";
        case Errc::DuplicateSnapshotId: return "DuplicateSnapshotId";
        case Errc::DuplicateElement: return "DuplicateElement";
        case Errc::InvalidProgress: return "InvalidProgress";
        case Errc::LoDMismatch: return "LoDMismatch";
        case Errc::UnmappedTrade: return "UnmappedTrade";
        case Errc::EscrowInsufficient: return "EscrowInsufficient";
        case Errc::UnknownHolder: return "UnknownHolder";
        case Errc::UnregisteredBank: return "UnregisteredBank";
        case Errc::Malformed: return "Malformed";
        case Errc::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace flowledger
