#include "scot/error.hpp"

namespace scot {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::InvalidFactors: return "InvalidFactors";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::UnknownBroker: return "UnknownBroker";
    case ErrorCode::UnknownLink: return "UnknownLink";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidPredicate: return "InvalidPredicate";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::OwnerBitViolation: return "OwnerBitViolation";
    case ErrorCode::DuplicateAdvertisementUid: return "DuplicateAdvertisementUid";
    case ErrorCode::UnknownAdvertisementUid: return "UnknownAdvertisementUid";
    case ErrorCode::DuplicateSubscriptionId: return "DuplicateSubscriptionId";
    case ErrorCode::UnknownSubscription: return "UnknownSubscription";
    case ErrorCode::NoMatchingAdvertisement: return "NoMatchingAdvertisement";
    case ErrorCode::NoForwardingOption: return "NoForwardingOption";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TimeLimitExceeded: return "TimeLimitExceeded";
    case ErrorCode::InfeasibleSelectivity: return "InfeasibleSelectivity";
    case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::EmptyReport: return "EmptyReport";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace scot
