#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scot {

enum class ErrorCode {
  InvalidGraph,
  InvalidFactors,
  DisconnectedGraph,
  UnknownBroker,
  UnknownLink,
  ParseError,
  InvalidPredicate,
  IndexOutOfRange,
  OwnerBitViolation,
  DuplicateAdvertisementUid,
  UnknownAdvertisementUid,
  DuplicateSubscriptionId,
  UnknownSubscription,
  NoMatchingAdvertisement,
  NoForwardingOption,
  InvalidConfig,
  TimeLimitExceeded,
  InfeasibleSelectivity,
  PlacementInfeasible,
  EmptyReport,
  ShapeMismatch,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace scot
