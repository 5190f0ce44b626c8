#pragma once

#include <stdexcept>
#include <string>

namespace dmc {

// Error categories; `code` is stable text used by tests and the CLI.
enum class Errc {
  // parser
  UnbalancedParens,
  TrailingInput,
  EmptyInput,
  UnknownOperator,
  ArityError,
  BadSignal,
  BadAngle,
  BadName,
  DistributedOpInLocalContext,
  ShapeError,
  MixedNameKind,
  // state
  DuplicateQubit,
  NonNormalizedInput,
  UnknownQubit,
  SameQubit,
  AlreadyMeasured,
  ZeroProbabilityBranch,
  OrderMismatch,
  LengthMismatch,
  // interpreter
  UnboundOutcome,
  UnboundInput,
  CommunicationInLocalRun,
  // pattern / composer
  NameCollision,
  MissingParam,
  UnknownParam,
  CycleDetected,
  ConflictingBinding,
  ArityMismatch,
  ValidationFailed,
  // network
  UnclaimedResourceQubit,
  DanglingChannel,
  BindingConflict,
  PairMismatch,
  NondeterministicResource,
  OwnershipViolation,
  UnboundSignal,
  Deadlock,
  ChannelTypeMismatch,
  // misc
  IoError,
  UsageError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dmc
