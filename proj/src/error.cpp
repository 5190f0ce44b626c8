#include "dmc/error.hpp"

namespace dmc {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnbalancedParens: return "UnbalancedParensError";
    case Errc::TrailingInput: return "TrailingInputError";
    case Errc::EmptyInput: return "EmptyInputError";
    case Errc::UnknownOperator: return "UnknownOperatorError";
    case Errc::ArityError: return "ArityError";
    case Errc::BadSignal: return "BadSignalError";
    case Errc::BadAngle: return "BadAngleError";
    case Errc::BadName: return "BadNameError";
    case Errc::DistributedOpInLocalContext: return "DistributedOpInLocalContextError";
    case Errc::ShapeError: return "ShapeError";
    case Errc::MixedNameKind: return "MixedNameKindError";
    case Errc::DuplicateQubit: return "DuplicateQubitError";
    case Errc::NonNormalizedInput: return "NonNormalizedInputError";
    case Errc::UnknownQubit: return "UnknownQubitError";
    case Errc::SameQubit: return "SameQubitError";
    case Errc::AlreadyMeasured: return "AlreadyMeasuredError";
    case Errc::ZeroProbabilityBranch: return "ZeroProbabilityBranchError";
    case Errc::OrderMismatch: return "OrderMismatchError";
    case Errc::LengthMismatch: return "LengthMismatchError";
    case Errc::UnboundOutcome: return "UnboundOutcomeError";
    case Errc::UnboundInput: return "UnboundInputError";
    case Errc::CommunicationInLocalRun: return "CommunicationInLocalRunError";
    case Errc::NameCollision: return "NameCollisionError";
    case Errc::MissingParam: return "MissingParamError";
    case Errc::UnknownParam: return "UnknownParamError";
    case Errc::CycleDetected: return "CycleDetectedError";
    case Errc::ConflictingBinding: return "ConflictingBindingError";
    case Errc::ArityMismatch: return "ArityMismatchError";
    case Errc::ValidationFailed: return "ValidationFailedError";
    case Errc::UnclaimedResourceQubit: return "UnclaimedResourceQubitError";
    case Errc::DanglingChannel: return "DanglingChannelError";
    case Errc::BindingConflict: return "BindingConflictError";
    case Errc::PairMismatch: return "PairMismatchError";
    case Errc::NondeterministicResource: return "NondeterministicResourceError";
    case Errc::OwnershipViolation: return "OwnershipViolationError";
    case Errc::UnboundSignal: return "UnboundSignalError";
    case Errc::Deadlock: return "DeadlockError";
    case Errc::ChannelTypeMismatch: return "ChannelTypeMismatchError";
    case Errc::IoError: return "IoError";
    case Errc::UsageError: return "UsageError";
  }
  return "Error";
}

}  // namespace dmc
