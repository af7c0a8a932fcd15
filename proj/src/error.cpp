#include "chainmi/error.hpp"

namespace chainmi {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotSquare: return "NotSquare";
    case Errc::NonFinite: return "NonFinite";
    case Errc::NonzeroSelfDistance: return "NonzeroSelfDistance";
    case Errc::AsymmetricDistance: return "AsymmetricDistance";
    case Errc::TriangleViolation: return "TriangleViolation";
    case Errc::NegativeDistance: return "NegativeDistance";
    case Errc::DegenerateSpace: return "DegenerateSpace";
    case Errc::ExactTooLarge: return "ExactTooLarge";
    case Errc::ScaleMismatch: return "ScaleMismatch";
    case Errc::PhaseOutOfRange: return "PhaseOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::SupportMismatch: return "SupportMismatch";
    case Errc::EmptySample: return "EmptySample";
    case Errc::DomainCapReached: return "DomainCapReached";
    case Errc::BracketFailure: return "BracketFailure";
    case Errc::InvalidEnvelope: return "InvalidEnvelope";
    case Errc::NegativeValue: return "NegativeValue";
    case Errc::MissingTailCap: return "MissingTailCap";
    case Errc::TailTooLoose: return "TailTooLoose";
    case Errc::RangeMismatch: return "RangeMismatch";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::UndefinedAtZero: return "UndefinedAtZero";
    case Errc::EmptyRealization: return "EmptyRealization";
    case Errc::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case Errc::KernelInvalid: return "KernelInvalid";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace chainmi
