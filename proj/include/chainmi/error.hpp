// error.hpp
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainmi {

enum class Errc {
  // metric_core
  NotSquare,
  NonFinite,
  NonzeroSelfDistance,
  AsymmetricDistance,
  TriangleViolation,
  NegativeDistance,
  DegenerateSpace,
  ExactTooLarge,
  ScaleMismatch,
  PhaseOutOfRange,
  InvalidArgument,
  // info_theory
  NotNormalized,
  OutOfRange,
  SupportMismatch,
  EmptySample,
  DomainCapReached,
  BracketFailure,
  InvalidEnvelope,
  // bound_engine
  NegativeValue,
  MissingTailCap,
  TailTooLoose,
  RangeMismatch,
  EmptyCandidates,
  UndefinedAtZero,
  // process_lab
  EmptyRealization,
  EnumerationCapExceeded,
  KernelInvalid,
  // io
  ParseError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Metric validation failures name the offending index triple. For pairwise
/// violations the third index repeats the second.
class MetricError : public Error {
 public:
  MetricError(Errc code, std::size_t i, std::size_t j, std::size_t k, const std::string& what)
      : Error(code, what), indices_{i, j, k} {}

  const std::array<std::size_t, 3>& indices() const noexcept { return indices_; }

 private:
  std::array<std::size_t, 3> indices_;
};

}  // namespace chainmi
