#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace phimin {

/// Failure categories. The first group are caller errors (bad input), the
/// second group are numerical failures detected while solving.
enum class ErrorKind {
  InvalidParameter,
  OutOfRange,
  InvalidData,
  NonManifold,
  DegenerateRange,
  SpacelikeViolation,

  BlowUp,
  DomainExit,
  ConvexityViolation,
  QuadratureNonconvergence,
  IntegrabilityFailure,
  FoldOver,
  PathDependence,
  SingularLocus,
  SeriesDivergence,
  NotEmbedded,
  MilestoneMissing,
  WindowTooShort,
  NonFinite,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InvalidData: return "invalid-data";
    case ErrorKind::NonManifold: return "non-manifold";
    case ErrorKind::DegenerateRange: return "degenerate-range";
    case ErrorKind::SpacelikeViolation: return "spacelike-violation";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::DomainExit: return "domain-exit";
    case ErrorKind::ConvexityViolation: return "convexity-violation";
    case ErrorKind::QuadratureNonconvergence: return "quadrature-nonconvergence";
    case ErrorKind::IntegrabilityFailure: return "integrability-failure";
    case ErrorKind::FoldOver: return "fold-over";
    case ErrorKind::PathDependence: return "path-dependence";
    case ErrorKind::SingularLocus: return "singular-locus";
    case ErrorKind::SeriesDivergence: return "series-divergence";
    case ErrorKind::NotEmbedded: return "not-embedded";
    case ErrorKind::MilestoneMissing: return "milestone-missing";
    case ErrorKind::WindowTooShort: return "window-too-short";
    case ErrorKind::NonFinite: return "non-finite";
  }
  return "unknown";
}

/// True for errors caused by invalid input rather than by the numerics.
inline bool is_validation_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::OutOfRange:
    case ErrorKind::InvalidData:
    case ErrorKind::NonManifold:
    case ErrorKind::DegenerateRange:
    case ErrorKind::SpacelikeViolation:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        double estimate = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        estimate_(estimate) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Numeric payload, e.g. the detected asymptote abscissa for BlowUp or the
  /// offending residual for a failed check. NaN when not applicable.
  double estimate() const noexcept { return estimate_; }

 private:
  ErrorKind kind_;
  double estimate_;
};

}  // namespace phimin
