#pragma once

#include <stdexcept>
#include <string>

namespace phasenet {

enum class Errc {
  DuplicateWell,
  DimensionMismatch,
  NotPositiveDefinite,
  MonotonicityFail,
  InvalidArgument,
  NoConvergence,
  EndpointDrift,
  TriangleViolation,
  NegativeEntry,
  ResolutionTooCoarse,
  OverlappingTransitions,
  BlowUp,
  DeltaOutOfRange,
  InsufficientData,
  MissingSigma,
  NoCorrespondence,
  DegenerateJunction,
  TargetTooFar,
  UnknownScenario,
  AssertionFailure,
  GeometryConflict,
  NegativeExcessBeyondTolerance,
  FiberOutsideGrid,
  SandwichViolation,
  TooFewQualifyingCells,
  ConfigParse,
  IncompatibleReports,
  Io,
};

const char* to_string(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg);
  Errc code() const { return code_; }

private:
  Errc code_;
};

}  // namespace phasenet
