#include "phasenet/errors.hpp"

namespace phasenet {

const char* to_string(Errc c) {
  switch (c) {
    case Errc::DuplicateWell: return "DuplicateWell";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::MonotonicityFail: return "MonotonicityFail";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::EndpointDrift: return "EndpointDrift";
    case Errc::TriangleViolation: return "TriangleViolation";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case Errc::OverlappingTransitions: return "OverlappingTransitions";
    case Errc::BlowUp: return "BlowUp";
    case Errc::DeltaOutOfRange: return "DeltaOutOfRange";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::MissingSigma: return "MissingSigma";
    case Errc::NoCorrespondence: return "NoCorrespondence";
    case Errc::DegenerateJunction: return "DegenerateJunction";
    case Errc::TargetTooFar: return "TargetTooFar";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::AssertionFailure: return "AssertionFailure";
    case Errc::GeometryConflict: return "GeometryConflict";
    case Errc::NegativeExcessBeyondTolerance: return "NegativeExcessBeyondTolerance";
    case Errc::FiberOutsideGrid: return "FiberOutsideGrid";
    case Errc::SandwichViolation: return "SandwichViolation";
    case Errc::TooFewQualifyingCells: return "TooFewQualifyingCells";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::IncompatibleReports: return "IncompatibleReports";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& msg)
    : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

}  // namespace phasenet
