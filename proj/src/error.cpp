// SPDX-License-Identifier: Apache-2.0

#include "fano/error.hpp"

namespace fano
{

std::string_view to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ObstacleOutOfStrip: return "ObstacleOutOfStrip";
    case ErrorKind::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorKind::BumpSupportTooWide: return "BumpSupportTooWide";
    case ErrorKind::PerturbationCollision: return "PerturbationCollision";
    case ErrorKind::MeshTooCoarse: return "MeshTooCoarse";
    case ErrorKind::InvalidMesh: return "InvalidMesh";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::SingularAugmentedSystem: return "SingularAugmentedSystem";
    case ErrorKind::MeshMismatch: return "MeshMismatch";
    case ErrorKind::SegmentNotOnBoundary: return "SegmentNotOnBoundary";
    case ErrorKind::ThresholdDegeneracy: return "ThresholdDegeneracy";
    case ErrorKind::OutOfMonomodeRange: return "OutOfMonomodeRange";
    case ErrorKind::NoTrappedMode: return "NoTrappedMode";
    case ErrorKind::SlowDecayViolation: return "SlowDecayViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnsupportedPerturbation: return "UnsupportedPerturbation";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::ZeroBackgroundTransmission: return "ZeroBackgroundTransmission";
    case ErrorKind::DegenerateCollinear: return "DegenerateCollinear";
    case ErrorKind::IllConditionedProjection: return "IllConditionedProjection";
    case ErrorKind::NoZeroFound: return "NoZeroFound";
    case ErrorKind::NoDipDetected: return "NoDipDetected";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &what)
  : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string &what)
{
  throw Error(kind, what);
}

}  // namespace fano
