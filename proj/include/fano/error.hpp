// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_ERROR_HPP
#define FANO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fano
{

enum class ErrorKind
{
  InvalidArgument,
  ConfigError,
  ObstacleOutOfStrip,
  DisconnectedDomain,
  BumpSupportTooWide,
  PerturbationCollision,
  MeshTooCoarse,
  InvalidMesh,
  SingularMatrix,
  SingularAugmentedSystem,
  MeshMismatch,
  SegmentNotOnBoundary,
  ThresholdDegeneracy,
  OutOfMonomodeRange,
  NoTrappedMode,
  SlowDecayViolation,
  NoConvergence,
  UnsupportedPerturbation,
  DegenerateCoupling,
  ZeroBackgroundTransmission,
  DegenerateCollinear,
  IllConditionedProjection,
  NoZeroFound,
  NoDipDetected,
  InsufficientPoints,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception; kind() identifies the
// failure so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what);

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &what);

}  // namespace fano

#endif  // FANO_ERROR_HPP
