// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_GEOMETRY_HPP
#define FANO_GEOMETRY_HPP

#include <optional>
#include <vector>

namespace fano
{

// Axis-aligned rectangular void (x0,x1)x(y0,y1) removed from the strip.
struct Rect
{
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool contains(double x, double y) const { return x0 < x && x < x1 && y0 < y && y < y1; }
  bool operator==(const Rect &) const = default;
};

enum class Wall
{
  top,
  bottom
};

enum class PerturbationMode
{
  obstacle_shift,
  wall_bump
};

//
// Wall profile H supported on [s0,s1]. With xi = (s - s0)/(s1 - s0),
//   H(s) = (xi (1 - xi))^4 * sum_k coeffs[k] xi^k,
// so H and its first three derivatives vanish at both ends of the support.
//
struct PerturbationProfile
{
  Wall wall = Wall::top;
  double s0 = 0.0, s1 = 0.0;
  std::vector<double> coeffs;

  double value(double s) const;
  double derivative(double s) const;
  bool operator==(const PerturbationProfile &) const = default;
};

struct WaveguideGeometry
{
  double strip_height = 1.0;
  double L = 1.5;  // truncation half length, ports at x = -L and x = L
  double d = 1.0;  // the guide is the straight strip for |x| >= d
  std::vector<Rect> obstacles;
  std::optional<PerturbationProfile> bump;
  double epsilon = 0.0;  // accumulated perturbation amplitude
  PerturbationMode perturbation_mode = PerturbationMode::obstacle_shift;

  bool in_obstacle(double x, double y) const;

  // Height of the lowest admissible point of a top-wall bump (highest obstacle
  // top below the bump support), or the mirrored quantity for a bottom bump.
  double bump_anchor() const;

  // Exact area of the truncated rectilinear domain (-L,L)x(0,1) minus the union
  // of obstacles; the wall bump contributes epsilon * integral(H).
  double area() const;

  bool operator==(const WaveguideGeometry &) const = default;
};

struct MeshSettings
{
  double h = 0.02;
  int order = 2;
  int grading_levels = 0;  // extra mesh lines toward obstacle corners
};

// Mirror of the JSON geometry document.
struct GeometryDescription
{
  double L = 1.5;
  std::optional<double> d;
  std::vector<Rect> obstacles;
  PerturbationMode mode = PerturbationMode::obstacle_shift;
  double epsilon = 0.0;
  std::optional<PerturbationProfile> bump;
  MeshSettings mesh;
};

// Validates the description and returns the unperturbed geometry; the
// description's epsilon is applied separately through apply_perturbation.
WaveguideGeometry build_geometry(const GeometryDescription &desc);

// Checks every geometry invariant, throwing the matching error kind.
void validate_geometry(const WaveguideGeometry &g);

WaveguideGeometry apply_perturbation(const WaveguideGeometry &g, double epsilon);

}  // namespace fano

#endif  // FANO_GEOMETRY_HPP
