// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_ASYMPTOTICS_HPP
#define FANO_ASYMPTOTICS_HPP

#include <array>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fano/scattering.hpp"
#include "fano/spectral.hpp"

namespace fano
{

using CPair = std::array<cplx, 2>;

// Scattering solutions U = (u+, u-) at the trapped-mode frequency, made
// L2-orthogonal to u_tr, and the limiting matrix s0 = s(0, lambda0).
struct ReferencePair
{
  FieldSolution u_plus, u_minus;
  ScatteringMatrix s0;
  double orth_plus = 0.0, orth_minus = 0.0;  // |<u+-, u_tr>_L2|
};

ReferencePair compute_reference_pair(const ScatteringProblem &problem, double lambda0, const FieldSolution &u_tr);
ReferencePair compute_reference_pair(const WaveguideGeometry &g, const SolverSettings &settings, double lambda0,
                                     const FieldSolution &u_tr);

struct CouplingQuantities
{
  double kappa = 0.0;
  CPair alpha{}, beta{};
};

//   kappa = int_I H (|d_s u_tr|^2 - lambda0 |u_tr|^2) ds
//   alpha = int_Omega u_tr conj(U)
//   beta  = int_I H (d_s u_tr conj(d_s U) - lambda0 u_tr conj(U)) ds
// on the wall carrying H; U and u_tr live on the unperturbed mesh.
CouplingQuantities compute_coupling_quantities(const WaveguideGeometry &g, const PerturbationProfile &H,
                                               const TrappedMode &tm, const ReferencePair &U,
                                               int points_per_edge = 10);

// Wall segment carrying the profile.
Segment profile_segment(const WaveguideGeometry &g, const PerturbationProfile &H);

// tau = (kappa alpha - beta) s0, row vector times matrix.
CPair compute_tau(double kappa, const CPair &alpha, const CPair &beta, const Eigen::Matrix2cd &s0);

// s0 + tau^T tau / (i mu - |tau|^2 / 2).
Eigen::Matrix2cd asy_smatrix(double mu_tilde, const Eigen::Matrix2cd &s0, const CPair &tau);

double norm(const CPair &v);

struct ZeroIdentity
{
  double residual = 0.0;             // |(|t1|^2 + |t2|^2)/2 - Re(t1 t2 / T0)| / (|tau|^2 / 2)
  double residual_expanded = 0.0;    // ||tau|^2 - 2 Re(t1 t2 / T0)| / |tau|^2
  std::optional<double> mu_tilde_star;  // -Im(t1 t2 / T0), when residual <= the tolerance
  double mu_tilde_stationary = 0.0;  // the same value, always filled
  double criterion_gap = 0.0;        // ||t1| - |t2|| / |tau|
};

ZeroIdentity zero_identity_residual(const CPair &tau, cplx T0, double zero_tolerance = 0.05);

struct Circle
{
  cplx center = 0.0;
  double radius = 0.0;
  double max_deviation = 0.0;
};

// Algebraic (Kasa) least-squares circle.
Circle fit_circle(const std::vector<cplx> &points);

// Exact image circle of mu -> T0 + t1 t2 / (i mu - |tau|^2 / 2).
Circle asy_transmission_circle(const CPair &tau, cplx T0);

struct FanoAsymptotics
{
  double lambda0 = 0.0;
  ScatteringMatrix s0;
  double kappa = 0.0;
  CPair alpha{}, beta{}, tau{};
  std::optional<double> mu_tilde_star;
  Circle circle;
  double zero_identity_residual = 0.0;
  double zero_identity_residual_expanded = 0.0;
  double tau_consistency_residual = 0.0;  // |conj(tau) s0 - tau| / |tau|
  double reflection_criterion_gap = 0.0;
  double orthogonality = 0.0;             // max |<u+-, u_tr>|
};

// Full chain on the unperturbed problem (which must carry the bump profile).
FanoAsymptotics compute_fano_asymptotics(const ScatteringProblem &problem, const PerturbationProfile &H,
                                         const TrappedMode &tm);

nlohmann::json to_json(const FanoAsymptotics &a);

}  // namespace fano

#endif  // FANO_ASYMPTOTICS_HPP
