// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_TRANSPARENT_BC_HPP
#define FANO_TRANSPARENT_BC_HPP

#include <vector>

#include "fano/fem.hpp"
#include "fano/mesh.hpp"
#include "fano/types.hpp"

namespace fano
{

enum class Port
{
  left,
  right
};

enum class Direction
{
  rightgoing,  // incident e^{ix sqrt(lambda)} from the left
  leftgoing    // incident e^{-ix sqrt(lambda)} from the right
};

// absolute: amplitudes multiply e^{i beta_n |x|} in global coordinates;
// port_local: plain projections onto the transverse profiles.
enum class PhaseReference
{
  absolute,
  port_local
};

// physical: Im beta_n >= 0 everywhere (outgoing/decaying on the real axis).
// continued: analytic continuation of the real-axis values into the lower half
// plane, beta_n = sqrt(lambda - n^2 pi^2) for propagating n and
// i sqrt(n^2 pi^2 - lambda) for evanescent n; used for resonance refinement.
enum class Branch
{
  physical,
  continued
};

inline constexpr int default_dtn_terms = 20;

// sqrt(lambda - n^2 pi^2) with Im >= 0; ThresholdDegeneracy within 1e-10 of a cutoff.
cplx axial_wavenumber(cplx lambda, int n, Branch branch = Branch::physical);

// phi_0 = 1, phi_n = sqrt(2) cos(n pi y), orthonormal on (0,1).
double transverse_profile(int n, double y);

struct PortModes
{
  Port port = Port::left;
  cplx lambda = 0.0;
  int n_terms = default_dtn_terms;
  std::vector<cplx> beta;

  double profile(int n, double y) const { return transverse_profile(n, y); }
};

PortModes port_modes(Port port, cplx lambda, int n_terms = default_dtn_terms);

// Port dofs and the projections b_n[j] = integral over the port of phi_n psi_j.
struct PortSpace
{
  Port port = Port::left;
  double x = 0.0;
  int n_terms = default_dtn_terms;
  std::vector<int> dofs;
  Eigen::MatrixXd projection;  // dofs.size() x n_terms
};

PortSpace build_port_space(const Mesh &mesh, Port port, int n_terms = default_dtn_terms);

// Dense port block sum_n i beta_n b_n b_n^T.
Eigen::MatrixXcd dtn_block(const PortSpace &ps, cplx lambda, Branch branch = Branch::physical);
// Same scattered into a global sparse matrix.
SpMat dtn_matrix(const Mesh &mesh, const PortSpace &ps, cplx lambda, Branch branch = Branch::physical);

// Load for the total field driven by the incident plane wave; `inflow` must be the
// left port for rightgoing and the right port for leftgoing incidence.
CVec incident_load(const Mesh &mesh, const PortSpace &inflow, double lambda, Direction dir,
                   cplx amplitude = 1.0);

// c_n = <u(x_port, .), phi_n>, divided by e^{i beta_n L} for absolute phase.
std::vector<cplx> extract_modal_amplitudes(const CVec &u, const PortSpace &ps, cplx lambda,
                                           PhaseReference ref = PhaseReference::absolute);
std::vector<cplx> extract_modal_amplitudes(const FieldSolution &u, Port port, cplx lambda,
                                           int n_terms = default_dtn_terms,
                                           PhaseReference ref = PhaseReference::absolute);

}  // namespace fano

#endif  // FANO_TRANSPARENT_BC_HPP
