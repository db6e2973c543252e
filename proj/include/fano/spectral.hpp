// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_SPECTRAL_HPP
#define FANO_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "fano/fem.hpp"
#include "fano/scattering.hpp"

namespace fano
{

struct PmlSettings
{
  double thickness = 4.0;
  double sigma0 = 1.0;
  double max_spacing = 0.1;
};

// Operators on a mesh with PML columns, x-stretch 1 + i sigma0 inside them.
AssembledOperators assemble_pml(const Mesh &mesh, double sigma0);

struct ArnoldiOptions
{
  int krylov_dim = 20;
  int nev = 4;
  double tol = 1e-10;
  int max_restarts = 200;
  unsigned seed = 7;
};

struct EigenPair
{
  cplx lambda = 0.0;
  CVec vector;
  double residual = 0.0;  // ||(K - lambda M) x|| / ||x||
};

// Eigenvalues of K x = lambda M x nearest the shift by implicitly restarted
// Arnoldi on (K - shift M)^{-1} M; sorted by distance to the shift.
std::vector<EigenPair> shift_invert_eigs(const SpMat &K, const SpMat &M, cplx shift,
                                         const ArnoldiOptions &opts, const CVec *start = nullptr);

struct SpectralSettings
{
  PmlSettings pml;
  ArnoldiOptions arnoldi;
  double candidate_gate = 1e-3;  // |Im| / |lambda| for PML candidates
  double accept_ratio = 1e-6;    // |Im| / |lambda| after refinement
  int newton_max_iter = 30;
};

struct NonlinearEigenpair
{
  cplx lambda = 0.0;
  CVec u;
  int iterations = 0;
  bool converged = false;
};

// Nonlinear inverse iteration on T(lambda) = K - lambda M - B(lambda) of the
// truncated problem, DtN continued analytically across the real axis. An empty
// start vector is replaced by inverse iteration at the initial lambda.
NonlinearEigenpair refine_on_dtn(const ScatteringProblem &problem, cplx lambda, CVec u = CVec(),
                                 int max_iter = 30);

struct TrappedMode
{
  double lambda0 = 0.0;
  FieldSolution field;  // real, on the PML-free mesh, unit L2 norm over the infinite guide
  double K = 0.0;       // decay amplitude at x = d, made positive
  double residual = 0.0;
  cplx pml_lambda = 0.0;
  double imag_ratio = 0.0;  // |Im lambda| / |lambda| after refinement
  int newton_iterations = 0;

  double sqrt_lambda0() const;
};

// Searches (lambda_a, lambda_b) with the PML pencil, refines on the DtN problem of
// `problem` (its geometry and mesh size define the PML mesh too).
TrappedMode find_trapped_mode(const ScatteringProblem &problem, double lambda_a, double lambda_b,
                              const SpectralSettings &settings = {});

struct ComplexResonance
{
  cplx lambda_c = 0.0;
  cplx sqrt_lambda_c = 0.0;
  double sigma0 = 0.0, thickness = 0.0;
  double residual = 0.0;
  double stability_shift = 0.0;  // |lambda_c(2 sigma0) - lambda_c| / |lambda_c|
};

ComplexResonance find_resonance(const WaveguideGeometry &g, const SolverSettings &solver, cplx guess,
                                const SpectralSettings &settings = {});

// PML eigenvalues near the shift, for diagnostics.
std::vector<EigenPair> pml_eigenvalues(const WaveguideGeometry &g, const SolverSettings &solver, cplx shift,
                                       const SpectralSettings &settings, Mesh *mesh_out = nullptr);

}  // namespace fano

#endif  // FANO_SPECTRAL_HPP
