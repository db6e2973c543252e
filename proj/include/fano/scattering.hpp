// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_SCATTERING_HPP
#define FANO_SCATTERING_HPP

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "fano/fem.hpp"
#include "fano/geometry.hpp"
#include "fano/linear_solver.hpp"
#include "fano/mesh.hpp"
#include "fano/transparent_bc.hpp"

namespace fano
{

struct SolverSettings
{
  double h = 0.01;
  int order = 2;
  int dtn_terms = default_dtn_terms;
  int grading_levels = 0;
  double grading_factor = 0.5;
  int threads = 1;  // sweep workers; 0 means hardware concurrency
};

struct Defects
{
  double unitarity = 0.0;     // ||S conj(S)^T - Id||_F
  double energy_plus = 0.0;   // ||R+|^2 + |T|^2 - 1|
  double energy_minus = 0.0;  // ||R-|^2 + |T|^2 - 1|
  double reciprocity = 0.0;   // |T extracted from + incidence - T from - incidence|
  double cross = 0.0;         // |R+ conj(T) + T conj(R-)|
};

struct ScatteringMatrix
{
  double lambda = 0.0;
  cplx R_plus = 0.0, R_minus = 0.0, T = 0.0;
  cplx T_from_plus = 0.0, T_from_minus = 0.0;
  Defects defects;

  Eigen::Matrix2cd matrix() const;
};

// Recomputes all defects from the entries.
Defects matrix_defects(const ScatteringMatrix &S);
// Fills T (average of the two extractions) and the defects.
ScatteringMatrix make_scattering_matrix(double lambda, cplx R_plus, cplx R_minus, cplx T_from_plus,
                                        cplx T_from_minus);

struct DirectionalSolution
{
  CVec u;
  cplx R = 0.0, T = 0.0;
};

struct ScatteringSolve
{
  double lambda = 0.0;
  DirectionalSolution plus, minus;  // rightgoing and leftgoing incidence
  bool deflated = false;
  double rcond = 0.0;
};

//
// Mesh, operators and port data for one (perturbed) geometry. Immutable after
// construction; evaluations take a caller-owned SparseLU so that several
// workers can share one problem.
//
class ScatteringProblem
{
public:
  ScatteringProblem(const WaveguideGeometry &g, const SolverSettings &settings);

  const WaveguideGeometry &geometry() const { return geometry_; }
  const SolverSettings &settings() const { return settings_; }
  const Mesh &mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const AssembledOperators &operators() const { return ops_; }
  const PortSpace &port(Port p) const { return p == Port::left ? left_ : right_; }

  // K - lambda M - B_left(lambda) - B_right(lambda), on a fixed sparsity pattern.
  SpMat system_matrix(cplx lambda, Branch branch = Branch::physical) const;
  // d/dlambda of the system matrix applied to u: -M u - sum_n i/(2 beta_n) b_n b_n^T u.
  CVec system_derivative_apply(cplx lambda, const CVec &u, Branch branch = Branch::physical) const;

  // Both incidences from one factorization. With a deflation vector, or when the
  // factorization is near-singular, the bordered system against it is used
  // (a near-null vector is computed by inverse iteration when none is given).
  ScatteringSolve solve_both(double lambda, SparseLU &lu, const CVec *deflation = nullptr) const;
  ScatteringSolve solve_both(double lambda, const CVec *deflation = nullptr) const;

  ScatteringMatrix scattering_matrix(double lambda, SparseLU &lu) const;
  ScatteringMatrix scattering_matrix(double lambda) const;

  FieldSolution field(const CVec &u, cplx lambda) const { return {mesh_, u, lambda}; }

private:
  void extract(double lambda, DirectionalSolution &s, Direction dir) const;

  WaveguideGeometry geometry_;
  SolverSettings settings_;
  std::shared_ptr<const Mesh> mesh_;
  AssembledOperators ops_;
  PortSpace left_, right_;
  SpMat pattern_;
  std::vector<int> k_index_, m_index_;
  std::array<std::vector<int>, 2> port_index_;
};

MeshOptions mesh_options(const SolverSettings &s);

// Convenience wrappers building a fresh problem.
struct ScatteringResult
{
  FieldSolution field;
  cplx R = 0.0, T = 0.0;
};

ScatteringResult solve_scattering(const WaveguideGeometry &g, double lambda, Direction dir,
                                  const SolverSettings &settings);
ScatteringMatrix scattering_matrix(const WaveguideGeometry &g, double lambda, const SolverSettings &settings);

}  // namespace fano

#endif  // FANO_SCATTERING_HPP
