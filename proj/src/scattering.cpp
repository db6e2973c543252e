// SPDX-License-Identifier: Apache-2.0

#include "fano/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fano/error.hpp"

namespace fano
{

namespace
{

int find_entry(const SpMat &S, int row, int col)
{
  const int *begin = S.innerIndexPtr() + S.outerIndexPtr()[col];
  const int *end = S.innerIndexPtr() + S.outerIndexPtr()[col + 1];
  const int *it = std::lower_bound(begin, end, row);
  if (it == end || *it != row)
  {
    fail(ErrorKind::InvalidArgument, "entry missing from the system pattern");
  }
  return static_cast<int>(it - S.innerIndexPtr());
}

std::vector<int> map_into(const SpMat &S, const SpMat &A)
{
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int c = 0; c < A.outerSize(); ++c)
  {
    for (SpMat::InnerIterator it(A, c); it; ++it)
    {
      idx.push_back(find_entry(S, static_cast<int>(it.row()), c));
    }
  }
  return idx;
}

constexpr double near_singular_rcond = 1e-12;
constexpr double near_singular_norm = 1e8;

}  // namespace

Eigen::Matrix2cd ScatteringMatrix::matrix() const
{
  Eigen::Matrix2cd S;
  S << R_plus, T, T, R_minus;
  return S;
}

Defects matrix_defects(const ScatteringMatrix &S)
{
  const Eigen::Matrix2cd s = S.matrix();
  Defects d;
  d.unitarity = (s * s.adjoint() - Eigen::Matrix2cd::Identity()).norm();
  d.energy_plus = std::abs(std::norm(S.R_plus) + std::norm(S.T) - 1.0);
  d.energy_minus = std::abs(std::norm(S.R_minus) + std::norm(S.T) - 1.0);
  d.reciprocity = std::abs(S.T_from_plus - S.T_from_minus);
  d.cross = std::abs(S.R_plus * std::conj(S.T) + S.T * std::conj(S.R_minus));
  return d;
}

ScatteringMatrix make_scattering_matrix(double lambda, cplx R_plus, cplx R_minus, cplx T_from_plus,
                                        cplx T_from_minus)
{
  ScatteringMatrix S;
  S.lambda = lambda;
  S.R_plus = R_plus;
  S.R_minus = R_minus;
  S.T_from_plus = T_from_plus;
  S.T_from_minus = T_from_minus;
  S.T = 0.5 * (T_from_plus + T_from_minus);
  S.defects = matrix_defects(S);
  return S;
}

MeshOptions mesh_options(const SolverSettings &s)
{
  MeshOptions o;
  o.h = s.h;
  o.order = s.order;
  o.grading_levels = s.grading_levels;
  o.grading_factor = s.grading_factor;
  return o;
}

ScatteringProblem::ScatteringProblem(const WaveguideGeometry &g, const SolverSettings &settings)
    : geometry_(g), settings_(settings)
{
  validate_geometry(g);
  auto mesh = std::make_shared<Mesh>(generate_mesh(g, mesh_options(settings)));
  mesh_ = mesh;
  ops_ = assemble_operators(*mesh_);
  left_ = build_port_space(*mesh_, Port::left, settings.dtn_terms);
  right_ = build_port_space(*mesh_, Port::right, settings.dtn_terms);

  // union pattern of K, M and the two dense port blocks
  std::vector<Eigen::Triplet<cplx>> trip;
  const int n = mesh_->num_dofs();
  for (const SpMat *A : {&ops_.K, &ops_.M})
  {
    for (int c = 0; c < A->outerSize(); ++c)
    {
      for (SpMat::InnerIterator it(*A, c); it; ++it)
      {
        trip.emplace_back(static_cast<int>(it.row()), c, cplx(0.0));
      }
    }
  }
  for (const PortSpace *ps : {&left_, &right_})
  {
    for (int a : ps->dofs)
    {
      for (int b : ps->dofs)
      {
        trip.emplace_back(a, b, cplx(0.0));
      }
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();
  k_index_ = map_into(pattern_, ops_.K);
  m_index_ = map_into(pattern_, ops_.M);
  for (int p = 0; p < 2; ++p)
  {
    const PortSpace &ps = p == 0 ? left_ : right_;
    auto &idx = port_index_[p];
    for (int b : ps.dofs)
    {
      for (int a : ps.dofs)
      {
        idx.push_back(find_entry(pattern_, a, b));
      }
    }
  }
}

SpMat ScatteringProblem::system_matrix(cplx lambda, Branch branch) const
{
  SpMat A = pattern_;
  cplx *v = A.valuePtr();
  std::fill(v, v + A.nonZeros(), cplx(0.0));
  const cplx *kv = ops_.K.valuePtr();
  const cplx *mv = ops_.M.valuePtr();
  for (std::size_t e = 0; e < k_index_.size(); ++e)
  {
    v[k_index_[e]] += kv[e];
  }
  for (std::size_t e = 0; e < m_index_.size(); ++e)
  {
    v[m_index_[e]] -= lambda * mv[e];
  }
  for (int p = 0; p < 2; ++p)
  {
    const Eigen::MatrixXcd B = dtn_block(p == 0 ? left_ : right_, lambda, branch);
    const auto &idx = port_index_[p];
    const int np = static_cast<int>(B.rows());
    for (int b = 0; b < np; ++b)
    {
      for (int a = 0; a < np; ++a)
      {
        v[idx[static_cast<std::size_t>(b) * np + a]] -= B(a, b);
      }
    }
  }
  return A;
}

CVec ScatteringProblem::system_derivative_apply(cplx lambda, const CVec &u, Branch branch) const
{
  CVec out = -(ops_.M * u);
  for (const PortSpace *ps : {&left_, &right_})
  {
    const int np = static_cast<int>(ps->dofs.size());
    CVec up(np);
    for (int j = 0; j < np; ++j)
    {
      up[j] = u[ps->dofs[j]];
    }
    for (int n = 0; n < ps->n_terms; ++n)
    {
      const cplx coef = -I / (2.0 * axial_wavenumber(lambda, n, branch));
      const cplx proj = ps->projection.col(n).cast<cplx>().dot(up);  // real weights, no conjugation effect
      for (int j = 0; j < np; ++j)
      {
        out[ps->dofs[j]] += coef * ps->projection(j, n) * proj;
      }
    }
  }
  return out;
}

void ScatteringProblem::extract(double lambda, DirectionalSolution &s, Direction dir) const
{
  const double k = std::sqrt(lambda);
  const cplx incident = std::exp(-2.0 * I * k * mesh_->L);
  const cplx cl = extract_modal_amplitudes(s.u, left_, lambda)[0];
  const cplx cr = extract_modal_amplitudes(s.u, right_, lambda)[0];
  if (dir == Direction::rightgoing)
  {
    s.R = cl - incident;
    s.T = cr;
  }
  else
  {
    s.R = cr - incident;
    s.T = cl;
  }
}

ScatteringSolve ScatteringProblem::solve_both(double lambda, SparseLU &lu, const CVec *deflation) const
{
  if (!(lambda > 0.0 && lambda < pi * pi))
  {
    fail(ErrorKind::OutOfMonomodeRange, "lambda outside (0, pi^2)");
  }
  ScatteringSolve out;
  out.lambda = lambda;
  const SpMat A = system_matrix(lambda);
  const CVec Gp = incident_load(*mesh_, left_, lambda, Direction::rightgoing);
  const CVec Gm = incident_load(*mesh_, right_, lambda, Direction::leftgoing);

  bool singular = false;
  try
  {
    lu.factorize(A);
    out.rcond = lu.rcond();
  }
  catch (const Error &e)
  {
    if (e.kind() != ErrorKind::SingularMatrix)
    {
      throw;
    }
    singular = true;
  }
  if (!singular && !deflation)
  {
    out.plus.u = lu.solve(Gp);
    out.minus.u = lu.solve(Gm);
    const double big = std::max(out.plus.u.cwiseAbs().maxCoeff(), out.minus.u.cwiseAbs().maxCoeff());
    if (out.rcond >= near_singular_rcond && big <= near_singular_norm)
    {
      extract(lambda, out.plus, Direction::rightgoing);
      extract(lambda, out.minus, Direction::leftgoing);
      return out;
    }
  }

  CVec v;
  if (deflation)
  {
    v = *deflation;
  }
  else
  {
    if (singular)
    {
      fail(ErrorKind::SingularMatrix, "exactly singular system and no deflation vector");
    }
    // inverse iteration with the existing factorization
    std::mt19937 rng(12345);
    std::normal_distribution<double> nd;
    v.resize(A.rows());
    for (int i = 0; i < v.size(); ++i)
    {
      v[i] = nd(rng);
    }
    for (int it = 0; it < 4; ++it)
    {
      v = lu.solve(ops_.M * v);
      v /= v.norm();
    }
  }
  try
  {
    out.plus.u = deflated_solve(A, Gp, v, &ops_.M);
    out.minus.u = deflated_solve(A, Gm, v, &ops_.M);
  }
  catch (const Error &e)
  {
    fail(ErrorKind::SingularMatrix, std::string("deflated solve failed: ") + e.what());
  }
  out.deflated = true;
  extract(lambda, out.plus, Direction::rightgoing);
  extract(lambda, out.minus, Direction::leftgoing);
  return out;
}

ScatteringSolve ScatteringProblem::solve_both(double lambda, const CVec *deflation) const
{
  SparseLU lu;
  return solve_both(lambda, lu, deflation);
}

ScatteringMatrix ScatteringProblem::scattering_matrix(double lambda, SparseLU &lu) const
{
  const ScatteringSolve s = solve_both(lambda, lu);
  return make_scattering_matrix(lambda, s.plus.R, s.minus.R, s.plus.T, s.minus.T);
}

ScatteringMatrix ScatteringProblem::scattering_matrix(double lambda) const
{
  SparseLU lu;
  return scattering_matrix(lambda, lu);
}

ScatteringResult solve_scattering(const WaveguideGeometry &g, double lambda, Direction dir,
                                  const SolverSettings &settings)
{
  const ScatteringProblem problem(g, settings);
  const ScatteringSolve s = problem.solve_both(lambda);
  const DirectionalSolution &d = dir == Direction::rightgoing ? s.plus : s.minus;
  return {problem.field(d.u, lambda), d.R, d.T};
}

ScatteringMatrix scattering_matrix(const WaveguideGeometry &g, double lambda, const SolverSettings &settings)
{
  return ScatteringProblem(g, settings).scattering_matrix(lambda);
}

}  // namespace fano
