// SPDX-License-Identifier: Apache-2.0

#include "fano/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "fano/error.hpp"
#include "fano/linear_solver.hpp"

namespace fano
{

namespace
{

CVec random_vector(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(n);
  for (int i = 0; i < n; ++i)
  {
    v[i] = cplx(nd(rng), nd(rng));
  }
  return v;
}

// Coordinates are grid-line values shared by both meshes, so exact keys work up
// to the rounding used here.
std::pair<long long, long long> key(const Point2 &p)
{
  return {std::llround(p.x() * 1e9), std::llround(p.y() * 1e9)};
}

CVec transfer(const Mesh &from, const CVec &u, const Mesh &to)
{
  std::map<std::pair<long long, long long>, int> index;
  for (int i = 0; i < from.num_dofs(); ++i)
  {
    index.emplace(key(from.nodes[i]), i);
  }
  CVec out(to.num_dofs());
  for (int i = 0; i < to.num_dofs(); ++i)
  {
    auto it = index.find(key(to.nodes[i]));
    if (it == index.end())
    {
      fail(ErrorKind::MeshMismatch, "PML mesh does not contain the truncated mesh");
    }
    out[i] = u[it->second];
  }
  return out;
}

MeshOptions pml_mesh_options(const SolverSettings &solver, const PmlSettings &pml)
{
  MeshOptions o = mesh_options(solver);
  o.pml_thickness = pml.thickness;
  o.pml_max_spacing = pml.max_spacing;
  return o;
}

}  // namespace

AssembledOperators assemble_pml(const Mesh &mesh, double sigma0)
{
  if (!mesh.has_pml())
  {
    fail(ErrorKind::InvalidMesh, "mesh has no PML layers");
  }
  if (!(sigma0 >= 0.0))
  {
    fail(ErrorKind::InvalidArgument, "sigma0 must be >= 0");
  }
  return assemble_operators(mesh, cplx(1.0, sigma0));
}

std::vector<EigenPair> shift_invert_eigs(const SpMat &K, const SpMat &M, cplx shift, const ArnoldiOptions &opts,
                                         const CVec *start)
{
  const int n = static_cast<int>(K.rows());
  const int m = std::min(opts.krylov_dim, n);
  const int nev = std::min(opts.nev, m - 2);
  if (nev < 1)
  {
    fail(ErrorKind::InvalidArgument, "Krylov dimension too small for the requested eigenvalues");
  }
  const int keep = std::min(m - 2, nev + 4);

  SpMat A = K - shift * M;
  A.makeCompressed();
  SparseLU lu;
  lu.factorize(A);
  auto op = [&](const CVec &x) { return CVec(lu.solve(M * x)); };

  Eigen::MatrixXcd V = Eigen::MatrixXcd::Zero(n, m);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m, m);
  CVec f;
  CVec v0 = start ? *start : random_vector(n, opts.seed);
  V.col(0) = v0 / v0.norm();
  unsigned reseed = opts.seed;

  auto extend = [&](int j0) {
    for (int j = j0; j < m; ++j)
    {
      CVec w = op(V.col(j));
      const double wn = w.norm();
      CVec h = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h;
      // one DGKS correction
      const CVec h2 = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h2;
      h += h2;
      H.col(j).head(j + 1) = h;
      const double beta = w.norm();
      if (j + 1 == m)
      {
        f = w;
        break;
      }
      if (beta < 1e-14 * wn)
      {
        // invariant subspace: continue with a fresh orthogonal direction
        CVec r = random_vector(n, ++reseed);
        r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        H(j + 1, j) = 0.0;
        V.col(j + 1) = r / r.norm();
      }
      else
      {
        H(j + 1, j) = beta;
        V.col(j + 1) = w / beta;
      }
    }
  };

  extend(0);
  for (int restart = 0;; ++restart)
  {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::VectorXcd theta = es.eigenvalues();
    const Eigen::MatrixXcd Y = es.eigenvectors();
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });

    const double fn = f.norm();
    bool converged = true;
    for (int i = 0; i < nev; ++i)
    {
      const int k = order[i];
      if (fn * std::abs(Y(m - 1, k)) > opts.tol * std::abs(theta[k]))
      {
        converged = false;
      }
    }
    if (converged || restart >= opts.max_restarts)
    {
      if (!converged)
      {
        std::ostringstream os;
        os << "Arnoldi did not converge after " << restart << " restarts";
        fail(ErrorKind::NoConvergence, os.str());
      }
      std::vector<EigenPair> out;
      for (int i = 0; i < nev; ++i)
      {
        const int k = order[i];
        EigenPair ep;
        ep.lambda = shift + 1.0 / theta[k];
        ep.vector = V * Y.col(k);
        ep.vector /= ep.vector.norm();
        ep.residual = (K * ep.vector - ep.lambda * (M * ep.vector)).norm();
        out.push_back(std::move(ep));
      }
      std::sort(out.begin(), out.end(), [&](const EigenPair &a, const EigenPair &b) {
        return std::abs(a.lambda - shift) < std::abs(b.lambda - shift);
      });
      return out;
    }

    // exact shifts at the unwanted Ritz values
    Eigen::MatrixXcd Qacc = Eigen::MatrixXcd::Identity(m, m);
    for (int i = keep; i < m; ++i)
    {
      const cplx mu = theta[order[i]];
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(H - mu * Eigen::MatrixXcd::Identity(m, m));
      const Eigen::MatrixXcd Q = qr.householderQ();
      H = Q.adjoint() * H * Q;
      Qacc = Qacc * Q;
    }
    for (int c = 0; c < m; ++c)
    {
      for (int r = c + 2; r < m; ++r)
      {
        H(r, c) = 0.0;
      }
    }
    V = V * Qacc;
    const CVec fk = V.col(keep) * H(keep, keep - 1) + f * Qacc(m - 1, keep - 1);
    H.block(0, keep, m, m - keep).setZero();
    H.block(keep, 0, m - keep, keep).setZero();
    const double beta = fk.norm();
    H(keep, keep - 1) = beta;
    V.col(keep) = fk / beta;
    V.rightCols(m - keep - 1).setZero();
    extend(keep);
  }
}

std::vector<EigenPair> pml_eigenvalues(const WaveguideGeometry &g, const SolverSettings &solver, cplx shift,
                                       const SpectralSettings &settings, Mesh *mesh_out)
{
  Mesh mesh = generate_mesh(g, pml_mesh_options(solver, settings.pml));
  const AssembledOperators ops = assemble_pml(mesh, settings.pml.sigma0);
  auto eigs = shift_invert_eigs(ops.K, ops.M, shift, settings.arnoldi);
  if (mesh_out)
  {
    *mesh_out = std::move(mesh);
  }
  return eigs;
}

double TrappedMode::sqrt_lambda0() const { return std::sqrt(lambda0); }

NonlinearEigenpair refine_on_dtn(const ScatteringProblem &problem, cplx lambda, CVec u, int max_iter)
{
  const SpMat &M = problem.operators().M;
  SparseLU lu;
  if (u.size() == 0)
  {
    // a few inverse-iteration steps at the fixed guess give the start vector
    u = random_vector(problem.mesh().num_dofs(), 11);
    lu.factorize(problem.system_matrix(lambda, Branch::continued));
    for (int k = 0; k < 3; ++k)
    {
      u = lu.solve(M * u);
      u /= u.norm();
    }
  }
  const CVec c = (M * u).conjugate();
  u /= c.transpose() * u;
  NonlinearEigenpair r;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it)
  {
    r.iterations = it;
    try
    {
      lu.factorize(problem.system_matrix(lambda, Branch::continued));
    }
    catch (const Error &e)
    {
      if (e.kind() == ErrorKind::SingularMatrix)
      {
        r.converged = true;  // landed on the eigenvalue to working precision
        break;
      }
      throw;
    }
    const CVec w = lu.solve(problem.system_derivative_apply(lambda, u, Branch::continued));
    const cplx lw = c.transpose() * w;
    const cplx delta = 1.0 / lw;
    lambda -= delta;
    u = w / lw;
    // stop at the roundoff floor: tiny step, or steps no longer shrinking
    const double step = std::abs(delta);
    if (step < 1e-12 * std::abs(lambda) || (step < 1e-9 * std::abs(lambda) && step > 0.5 * last_step))
    {
      r.converged = true;
      break;
    }
    last_step = step;
  }
  r.lambda = lambda;
  r.u = u;
  return r;
}

TrappedMode find_trapped_mode(const ScatteringProblem &problem, double lambda_a, double lambda_b,
                              const SpectralSettings &settings)
{
  if (!(0.0 < lambda_a && lambda_a < lambda_b && lambda_b < pi * pi))
  {
    fail(ErrorKind::InvalidArgument, "search interval must lie inside (0, pi^2)");
  }
  const WaveguideGeometry &g = problem.geometry();
  const double shift = 0.5 * (lambda_a + lambda_b);
  Mesh pmesh;
  SpectralSettings s = settings;
  s.arnoldi.nev = std::max(s.arnoldi.nev, 6);
  const auto eigs = pml_eigenvalues(g, problem.settings(), shift, s, &pmesh);

  std::vector<const EigenPair *> candidates;
  for (const auto &e : eigs)
  {
    if (e.lambda.real() >= lambda_a && e.lambda.real() <= lambda_b &&
        std::abs(e.lambda.imag()) < settings.candidate_gate * std::abs(e.lambda))
    {
      candidates.push_back(&e);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const EigenPair *a, const EigenPair *b) {
    return std::abs(a->lambda.imag()) < std::abs(b->lambda.imag());
  });

  const Mesh &mesh = problem.mesh();
  std::ostringstream rejected;
  for (const EigenPair *cand : candidates)
  {
    const CVec u0 = transfer(pmesh, cand->vector, mesh);
    const NonlinearEigenpair r = refine_on_dtn(problem, cand->lambda.real(), u0, settings.newton_max_iter);
    const double ratio = std::abs(r.lambda.imag()) / std::abs(r.lambda);
    if (!r.converged || ratio >= settings.accept_ratio || r.lambda.real() < lambda_a ||
        r.lambda.real() > lambda_b)
    {
      rejected << " " << r.lambda << (r.converged ? "" : " (not converged)");
      continue;
    }

    TrappedMode tm;
    tm.lambda0 = r.lambda.real();
    tm.pml_lambda = cand->lambda;
    tm.imag_ratio = ratio;
    tm.newton_iterations = r.iterations;

    // rotate to a real field and normalize in L2 of the whole guide: the
    // evanescent tails beyond the ports add sum_n |c_n|^2 / (2 kappa_n)
    const cplx ss = r.u.transpose() * r.u;
    const cplx rot = std::exp(-0.5 * I * std::arg(ss));
    CVec u = (r.u * rot).real().cast<cplx>();
    double tail = 0.0;
    for (Port port : {Port::left, Port::right})
    {
      const auto c = extract_modal_amplitudes(u, problem.port(port), r.lambda.real(), PhaseReference::port_local);
      for (int n = 1; n < static_cast<int>(c.size()); ++n)
      {
        tail += std::norm(c[n]) / (2.0 * std::sqrt(n * n * pi * pi - r.lambda.real()));
      }
    }
    const double inner = std::abs(inner_product_l2(problem.operators().M, u, u));
    u /= std::sqrt(inner + tail);

    const SpMat T = problem.system_matrix(tm.lambda0);
    tm.residual = (T * u).norm() / u.norm();

    const double kappa1 = std::sqrt(pi * pi - tm.lambda0);
    const cplx proj = line_integral(mesh, u, g.d, [](double y) { return transverse_profile(1, y); });
    double K = std::sqrt(2.0) * proj.real() * std::exp(g.d * kappa1);
    if (K < 0.0)
    {
      u = -u;
      K = -K;
    }
    if (std::abs(K) < 1e-8)
    {
      fail(ErrorKind::SlowDecayViolation, "trapped mode has a vanishing slowest-decay amplitude");
    }
    tm.K = K;
    tm.field = problem.field(u, tm.lambda0);
    return tm;
  }
  std::ostringstream os;
  os << "no real eigenvalue in (" << lambda_a << ", " << lambda_b << ")";
  if (!candidates.empty())
  {
    os << "; refined candidates:" << rejected.str();
  }
  fail(ErrorKind::NoTrappedMode, os.str());
}

ComplexResonance find_resonance(const WaveguideGeometry &g, const SolverSettings &solver, cplx guess,
                                const SpectralSettings &settings)
{
  auto nearest = [&](const SpectralSettings &s, cplx target) {
    const auto eigs = pml_eigenvalues(g, solver, target, s);
    const EigenPair *best = &eigs.front();
    for (const auto &e : eigs)
    {
      if (std::abs(e.lambda - target) < std::abs(best->lambda - target))
      {
        best = &e;
      }
    }
    return *best;
  };
  SpectralSettings single = settings;
  single.arnoldi.nev = 1;
  const EigenPair e1 = nearest(single, guess);
  SpectralSettings doubled = single;
  doubled.pml.sigma0 *= 2.0;
  const EigenPair e2 = nearest(doubled, e1.lambda);

  ComplexResonance res;
  res.lambda_c = e1.lambda;
  res.sqrt_lambda_c = std::sqrt(e1.lambda);
  res.sigma0 = settings.pml.sigma0;
  res.thickness = settings.pml.thickness;
  res.residual = e1.residual;
  res.stability_shift = std::abs(e2.lambda - e1.lambda) / std::abs(e1.lambda);
  return res;
}

}  // namespace fano
