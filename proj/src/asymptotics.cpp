// SPDX-License-Identifier: Apache-2.0

#include "fano/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "fano/error.hpp"

namespace fano
{

ReferencePair compute_reference_pair(const ScatteringProblem &problem, double lambda0, const FieldSolution &u_tr)
{
  if (u_tr.coefficients.size() != problem.mesh().num_dofs())
  {
    fail(ErrorKind::MeshMismatch, "trapped mode does not live on the problem mesh");
  }
  const ScatteringSolve s = problem.solve_both(lambda0, &u_tr.coefficients);
  ReferencePair out;
  out.u_plus = problem.field(s.plus.u, lambda0);
  out.u_minus = problem.field(s.minus.u, lambda0);
  out.s0 = make_scattering_matrix(lambda0, s.plus.R, s.minus.R, s.plus.T, s.minus.T);
  const SpMat &M = problem.operators().M;
  out.orth_plus = std::abs(inner_product_l2(M, s.plus.u, u_tr.coefficients));
  out.orth_minus = std::abs(inner_product_l2(M, s.minus.u, u_tr.coefficients));
  return out;
}

ReferencePair compute_reference_pair(const WaveguideGeometry &g, const SolverSettings &settings, double lambda0,
                                     const FieldSolution &u_tr)
{
  const ScatteringProblem problem(g, settings);
  if (!u_tr.mesh || u_tr.mesh->nodes != problem.mesh().nodes)
  {
    fail(ErrorKind::MeshMismatch, "trapped mode was computed on a different mesh");
  }
  return compute_reference_pair(problem, lambda0, u_tr);
}

Segment profile_segment(const WaveguideGeometry &g, const PerturbationProfile &H)
{
  const double y = H.wall == Wall::top ? g.strip_height : 0.0;
  return {Point2(H.s0, y), Point2(H.s1, y)};
}

CouplingQuantities compute_coupling_quantities(const WaveguideGeometry &g, const PerturbationProfile &H,
                                               const TrappedMode &tm, const ReferencePair &U, int points_per_edge)
{
  if (g.perturbation_mode != PerturbationMode::wall_bump)
  {
    fail(ErrorKind::UnsupportedPerturbation, "coupling quantities are defined for wall profiles only");
  }
  const Segment seg = profile_segment(g, H);
  const double lam = tm.lambda0;
  const TraceSamples tr = boundary_trace(tm.field, seg, points_per_edge);
  const TraceSamples tp = boundary_trace(U.u_plus, seg, points_per_edge);
  const TraceSamples tn = boundary_trace(U.u_minus, seg, points_per_edge);

  CouplingQuantities c;
  for (std::size_t q = 0; q < tr.s.size(); ++q)
  {
    const double w = tr.weight[q] * H.value(H.s0 + tr.s[q]);
    const cplx u = tr.value[q], du = tr.derivative[q];
    c.kappa += w * (std::norm(du) - lam * std::norm(u));
    c.beta[0] += w * (du * std::conj(tp.derivative[q]) - lam * u * std::conj(tp.value[q]));
    c.beta[1] += w * (du * std::conj(tn.derivative[q]) - lam * u * std::conj(tn.value[q]));
  }
  c.alpha[0] = inner_product_l2(tm.field, U.u_plus);
  c.alpha[1] = inner_product_l2(tm.field, U.u_minus);
  return c;
}

double norm(const CPair &v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

CPair compute_tau(double kappa, const CPair &alpha, const CPair &beta, const Eigen::Matrix2cd &s0)
{
  const CPair v{kappa * alpha[0] - beta[0], kappa * alpha[1] - beta[1]};
  if (norm(v) < 1e-12)
  {
    fail(ErrorKind::DegenerateCoupling, "kappa alpha = beta: the resonance is not of the standard width");
  }
  return {v[0] * s0(0, 0) + v[1] * s0(1, 0), v[0] * s0(0, 1) + v[1] * s0(1, 1)};
}

Eigen::Matrix2cd asy_smatrix(double mu_tilde, const Eigen::Matrix2cd &s0, const CPair &tau)
{
  const double t2 = std::norm(tau[0]) + std::norm(tau[1]);
  if (!(t2 > 0.0))
  {
    fail(ErrorKind::InvalidArgument, "tau must be nonzero");
  }
  const cplx den = I * mu_tilde - 0.5 * t2;
  Eigen::Matrix2cd tt;
  tt << tau[0] * tau[0], tau[0] * tau[1], tau[1] * tau[0], tau[1] * tau[1];
  return s0 + tt / den;
}

ZeroIdentity zero_identity_residual(const CPair &tau, cplx T0, double zero_tolerance)
{
  if (std::abs(T0) < 1e-12)
  {
    fail(ErrorKind::ZeroBackgroundTransmission, "T0 vanishes");
  }
  const double a1 = std::abs(tau[0]), a2 = std::abs(tau[1]);
  const double t2 = a1 * a1 + a2 * a2;
  if (!(t2 > 0.0))
  {
    fail(ErrorKind::InvalidArgument, "tau must be nonzero");
  }
  const cplx q = tau[0] * tau[1] / T0;
  ZeroIdentity z;
  z.residual = std::abs(0.5 * t2 - q.real()) / (0.5 * t2);
  z.residual_expanded = std::abs(t2 - 2.0 * q.real()) / t2;
  z.mu_tilde_stationary = -q.imag();
  if (z.residual <= zero_tolerance)
  {
    z.mu_tilde_star = -q.imag();
  }
  z.criterion_gap = std::abs(a1 - a2) / std::sqrt(t2);
  return z;
}

Circle fit_circle(const std::vector<cplx> &points)
{
  const int n = static_cast<int>(points.size());
  if (n < 3)
  {
    fail(ErrorKind::DegenerateCollinear, "need at least three points");
  }
  // centre and scale first so the normal equations stay well conditioned
  cplx mean = 0.0;
  for (const cplx &p : points)
  {
    mean += p;
  }
  mean /= static_cast<double>(n);
  double scale = 0.0;
  for (const cplx &p : points)
  {
    scale = std::max(scale, std::abs(p - mean));
  }
  if (!(scale > 0.0))
  {
    fail(ErrorKind::DegenerateCollinear, "all points coincide");
  }
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i)
  {
    const cplx z = (points[i] - mean) / scale;
    A(i, 0) = z.real();
    A(i, 1) = z.imag();
    A(i, 2) = 1.0;
    b[i] = -std::norm(z);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  if (sv[2] < 1e-10 * sv[0])
  {
    fail(ErrorKind::DegenerateCollinear, "points are collinear");
  }
  const Eigen::Vector3d c = svd.solve(b);
  const cplx center_s(-0.5 * c[0], -0.5 * c[1]);
  const double r2 = std::norm(center_s) - c[2];
  if (!(r2 > 0.0))
  {
    fail(ErrorKind::DegenerateCollinear, "no real circle through the points");
  }
  Circle out;
  out.center = mean + scale * center_s;
  out.radius = scale * std::sqrt(r2);
  for (const cplx &p : points)
  {
    out.max_deviation = std::max(out.max_deviation, std::abs(std::abs(p - out.center) - out.radius));
  }
  return out;
}

Circle asy_transmission_circle(const CPair &tau, cplx T0)
{
  // w = 1/(i mu - a) sweeps the circle through 0 centred at -1/(2a)
  const double a = 0.5 * (std::norm(tau[0]) + std::norm(tau[1]));
  if (!(a > 0.0))
  {
    fail(ErrorKind::InvalidArgument, "tau must be nonzero");
  }
  const cplx c = tau[0] * tau[1];
  Circle out;
  out.center = T0 - c / (2.0 * a);
  out.radius = std::abs(c) / (2.0 * a);
  return out;
}

FanoAsymptotics compute_fano_asymptotics(const ScatteringProblem &problem, const PerturbationProfile &H,
                                         const TrappedMode &tm)
{
  const ReferencePair U = compute_reference_pair(problem, tm.lambda0, tm.field);
  const CouplingQuantities c = compute_coupling_quantities(problem.geometry(), H, tm, U);
  const Eigen::Matrix2cd s0 = U.s0.matrix();

  FanoAsymptotics a;
  a.lambda0 = tm.lambda0;
  a.s0 = U.s0;
  a.kappa = c.kappa;
  a.alpha = c.alpha;
  a.beta = c.beta;
  a.tau = compute_tau(c.kappa, c.alpha, c.beta, s0);
  a.orthogonality = std::max(U.orth_plus, U.orth_minus);

  const CPair bar{std::conj(a.tau[0]), std::conj(a.tau[1])};
  const CPair back = {bar[0] * s0(0, 0) + bar[1] * s0(1, 0), bar[0] * s0(0, 1) + bar[1] * s0(1, 1)};
  a.tau_consistency_residual = norm({back[0] - a.tau[0], back[1] - a.tau[1]}) / norm(a.tau);

  const ZeroIdentity z = zero_identity_residual(a.tau, U.s0.T);
  a.zero_identity_residual = z.residual;
  a.zero_identity_residual_expanded = z.residual_expanded;
  a.mu_tilde_star = z.mu_tilde_star;
  a.reflection_criterion_gap = z.criterion_gap;
  a.circle = asy_transmission_circle(a.tau, U.s0.T);
  return a;
}

namespace
{

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json pjson(const CPair &p) { return nlohmann::json::array({cjson(p[0]), cjson(p[1])}); }

}  // namespace

nlohmann::json to_json(const FanoAsymptotics &a)
{
  nlohmann::json j;
  j["lambda0"] = a.lambda0;
  j["kappa"] = a.kappa;
  j["alpha"] = pjson(a.alpha);
  j["beta"] = pjson(a.beta);
  j["tau"] = pjson(a.tau);
  j["T0"] = cjson(a.s0.T);
  j["R0_plus"] = cjson(a.s0.R_plus);
  j["R0_minus"] = cjson(a.s0.R_minus);
  j["circle"] = {{"center", cjson(a.circle.center)}, {"radius", a.circle.radius}};
  j["zero_identity_residual"] = a.zero_identity_residual;
  j["mu_tilde_star"] = a.mu_tilde_star ? nlohmann::json(*a.mu_tilde_star) : nlohmann::json(nullptr);
  j["criterion_gap"] = a.reflection_criterion_gap;
  j["tau_consistency_residual"] = a.tau_consistency_residual;
  j["orthogonality"] = a.orthogonality;
  return j;
}

}  // namespace fano
