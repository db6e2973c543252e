// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "fano/asymptotics.hpp"
#include "fano/config.hpp"
#include "fano/error.hpp"
#include "fano/spectral.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fano;

namespace
{

double max_abs(const Eigen::Matrix2cd &m) { return m.cwiseAbs().maxCoeff(); }

ScatteringMatrix smatrix_of(const Eigen::Matrix2cd &s)
{
  return make_scattering_matrix(1.0, s(0, 0), s(1, 1), s(0, 1), s(1, 0));
}

// Trapped mode and reference pair on the bump geometry, computed once.
struct BumpCase
{
  std::unique_ptr<ScatteringProblem> problem;
  PerturbationProfile H;
  TrappedMode tm;
  ReferencePair U;
};

const BumpCase &bump_case()
{
  static const BumpCase c = [] {
    BumpCase b;
    const WaveguideGeometry g = test::bump_geometry();
    SolverSettings s;
    s.h = 0.01;
    b.problem = std::make_unique<ScatteringProblem>(g, s);
    b.H = *g.bump;
    b.tm = find_trapped_mode(*b.problem, 1.9 * 1.9, 2.1 * 2.1);
    b.U = compute_reference_pair(*b.problem, b.tm.lambda0, b.tm.field);
    return b;
  }();
  return c;
}

}  // namespace

TEST_CASE("tau by row-times-matrix and its norm")
{
  Eigen::Matrix2cd s0;
  s0 << 0.0, 1.0, 1.0, 0.0;
  const CPair t = compute_tau(3.7, {0.0, 0.0}, {1.0, 0.0}, s0);
  CHECK(std::abs(t[0]) <= 1e-15);
  CHECK(std::abs(t[1] + 1.0) <= 1e-15);

  std::mt19937 rng(2);
  std::normal_distribution<double> n;
  for (unsigned seed = 1; seed < 20; ++seed)
  {
    const auto f = oracle::synthetic_fano(seed);
    const double kappa = n(rng);
    const CPair alpha{cplx(n(rng), n(rng)), cplx(n(rng), n(rng))};
    const CPair beta{cplx(n(rng), n(rng)), cplx(n(rng), n(rng))};
    const CPair tau = compute_tau(kappa, alpha, beta, f.s0);
    const CPair v{kappa * alpha[0] - beta[0], kappa * alpha[1] - beta[1]};
    CHECK(std::abs(norm(tau) - norm(v)) <= 1e-12 * norm(v));
  }
  CHECK(error_kind([&] { compute_tau(1.0, {1.0, 2.0}, {1.0, 2.0}, s0); }) == ErrorKind::DegenerateCoupling);
}

TEST_CASE("asymptotic scattering matrix: limits, symmetry, unitarity")
{
  for (unsigned seed = 1; seed < 20; ++seed)
  {
    const auto f = oracle::synthetic_fano(seed);
    const CPair tau{f.tau[0], f.tau[1]};
    Eigen::Matrix2cd tt;
    tt << tau[0] * tau[0], tau[0] * tau[1], tau[1] * tau[0], tau[1] * tau[1];
    for (double mu : {-1e9, 1e9})
    {
      CHECK((asy_smatrix(mu, f.s0, tau) - f.s0).norm() <= 1e-8 * tt.norm());
    }
    for (double mu : {-10.0, 0.0, 10.0, 0.37})
    {
      const Eigen::Matrix2cd s = asy_smatrix(mu, f.s0, tau);
      CHECK(max_abs(s - oracle::s_asy(f, mu)) <= 1e-14);
      CHECK(max_abs(s - s.transpose()) <= 1e-15);
      CHECK((s * s.adjoint() - Eigen::Matrix2cd::Identity()).norm() <= 1e-12);
    }
  }
}

TEST_CASE("zero identity by arithmetic")
{
  const ZeroIdentity a = zero_identity_residual({1.0, 1.0}, 1.0);
  CHECK(a.residual == 0.0);
  REQUIRE(a.mu_tilde_star);
  CHECK(*a.mu_tilde_star == 0.0);
  CHECK(a.criterion_gap == 0.0);

  const ZeroIdentity b = zero_identity_residual({1.0, 0.0}, 1.0);
  CHECK(b.residual == doctest::Approx(1.0));
  CHECK(!b.mu_tilde_star);
  CHECK(b.criterion_gap == doctest::Approx(1.0));

  CHECK(error_kind([] { zero_identity_residual({1.0, 1.0}, 0.0); }) == ErrorKind::ZeroBackgroundTransmission);
}

TEST_CASE("consistent synthetic data: both forms of the identity vanish and T passes through zero")
{
  for (unsigned seed = 1; seed < 30; ++seed)
  {
    const auto f = oracle::synthetic_fano(seed);
    const CPair tau{f.tau[0], f.tau[1]};
    const cplx T0 = f.s0(0, 1);
    if (std::abs(T0) < 1e-3)
    {
      continue;
    }
    const ZeroIdentity z = zero_identity_residual(tau, T0);
    const double scale = 10.0 / std::abs(T0);  // q = tau1 tau2 / T0
    CHECK(z.residual <= 1e-14 * scale);
    CHECK(std::abs(z.residual - z.residual_expanded) <= 1e-14 * scale);
    REQUIRE(z.mu_tilde_star);
    CHECK(std::abs(asy_smatrix(*z.mu_tilde_star, f.s0, tau)(0, 1)) <= 1e-13);

    const Circle c = asy_transmission_circle(tau, T0);
    CHECK(std::abs(std::abs(T0 - c.center) - c.radius) <= 1e-12);
    CHECK(std::abs(std::abs(c.center) - c.radius) <= 1e-12);
  }
}

TEST_CASE("circle fit")
{
  const Circle c = fit_circle({cplx(1, 0), cplx(0, 1), cplx(-1, 0)});
  CHECK(std::abs(c.center) <= 1e-14);
  CHECK(c.radius == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(error_kind([] { fit_circle({cplx(0, 0), cplx(1, 1), cplx(2, 2)}); }) == ErrorKind::DegenerateCollinear);
  CHECK(error_kind([] { fit_circle({cplx(0, 0), cplx(1, 1)}); }) == ErrorKind::DegenerateCollinear);

  // T^asy over mu in [-20, 20] for tau = (1,1), T0 = 1
  Eigen::Matrix2cd s0;
  s0 << 0.0, 1.0, 1.0, 0.0;
  std::vector<cplx> pts;
  for (int k = 0; k < 50; ++k)
  {
    pts.push_back(asy_smatrix(-20.0 + 40.0 * k / 49, s0, {1.0, 1.0})(0, 1));
  }
  const Circle d = fit_circle(pts);
  CHECK(d.max_deviation <= 1e-12);
  CHECK(std::abs(std::abs(d.center) - d.radius) <= 1e-12);
  CHECK(std::abs(std::abs(1.0 - d.center) - d.radius) <= 1e-12);

  // Moebius images of a line under random consistent data
  for (unsigned seed = 1; seed < 10; ++seed)
  {
    const auto f = oracle::synthetic_fano(seed);
    std::vector<cplx> q;
    for (int k = 0; k < 40; ++k)
    {
      q.push_back(oracle::s_asy(f, -5.0 + 0.25 * k)(0, 1));
    }
    CHECK(fit_circle(q).max_deviation <= 1e-12);
  }
}

TEST_CASE("reference pair on the straight strip")
{
  SolverSettings s;
  s.h = 0.02;
  const ScatteringProblem p(test::strip(0.5), s);
  const double lam = 4.0;
  // any field orthogonal to both plane waves leaves the solution alone
  const FieldSolution v{p.mesh_ptr(),
                        interpolate(p.mesh(), [](double x, double y) { return std::cos(pi * y) * (1 - 4 * x * x); }),
                        lam};
  const ReferencePair U = compute_reference_pair(p, lam, v);
  CHECK(std::abs(U.s0.T - 1.0) <= 1e-4);
  CHECK(std::abs(U.s0.R_plus) <= 1e-4);
  const CVec w = interpolate(p.mesh(), [&](double x, double) { return std::exp(2.0 * I * x); });
  const CVec d = U.u_plus.coefficients - w;
  CHECK(std::sqrt(std::abs(inner_product_l2(p.operators().M, d, d) / inner_product_l2(p.operators().M, w, w))) <=
        1e-5);

  MeshOptions o;
  o.h = 0.05;
  const FieldSolution other{std::make_shared<const Mesh>(generate_mesh(test::strip(0.5), o)), CVec(), lam};
  CHECK(error_kind([&] { compute_reference_pair(test::strip(0.5), s, lam, other); }) == ErrorKind::MeshMismatch);
}

TEST_CASE("coupling quantities: null profile, linearity, quadrature oracle")
{
  const BumpCase &b = bump_case();
  const WaveguideGeometry &g = b.problem->geometry();
  const CouplingQuantities c = compute_coupling_quantities(g, b.H, b.tm, b.U);

  PerturbationProfile zero = b.H;
  zero.coeffs.assign(b.H.coeffs.size(), 0.0);
  const CouplingQuantities c0 = compute_coupling_quantities(g, zero, b.tm, b.U);
  CHECK(c0.kappa == 0.0);
  CHECK(std::abs(c0.beta[0]) == 0.0);
  CHECK(std::abs(c0.beta[1]) == 0.0);

  PerturbationProfile twice = b.H;
  for (double &k : twice.coeffs)
  {
    k *= 2.0;
  }
  const CouplingQuantities c2 = compute_coupling_quantities(g, twice, b.tm, b.U);
  CHECK(std::abs(c2.kappa - 2.0 * c.kappa) <= 1e-14 * std::abs(c.kappa));
  CHECK(std::abs(c2.beta[0] - 2.0 * c.beta[0]) <= 1e-14 * std::abs(c.beta[0]));
  CHECK(std::abs(c2.beta[1] - 2.0 * c.beta[1]) <= 1e-14 * std::abs(c.beta[1]));

  // adaptive quadrature over the same piecewise quadratic traces
  const Segment seg = profile_segment(g, b.H);
  const TraceSamples tr = boundary_trace(b.tm.field, seg);
  const TraceSamples tp = boundary_trace(b.U.u_plus, seg);
  const TraceSamples tn = boundary_trace(b.U.u_minus, seg);
  const double lam = b.tm.lambda0;
  double kappa = 0.0;
  cplx beta0 = 0.0, beta1 = 0.0;
  for (std::size_t e = 0; e < tr.pieces.size(); ++e)
  {
    const TracePiece &r = tr.pieces[e], &p = tp.pieces[e], &n = tn.pieces[e];
    auto H = [&](double s) { return b.H.value(b.H.s0 + s); };
    kappa += oracle::integrate(
        [&](double s) { return H(s) * (std::norm(r.derivative(s)) - lam * std::norm(r.value(s))); }, r.s_a, r.s_b);
    beta0 += oracle::integrate_c(
        [&](double s) {
          return H(s) * (r.derivative(s) * std::conj(p.derivative(s)) - lam * r.value(s) * std::conj(p.value(s)));
        },
        r.s_a, r.s_b);
    beta1 += oracle::integrate_c(
        [&](double s) {
          return H(s) * (r.derivative(s) * std::conj(n.derivative(s)) - lam * r.value(s) * std::conj(n.value(s)));
        },
        r.s_a, r.s_b);
  }
  CHECK(std::abs(kappa - c.kappa) <= 1e-10);
  CHECK(std::abs(beta0 - c.beta[0]) <= 1e-10);
  CHECK(std::abs(beta1 - c.beta[1]) <= 1e-10);

  const WaveguideGeometry shift = test::reference_geometry();
  CHECK(error_kind([&] { compute_coupling_quantities(shift, b.H, b.tm, b.U); }) ==
        ErrorKind::UnsupportedPerturbation);
}

TEST_CASE("reference pair at the trapped mode")
{
  const BumpCase &b = bump_case();
  CHECK(b.U.orth_plus <= 1e-8);
  CHECK(b.U.orth_minus <= 1e-8);

  // conj(U) s0 = U at random interior points
  const Mesh &m = b.problem->mesh();
  const ScatteringMatrix &s0 = b.U.s0;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ux(-m.L, m.L), uy(0.0, 1.0);
  int tested = 0;
  double worst = 0.0;
  while (tested < 100)
  {
    const Point2 q(ux(rng), uy(rng));
    cplx up, um;
    if (!evaluate(m, b.U.u_plus.coefficients, q, up) || !evaluate(m, b.U.u_minus.coefficients, q, um))
    {
      continue;
    }
    worst = std::max(worst, std::abs(s0.R_plus * std::conj(up) + s0.T * std::conj(um) - up));
    ++tested;
  }
  CHECK(worst <= 1e-3);

  const FanoAsymptotics a = compute_fano_asymptotics(*b.problem, b.H, b.tm);
  CHECK(a.tau_consistency_residual <= 1e-2);
  CHECK(a.zero_identity_residual <= 0.05);
  CHECK(std::abs(a.zero_identity_residual - a.zero_identity_residual_expanded) <= 1e-12);
  CHECK(std::abs(std::abs(a.s0.T - a.circle.center) - a.circle.radius) <= 1e-12);
  CHECK(std::abs(norm(a.tau) - norm({a.kappa * a.alpha[0] - a.beta[0], a.kappa * a.alpha[1] - a.beta[1]})) <=
        1e-12 * norm(a.tau));

  const nlohmann::json j = to_json(a);
  for (const char *k : {"kappa", "alpha", "beta", "tau", "T0", "circle", "zero_identity_residual", "mu_tilde_star",
                        "criterion_gap"})
  {
    CHECK(j.contains(k));
  }
}
