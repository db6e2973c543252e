// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fano/error.hpp"
#include "fano/scattering.hpp"
#include "fano/transparent_bc.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fano;

namespace
{

std::shared_ptr<const Mesh> strip_mesh(double L, double h)
{
  MeshOptions o;
  o.h = h;
  return std::make_shared<const Mesh>(generate_mesh(test::strip(L), o));
}

// Port dofs sorted by y.
std::vector<int> sorted_port(const Mesh &m, const PortSpace &ps, std::vector<double> &y)
{
  std::vector<int> idx(ps.dofs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return m.nodes[ps.dofs[a]].y() < m.nodes[ps.dofs[b]].y(); });
  y.clear();
  for (int i : idx)
  {
    y.push_back(m.nodes[ps.dofs[i]].y());
  }
  return idx;
}

}  // namespace

TEST_CASE("axial wavenumbers")
{
  const double l = pi * pi / 4;
  CHECK(std::abs(axial_wavenumber(l, 0) - pi / 2) <= 1e-15);
  CHECK(std::abs(axial_wavenumber(l, 1) - I * (std::sqrt(3.0) / 2) * pi) <= 1e-14);
  CHECK(std::abs(axial_wavenumber(l, 1) - 2.7207 * I) <= 1e-4);
  CHECK(error_kind([] { axial_wavenumber(pi * pi, 1); }) == ErrorKind::ThresholdDegeneracy);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.05, 60.0);
  for (int k = 0; k < 200; ++k)
  {
    const double lam = u(rng);
    for (int n = 0; n < 4; ++n)
    {
      if (std::abs(lam - n * n * pi * pi) < 1e-6)
      {
        continue;
      }
      const cplx b = axial_wavenumber(lam, n);
      CHECK(b.imag() >= 0.0);
      CHECK(((b.real() != 0.0) != (b.imag() != 0.0)));
      CHECK((b.real() > 0.0) == (n * n * pi * pi < lam));
    }
  }
}

TEST_CASE("transverse profiles are orthonormal")
{
  for (int m = 0; m < 5; ++m)
  {
    for (int n = 0; n < 5; ++n)
    {
      const double g =
          oracle::integrate([&](double y) { return transverse_profile(m, y) * transverse_profile(n, y); }, 0, 1);
      CHECK(std::abs(g - (m == n ? 1.0 : 0.0)) <= 1e-13);
    }
  }
}

TEST_CASE("port projections match adaptive quadrature of the P2 trace basis")
{
  const auto m = strip_mesh(0.5, 0.05);
  for (Port p : {Port::left, Port::right})
  {
    const PortSpace ps = build_port_space(*m, p);
    std::vector<double> y;
    const std::vector<int> idx = sorted_port(*m, ps, y);
    double err = 0.0;
    for (int n = 0; n < ps.n_terms; ++n)
    {
      for (std::size_t j = 0; j < idx.size(); ++j)
      {
        const double ref =
            oracle::p2_projection(y, static_cast<int>(j), [n](double t) { return transverse_profile(n, t); });
        err = std::max(err, std::abs(ps.projection(idx[j], n) - ref));
      }
    }
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("DtN block: rank and action on cos(pi y)")
{
  const auto m = strip_mesh(0.5, 0.02);
  const PortSpace ps = build_port_space(*m, Port::right);
  const double lam = pi * pi / 4;
  const Eigen::MatrixXcd B = dtn_block(ps, lam);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  const auto &sv = svd.singularValues();
  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
  {
    rank += sv[k] > 1e-12 * sv[0] ? 1 : 0;
  }
  CHECK(rank <= ps.n_terms);
  CHECK(SpMat(dtn_matrix(*m, ps, lam)).nonZeros() == static_cast<long>(ps.dofs.size() * ps.dofs.size()));

  // B applied to the trace of cos(pi y) is i beta_1 times the port mass action on cos(pi y)
  std::vector<double> y;
  const std::vector<int> idx = sorted_port(*m, ps, y);
  CVec u(ps.dofs.size());
  for (std::size_t j = 0; j < ps.dofs.size(); ++j)
  {
    u[j] = std::cos(pi * m->nodes[ps.dofs[j]].y());
  }
  const CVec out = B * u;
  const cplx ib1 = I * axial_wavenumber(lam, 1);
  CHECK(std::abs(ib1 + std::sqrt(3.0) / 2 * pi) <= 1e-14);  // real, negative
  double err = 0.0, ref_norm = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j)
  {
    const double ref = oracle::p2_projection(y, static_cast<int>(j), [](double t) { return std::cos(pi * t); });
    err = std::max(err, std::abs(out[idx[j]] - ib1 * ref));
    ref_norm = std::max(ref_norm, std::abs(ib1 * ref));
  }
  CHECK(err <= 1e-6 * ref_norm);
}

TEST_CASE("incident load")
{
  const auto m = strip_mesh(0.5, 0.05);
  const PortSpace left = build_port_space(*m, Port::left);
  const PortSpace right = build_port_space(*m, Port::right);
  CHECK(incident_load(*m, left, 2.0, Direction::rightgoing, 0.0).norm() == 0.0);
  for (auto [ps, dir] : {std::pair{&left, Direction::rightgoing}, std::pair{&right, Direction::leftgoing}})
  {
    const CVec f = incident_load(*m, *ps, 2.0, dir);
    CHECK(f.norm() > 0.0);
    std::vector<bool> on_port(m->num_dofs(), false);
    for (int d : ps->dofs)
    {
      on_port[d] = true;
    }
    for (int i = 0; i < m->num_dofs(); ++i)
    {
      if (!on_port[i])
      {
        CHECK(f[i] == cplx(0.0));
      }
    }
  }
  CHECK(error_kind([&] { incident_load(*m, left, 10.0, Direction::rightgoing); }) ==
        ErrorKind::OutOfMonomodeRange);
}

TEST_CASE("straight strip reproduces the incident wave")
{
  SolverSettings s;
  s.h = 0.01;
  const double lam = 2.3 * 2.3;
  const ScatteringResult r = solve_scattering(test::strip(0.5), lam, Direction::rightgoing, s);
  const auto &mesh = r.field.mesh;
  const CVec w = interpolate(*mesh, [&](double x, double) { return std::exp(I * x * std::sqrt(lam)); });
  const FieldSolution diff{mesh, r.field.coefficients - w, lam};
  const FieldSolution wf{mesh, w, lam};
  CHECK(std::sqrt(std::abs(inner_product_l2(diff, diff) / inner_product_l2(wf, wf))) <= 1e-5);
  CHECK(std::abs(r.T - 1.0) <= 1e-4);
  CHECK(std::abs(r.R) <= 1e-4);
}

TEST_CASE("modal amplitude extraction")
{
  const auto m = strip_mesh(0.5, 0.01);
  const double lam = 2.0 * 2.0;
  const double k = std::sqrt(lam);

  const CVec wplus = interpolate(*m, [&](double x, double) { return std::exp(I * k * x); });
  const auto c = extract_modal_amplitudes(FieldSolution{m, wplus, lam}, Port::right, lam);
  CHECK(std::abs(c[0] - 1.0) <= 1e-12);

  const CVec cosy = interpolate(*m, [](double, double y) { return std::cos(pi * y); });
  const auto d = extract_modal_amplitudes(FieldSolution{m, cosy, lam}, Port::left, lam, default_dtn_terms,
                                          PhaseReference::port_local);
  CHECK(std::abs(d[0]) <= 1e-12);
  CHECK(std::abs(d[1] - 1.0 / std::sqrt(2.0)) <= 1e-8);

  // synthesize on the right port and extract
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> coef(5);
  for (auto &z : coef)
  {
    z = cplx(u(rng), u(rng));
  }
  const double L = 0.5;
  const CVec syn = interpolate(*m, [&](double x, double y) {
    cplx s = 0.0;
    for (int n = 0; n < 5; ++n)
    {
      s += coef[n] * transverse_profile(n, y) * std::exp(I * axial_wavenumber(lam, n) * (x - L));
    }
    return s;
  });
  const PortSpace ps = build_port_space(*m, Port::right);
  const auto got = extract_modal_amplitudes(syn, ps, lam, PhaseReference::port_local);
  // exact integral of the interpolated trace against phi_n
  std::vector<double> y;
  const std::vector<int> idx = sorted_port(*m, ps, y);
  for (int n = 0; n < 8; ++n)
  {
    cplx ref = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j)
    {
      ref += syn[ps.dofs[idx[j]]] *
             oracle::p2_projection(y, static_cast<int>(j), [n](double t) { return transverse_profile(n, t); });
    }
    CHECK(std::abs(got[n] - ref) <= 1e-10);
    CHECK(std::abs(got[n] - (n < 5 ? coef[n] : cplx(0.0))) <= 1e-6);
  }
}

TEST_CASE("DtN truncation and truncation length barely move T")
{
  const WaveguideGeometry g = apply_perturbation(test::reference_geometry(), 0.05);
  const double lam = 1.99 * 1.99;
  SolverSettings s;
  s.h = 0.02;
  const ScatteringMatrix a = scattering_matrix(g, lam, s);
  s.dtn_terms = 30;
  const ScatteringMatrix b = scattering_matrix(g, lam, s);
  CHECK(std::abs(std::abs(a.T) - std::abs(b.T)) < 1e-6);

  GeometryDescription d = load_geometry_description(test::config_path("reference.json"));
  d.L += 0.5;
  s.dtn_terms = default_dtn_terms;
  const ScatteringMatrix c = scattering_matrix(apply_perturbation(build_geometry(d), 0.05), lam, s);
  const double bound = std::exp(-2 * (0.75 - 0.6) * std::sqrt(pi * pi - lam)) + 10 * s.h * s.h;
  CHECK(std::abs(c.T - a.T) < bound);
  CHECK(std::abs(c.R_plus - a.R_plus) < bound);
}
