// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fano/error.hpp"
#include "fano/sweep.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fano;

TEST_CASE("straight strip sweep")
{
  SolverSettings s;
  s.h = 0.05;
  const SweepResult r = run_sweep(test::strip(0.5), 0.0, 0.5, 3.0, 50, s);
  REQUIRE(r.rows.size() == 50);
  CHECK(r.rows.front().sqrt_lambda == 0.5);
  CHECK(r.rows.back().sqrt_lambda == 3.0);
  for (std::size_t i = 0; i < r.rows.size(); ++i)
  {
    CHECK(r.rows[i].ok);
    CHECK(std::abs(r.rows[i].S.T - 1.0) <= 1e-4);
    if (i > 0)
    {
      CHECK(r.rows[i].sqrt_lambda > r.rows[i - 1].sqrt_lambda);
    }
  }

  const ScatteringProblem p(test::strip(0.5), s);
  CHECK(error_kind([&] { find_zero_transmission(p, 1.9, 2.1); }) == ErrorKind::NoZeroFound);
  CHECK(error_kind([&] { run_sweep(p, 1.0, 2.0, 1); }) == ErrorKind::InvalidArgument);
  CHECK(error_kind([&] { run_sweep(p, 1.0, 3.2, 10); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("parallel sweep matches the serial one, CSV layout")
{
  SolverSettings s;
  s.h = 0.02;
  const WaveguideGeometry g = test::centered_obstacle();
  const SweepResult a = run_sweep(g, 0.0, 1.5, 2.5, 8, s);
  s.threads = 3;
  const SweepResult b = run_sweep(g, 0.0, 1.5, 2.5, 8, s);
  for (std::size_t i = 0; i < a.rows.size(); ++i)
  {
    CHECK(std::abs(a.rows[i].S.T - b.rows[i].S.T) <= 1e-13);
  }

  std::ostringstream os;
  write_csv(os, a);
  std::istringstream is(os.str());
  std::string line;
  int comments = 0, data = 0;
  bool header = false;
  while (std::getline(is, line))
  {
    if (line.rfind("#", 0) == 0)
    {
      ++comments;
    }
    else if (!header)
    {
      CHECK(line == sweep_csv_header);
      header = true;
    }
    else
    {
      ++data;
    }
  }
  CHECK(comments >= 1);
  CHECK(data == 8);

  const SweepResult m = run_sweep_mm(g, 0.0, 1.5, 2.5, 8, 40);
  CHECK(m.oracle == "mm");
  CHECK(m.rows.size() == 8);
}

TEST_CASE("zero search on an analytic transmission")
{
  // |T| has a single simple zero at 2.0 and is not monotone around it
  auto T = [](double k) { return cplx(k - 2.0, 0.0) * cplx(1.0, 0.3) / cplx(k - 2.0, 0.1); };
  const ZeroTransmissionResult z = find_zero_transmission(T, 1.8, 2.3);
  CHECK(std::abs(z.sqrt_lambda_star - 2.0) <= 1e-6);
  CHECK(z.min_abs_T <= 1e-5);
  CHECK(z.bracket_hi - z.bracket_lo <= 1e-6);
  CHECK(error_kind([&] { find_zero_transmission(T, 2.1, 2.3); }) == ErrorKind::NoZeroFound);
  CHECK(error_kind([&] { find_zero_transmission(T, 2.3, 2.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("Fano width of a Lorentzian")
{
  const double x0 = 2.0, w = 0.01;
  std::vector<double> x, y;
  for (int i = 0; i < 400; ++i)
  {
    x.push_back(1.9 + 0.2 * i / 399.0);
    y.push_back(oracle::lorentzian_dip(x.back(), x0, w));
  }
  // half depth of a Lorentzian sits at its half width, regardless of the depth
  CHECK(fano_width(x, y) == doctest::Approx(2 * w).epsilon(0.02));

  std::vector<double> mono;
  for (double v : x)
  {
    mono.push_back(v);
  }
  CHECK(error_kind([&] { fano_width(x, mono); }) == ErrorKind::NoDipDetected);
  CHECK(error_kind([&] { fano_width({1.0, 2.0}, {1.0, 0.5}); }) == ErrorKind::NoDipDetected);
}

TEST_CASE("convergence analysis on synthetic data")
{
  const auto f = oracle::synthetic_fano(4);
  const CPair tau{f.tau[0], f.tau[1]};
  Eigen::Matrix2cd E;
  E << cplx(0.3, -0.1), cplx(0.2, 0.5), cplx(0.2, 0.5), cplx(-0.4, 0.2);
  std::vector<double> mu;
  for (int i = 0; i < 21; ++i)
  {
    mu.push_back(-2.0 + 0.2 * i);
  }
  std::vector<ConvergenceSample> samples;
  for (double eps : {1e-3, 2e-3, 4e-3, 8e-3})
  {
    ConvergenceSample c;
    c.epsilon = eps;
    c.mu = mu;
    for (double m : mu)
    {
      c.S.push_back(oracle::s_asy(f, m) + eps * E);
    }
    samples.push_back(c);
  }
  const ConvergenceReport r = analyze_convergence(samples, f.s0, tau);
  REQUIRE(r.entries.size() == 4);
  CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-2));
  for (const auto &e : r.entries)
  {
    CHECK(e.deviation <= 2.0 * e.epsilon);
  }

  CHECK(error_kind([&] { analyze_convergence({samples[0]}, f.s0, tau); }) == ErrorKind::InsufficientPoints);
  CHECK(loglog_slope({1.0, 10.0, 100.0}, {2.0, 20.0, 200.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(error_kind([] { loglog_slope({1.0}, {1.0}); }) == ErrorKind::InsufficientPoints);
  CHECK(error_kind([] { loglog_slope({1.0, 2.0}, {1.0, -1.0}); }) == ErrorKind::InvalidArgument);
}
