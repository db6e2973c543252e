// SPDX-License-Identifier: Apache-2.0
//
// Reference computations used by the tests. None of them call into the
// library's discretization: quadrature is adaptive Gauss-Kronrod, spectra are
// analytic and synthetic Fano data is built from explicit formulas.

#ifndef FANO_TESTS_ORACLES_HPP
#define FANO_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle
{

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

inline double integrate(const std::function<double(double)> &f, double a, double b)
{
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 6, 1e-13);
}

inline cplx integrate_c(const std::function<cplx(double)> &f, double a, double b)
{
  return {integrate([&](double t) { return f(t).real(); }, a, b),
          integrate([&](double t) { return f(t).imag(); }, a, b)};
}

// Neumann eigenvalues of (0,a)x(0,b), sorted.
inline std::vector<double> neumann_rectangle_eigenvalues(double a, double b, int count)
{
  std::vector<double> ev;
  for (int m = 0; m < 40; ++m)
  {
    for (int n = 0; n < 40; ++n)
    {
      ev.push_back(std::pow(m * pi / a, 2) + std::pow(n * pi / b, 2));
    }
  }
  std::sort(ev.begin(), ev.end());
  ev.resize(static_cast<std::size_t>(count));
  return ev;
}

// Sorted port nodes y_0 < y_1 < ... < y_{2m} (vertex, midpoint, vertex, ...);
// integral over the support of basis j of phi(y) * hat_j(y), element by element.
inline double p2_projection(const std::vector<double> &y, int j, const std::function<double(double)> &phi)
{
  const int m = (static_cast<int>(y.size()) - 1) / 2;
  double s = 0.0;
  for (int e = 0; e < m; ++e)
  {
    if (j < 2 * e || j > 2 * e + 2)
    {
      continue;
    }
    const double a = y[2 * e], c = y[2 * e + 1], b = y[2 * e + 2];
    s += integrate(
        [&](double t) {
          const double l0 = (t - c) * (t - b) / ((a - c) * (a - b));
          const double l1 = (t - a) * (t - b) / ((c - a) * (c - b));
          const double l2 = (t - a) * (t - c) / ((b - a) * (b - c));
          const double l = j == 2 * e ? l0 : (j == 2 * e + 1 ? l1 : l2);
          return phi(t) * l;
        },
        a, b);
  }
  return s;
}

// |T|^2 with a Lorentzian dip of half-width w at x0 on background 1.
inline double lorentzian_dip(double x, double x0, double w, double depth = 0.9)
{
  return 1.0 - depth * w * w / ((x - x0) * (x - x0) + w * w);
}

// Random unitary symmetric s0 = V diag(e^{i theta}) V^T and a coupling row tau
// with conj(tau) s0 = tau: tau = v diag(e^{i theta/2}) V^T for real v.
struct FanoData
{
  Eigen::Matrix2cd s0;
  std::array<cplx, 2> tau;
};

inline FanoData synthetic_fano(unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-pi, pi);
  const double phi = u(rng), t1 = u(rng), t2 = u(rng);
  Eigen::Matrix2d V;
  V << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  const Eigen::Vector2cd d(std::exp(cplx(0, t1)), std::exp(cplx(0, t2)));
  FanoData f;
  f.s0 = V.cast<cplx>() * d.asDiagonal() * V.transpose().cast<cplx>();
  std::uniform_real_distribution<double> r(0.3, 1.5);
  const Eigen::RowVector2cd v(r(rng) * std::exp(cplx(0, t1 / 2)), r(rng) * std::exp(cplx(0, t2 / 2)));
  const Eigen::RowVector2cd t = v * V.transpose().cast<cplx>();
  f.tau = {t(0), t(1)};
  return f;
}

// s0 + tau^T tau / (i mu - |tau|^2 / 2), written out independently.
inline Eigen::Matrix2cd s_asy(const FanoData &f, double mu)
{
  const double t2 = std::norm(f.tau[0]) + std::norm(f.tau[1]);
  const cplx den = cplx(0, mu) - 0.5 * t2;
  Eigen::Matrix2cd m = f.s0;
  for (int i = 0; i < 2; ++i)
  {
    for (int j = 0; j < 2; ++j)
    {
      m(i, j) += f.tau[i] * f.tau[j] / den;
    }
  }
  return m;
}

}  // namespace oracle

#endif  // FANO_TESTS_ORACLES_HPP
