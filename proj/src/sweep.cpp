// SPDX-License-Identifier: Apache-2.0

#include "fano/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <boost/math/tools/minima.hpp>

#include "fano/config.hpp"
#include "fano/error.hpp"
#include "fano/mode_matching.hpp"

namespace fano
{

const char *const sweep_csv_header =
    "sqrt_lambda, re_T, im_T, re_Rp, im_Rp, re_Rm, im_Rm, abs_T, unitarity_defect, energy_defect_p, "
    "energy_defect_m";

std::vector<double> SweepResult::sqrt_lambdas() const
{
  std::vector<double> x;
  for (const auto &r : rows)
  {
    if (r.ok)
    {
      x.push_back(r.sqrt_lambda);
    }
  }
  return x;
}

std::vector<cplx> SweepResult::transmissions() const
{
  std::vector<cplx> t;
  for (const auto &r : rows)
  {
    if (r.ok)
    {
      t.push_back(r.S.T);
    }
  }
  return t;
}

void parallel_for(int n, int threads, const std::function<void(int, int)> &f)
{
  if (threads <= 0)
  {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, n);
  if (threads <= 1)
  {
    for (int i = 0; i < n; ++i)
    {
      f(i, 0);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
  {
    pool.emplace_back([&, w] {
      for (int i = next++; i < n; i = next++)
      {
        f(i, w);
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
}

namespace
{

int worker_count(int threads)
{
  return threads <= 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : threads;
}

void check_range(double from, double to, int steps)
{
  if (steps < 2)
  {
    fail(ErrorKind::InvalidArgument, "a sweep needs at least two steps");
  }
  if (!(0.0 < from && from < to && to < pi))
  {
    fail(ErrorKind::InvalidArgument, "sweep range must satisfy 0 < from < to < pi");
  }
}

}  // namespace

SweepResult run_sweep(const ScatteringProblem &problem, double from, double to, int steps)
{
  check_range(from, to, steps);
  SweepResult out;
  out.geometry_hash = geometry_hash(problem.geometry());
  out.epsilon = problem.geometry().epsilon;
  out.settings = problem.settings();
  out.rows.resize(static_cast<std::size_t>(steps));
  const int workers = worker_count(problem.settings().threads);
  std::vector<SparseLU> lus(static_cast<std::size_t>(workers));
  parallel_for(steps, workers, [&](int i, int w) {
    SweepRow &row = out.rows[i];
    row.sqrt_lambda = from + (to - from) * i / (steps - 1);
    try
    {
      row.S = problem.scattering_matrix(row.sqrt_lambda * row.sqrt_lambda, lus[w]);
    }
    catch (const std::exception &e)
    {
      row.ok = false;
      row.error = e.what();
    }
  });
  return out;
}

SweepResult run_sweep(const WaveguideGeometry &g, double epsilon, double from, double to, int steps,
                      const SolverSettings &settings)
{
  const ScatteringProblem problem(apply_perturbation(g, epsilon), settings);
  return run_sweep(problem, from, to, steps);
}

SweepResult run_sweep_mm(const WaveguideGeometry &g, double epsilon, double from, double to, int steps,
                         int n_per_unit, int threads)
{
  check_range(from, to, steps);
  const WaveguideGeometry gp = apply_perturbation(g, epsilon);
  SweepResult out;
  out.geometry_hash = geometry_hash(gp);
  out.epsilon = gp.epsilon;
  out.settings.h = 0.0;
  out.settings.threads = threads;
  out.oracle = "mm";
  out.mm_modes = n_per_unit;
  out.rows.resize(static_cast<std::size_t>(steps));
  parallel_for(steps, worker_count(threads), [&](int i, int) {
    SweepRow &row = out.rows[i];
    row.sqrt_lambda = from + (to - from) * i / (steps - 1);
    try
    {
      row.S = mm_smatrix(gp, row.sqrt_lambda * row.sqrt_lambda, n_per_unit);
    }
    catch (const std::exception &e)
    {
      row.ok = false;
      row.error = e.what();
    }
  });
  return out;
}

void write_csv(std::ostream &os, const SweepResult &sweep)
{
  os << "# geometry " << sweep.geometry_hash << " epsilon " << sweep.epsilon;
  if (sweep.oracle == "mm")
  {
    os << " oracle mm modes_per_unit " << sweep.mm_modes << "\n";
  }
  else
  {
    os << " h " << sweep.settings.h << " order " << sweep.settings.order << " dtn_terms " << sweep.settings.dtn_terms
       << "\n";
  }
  os << sweep_csv_header << "\n";
  os << std::setprecision(12);
  for (const auto &r : sweep.rows)
  {
    if (!r.ok)
    {
      os << r.sqrt_lambda;
      for (int k = 0; k < 10; ++k)
      {
        os << ", nan";
      }
      os << "\n";
      continue;
    }
    const auto &S = r.S;
    os << r.sqrt_lambda << ", " << S.T.real() << ", " << S.T.imag() << ", " << S.R_plus.real() << ", "
       << S.R_plus.imag() << ", " << S.R_minus.real() << ", " << S.R_minus.imag() << ", " << std::abs(S.T) << ", "
       << S.defects.unitarity << ", " << S.defects.energy_plus << ", " << S.defects.energy_minus << "\n";
  }
}

void write_csv(const std::string &path, const SweepResult &sweep)
{
  std::ofstream f(path);
  if (!f)
  {
    fail(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
  }
  write_csv(f, sweep);
}

ZeroTransmissionResult find_zero_transmission(const std::function<cplx(double)> &T, double a, double b,
                                              double tol_zero)
{
  if (!(a < b))
  {
    fail(ErrorKind::InvalidArgument, "bracket must satisfy a < b");
  }
  // coarse samples pick the basin, Brent refines inside it
  constexpr int presample = 9;
  std::vector<double> xs(presample), fs(presample);
  int best = 0;
  for (int i = 0; i < presample; ++i)
  {
    xs[i] = a + (b - a) * i / (presample - 1);
    fs[i] = std::norm(T(xs[i]));
    if (fs[i] < fs[best])
    {
      best = i;
    }
  }
  const double lo = xs[std::max(0, best - 1)], hi = xs[std::min(presample - 1, best + 1)];
  constexpr int bits = 31;
  std::uintmax_t iters = 200;
  const auto [x, f] = boost::math::tools::brent_find_minima([&](double s) { return std::norm(T(s)); }, lo, hi,
                                                              bits, iters);
  ZeroTransmissionResult out;
  out.sqrt_lambda_star = x;
  out.min_abs_T = std::sqrt(f);
  const double tol = std::ldexp(1.0, 1 - bits);
  const double half = 2.0 * tol * std::abs(x) + 0.25 * tol;
  out.bracket_lo = x - half;
  out.bracket_hi = x + half;
  out.iterations = static_cast<int>(iters) + presample;
  if (out.min_abs_T > tol_zero)
  {
    std::ostringstream os;
    os << "min |T| = " << out.min_abs_T << " at sqrt(lambda) = " << x << " exceeds " << tol_zero;
    fail(ErrorKind::NoZeroFound, os.str());
  }
  return out;
}

ZeroTransmissionResult find_zero_transmission(const ScatteringProblem &problem, double a, double b,
                                              double tol_zero)
{
  SparseLU lu;
  return find_zero_transmission([&](double s) { return problem.scattering_matrix(s * s, lu).T; }, a, b, tol_zero);
}

ZeroTransmissionResult find_zero_transmission(const WaveguideGeometry &g, double epsilon, double a, double b,
                                              const SolverSettings &settings, double tol_zero)
{
  const ScatteringProblem problem(apply_perturbation(g, epsilon), settings);
  return find_zero_transmission(problem, a, b, tol_zero);
}

double fano_width(const std::vector<double> &x, const std::vector<double> &abs_T2)
{
  const int n = static_cast<int>(x.size());
  if (n < 3 || abs_T2.size() != x.size())
  {
    fail(ErrorKind::NoDipDetected, "too few samples");
  }
  const int m = static_cast<int>(std::min_element(abs_T2.begin(), abs_T2.end()) - abs_T2.begin());
  const double background = 0.5 * (abs_T2.front() + abs_T2.back());
  if (m == 0 || m == n - 1 || !(background - abs_T2[m] > 1e-3 * std::max(background, 1e-300)))
  {
    fail(ErrorKind::NoDipDetected, "no interior minimum below the background");
  }
  const double level = 0.5 * (abs_T2[m] + background);
  int l = m;
  while (l > 0 && abs_T2[l] < level)
  {
    --l;
  }
  int r = m;
  while (r < n - 1 && abs_T2[r] < level)
  {
    ++r;
  }
  if (abs_T2[l] < level || abs_T2[r] < level)
  {
    fail(ErrorKind::NoDipDetected, "dip does not rise back to half depth inside the sweep");
  }
  auto cross = [&](int i, int j) {
    const double t = (level - abs_T2[i]) / (abs_T2[j] - abs_T2[i]);
    return x[i] + t * (x[j] - x[i]);
  };
  return cross(r - 1, r) - cross(l + 1, l);
}

double fano_width(const SweepResult &sweep)
{
  std::vector<double> x, t2;
  for (const auto &r : sweep.rows)
  {
    if (r.ok)
    {
      x.push_back(r.sqrt_lambda);
      t2.push_back(std::norm(r.S.T));
    }
  }
  return fano_width(x, t2);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() < 2 || x.size() != y.size())
  {
    fail(ErrorKind::InsufficientPoints, "need at least two points for a slope");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    if (!(x[i] > 0.0 && y[i] > 0.0))
    {
      fail(ErrorKind::InvalidArgument, "log-log slope needs positive data");
    }
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0))
  {
    fail(ErrorKind::InsufficientPoints, "need two distinct abscissae");
  }
  return (n * sxy - sx * sy) / den;
}

namespace
{

double max_entry(const Eigen::Matrix2cd &D) { return D.cwiseAbs().maxCoeff(); }

Eigen::VectorXd fit_residual(const ConvergenceSample &s, const Eigen::Matrix2cd &s0, const CPair &tau, double A,
                             double B)
{
  Eigen::VectorXd r(8 * s.mu.size());
  for (std::size_t i = 0; i < s.mu.size(); ++i)
  {
    const Eigen::Matrix2cd D = s.S[i] - asy_smatrix(A * s.mu[i] + B, s0, tau);
    for (int k = 0; k < 4; ++k)
    {
      r[8 * i + 2 * k] = D(k / 2, k % 2).real();
      r[8 * i + 2 * k + 1] = D(k / 2, k % 2).imag();
    }
  }
  return r;
}

// Weighted regression of the Moebius-inverted transmissions, then
// Levenberg-Marquardt on all four entries.
void fit_alignment(const ConvergenceSample &s, const Eigen::Matrix2cd &s0, const CPair &tau, double &A, double &B)
{
  const cplx c = tau[0] * tau[1];
  const cplx T0 = s0(0, 1);
  double sw = 0, sm = 0, sy = 0, smm = 0, smy = 0;
  for (std::size_t i = 0; i < s.mu.size(); ++i)
  {
    const cplx d = s.S[i](0, 1) - T0;
    if (std::abs(d) < 1e-14)
    {
      continue;
    }
    const double w = std::norm(d);
    const double y = (c / d).imag();
    sw += w;
    sm += w * s.mu[i];
    sy += w * y;
    smm += w * s.mu[i] * s.mu[i];
    smy += w * s.mu[i] * y;
  }
  const double den = sw * smm - sm * sm;
  A = 1.0;
  B = 0.0;
  if (sw > 0.0 && std::abs(den) > 1e-300)
  {
    A = (sw * smy - sm * sy) / den;
    B = (sy - A * sm) / sw;
  }

  double damp = 1e-3;
  Eigen::VectorXd r = fit_residual(s, s0, tau, A, B);
  double cost = r.squaredNorm();
  for (int it = 0; it < 200; ++it)
  {
    Eigen::MatrixXd J(r.size(), 2);
    const double hA = 1e-7 * std::max(1.0, std::abs(A)), hB = 1e-7 * std::max(1.0, std::abs(B));
    J.col(0) = (fit_residual(s, s0, tau, A + hA, B) - fit_residual(s, s0, tau, A - hA, B)) / (2 * hA);
    J.col(1) = (fit_residual(s, s0, tau, A, B + hB) - fit_residual(s, s0, tau, A, B - hB)) / (2 * hB);
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * r;
    bool improved = false;
    while (damp < 1e12)
    {
      Eigen::Matrix2d Hm = JtJ;
      Hm.diagonal() *= 1.0 + damp;
      const Eigen::Vector2d step = Hm.ldlt().solve(-g);
      const Eigen::VectorXd rn = fit_residual(s, s0, tau, A + step[0], B + step[1]);
      if (rn.squaredNorm() < cost)
      {
        A += step[0];
        B += step[1];
        const double rel = (cost - rn.squaredNorm()) / std::max(cost, 1e-300);
        r = rn;
        cost = rn.squaredNorm();
        damp = std::max(damp * 0.3, 1e-12);
        improved = rel > 1e-14;
        break;
      }
      damp *= 10.0;
    }
    if (!improved)
    {
      break;
    }
  }
}

}  // namespace

ConvergenceReport analyze_convergence(const std::vector<ConvergenceSample> &samples, const Eigen::Matrix2cd &s0,
                                      const CPair &tau)
{
  if (samples.size() < 2)
  {
    fail(ErrorKind::InsufficientPoints, "need at least two epsilon values");
  }
  ConvergenceReport rep;
  std::vector<double> eps, dev;
  for (const auto &s : samples)
  {
    if (s.mu.empty() || s.mu.size() != s.S.size())
    {
      fail(ErrorKind::InvalidArgument, "empty or inconsistent convergence sample");
    }
    ConvergenceEntry e;
    e.epsilon = s.epsilon;
    fit_alignment(s, s0, tau, e.A, e.B);
    for (std::size_t i = 0; i < s.mu.size(); ++i)
    {
      e.deviation = std::max(e.deviation, max_entry(s.S[i] - asy_smatrix(e.A * s.mu[i] + e.B, s0, tau)));
    }
    rep.entries.push_back(e);
    eps.push_back(e.epsilon);
    dev.push_back(e.deviation);
  }
  rep.slope = loglog_slope(eps, dev);
  return rep;
}

ConvergenceReport epsilon_convergence_study(const WaveguideGeometry &g0, const SolverSettings &settings,
                                            const FanoAsymptotics &asy, const std::vector<double> &epsilons,
                                            const std::vector<double> &mu)
{
  if (epsilons.size() < 2)
  {
    fail(ErrorKind::InsufficientPoints, "need at least two epsilon values");
  }
  if (mu.empty())
  {
    fail(ErrorKind::InvalidArgument, "need mu samples");
  }
  std::vector<ConvergenceSample> samples;
  for (double eps : epsilons)
  {
    const ScatteringProblem problem(apply_perturbation(g0, eps), settings);
    ConvergenceSample s;
    s.epsilon = eps;
    s.mu = mu;
    s.S.resize(mu.size());
    const int workers = worker_count(settings.threads);
    std::vector<SparseLU> lus(static_cast<std::size_t>(workers));
    parallel_for(static_cast<int>(mu.size()), workers, [&](int i, int w) {
      const double lam = asy.lambda0 + eps * asy.kappa + eps * eps * mu[i];
      s.S[i] = problem.scattering_matrix(lam, lus[w]).matrix();
    });
    samples.push_back(std::move(s));
  }
  return analyze_convergence(samples, asy.s0.matrix(), asy.tau);
}

}  // namespace fano
