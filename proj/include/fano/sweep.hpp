// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_SWEEP_HPP
#define FANO_SWEEP_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fano/asymptotics.hpp"
#include "fano/scattering.hpp"

namespace fano
{

struct SweepRow
{
  double sqrt_lambda = 0.0;
  bool ok = true;
  std::string error;  // failure marker, empty on success
  ScatteringMatrix S;
};

struct SweepResult
{
  std::vector<SweepRow> rows;  // strictly increasing sqrt_lambda
  std::string geometry_hash;
  double epsilon = 0.0;
  SolverSettings settings;
  std::string oracle = "fem";  // "fem" or "mm"
  int mm_modes = 0;            // modes per unit width when oracle == "mm"

  std::vector<double> sqrt_lambdas() const;
  std::vector<cplx> transmissions() const;  // ok rows only
};

// Evaluates s(lambda) at `steps` equispaced sqrt(lambda) in [from, to], the
// endpoints included. The problem is built once; rows are computed by
// settings.threads workers and merged in order.
SweepResult run_sweep(const ScatteringProblem &problem, double from, double to, int steps);
// Applies the perturbation of amplitude epsilon to g first.
SweepResult run_sweep(const WaveguideGeometry &g, double epsilon, double from, double to, int steps,
                      const SolverSettings &settings);

// Same sampling with the mode-matching solver (obstacle geometries only).
SweepResult run_sweep_mm(const WaveguideGeometry &g, double epsilon, double from, double to, int steps,
                         int n_per_unit, int threads = 1);

// Generic ordered parallel map used by the sweeps: f(i, worker) for i < n.
void parallel_for(int n, int threads, const std::function<void(int, int)> &f);

void write_csv(std::ostream &os, const SweepResult &sweep);
void write_csv(const std::string &path, const SweepResult &sweep);
extern const char *const sweep_csv_header;

struct ZeroTransmissionResult
{
  double sqrt_lambda_star = 0.0;
  double min_abs_T = 0.0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  int iterations = 0;
};

// Minimizes |T|^2 over sqrt(lambda) in [a, b] (Brent: golden section with
// parabolic steps) until the bracket is below 1e-8; NoZeroFound when the
// minimum exceeds tol_zero.
ZeroTransmissionResult find_zero_transmission(const ScatteringProblem &problem, double a, double b,
                                              double tol_zero = 2e-2);
ZeroTransmissionResult find_zero_transmission(const std::function<cplx(double)> &T, double a, double b,
                                              double tol_zero = 2e-2);
ZeroTransmissionResult find_zero_transmission(const WaveguideGeometry &g, double epsilon, double a, double b,
                                              const SolverSettings &settings, double tol_zero = 2e-2);

// Full width of the set where |T|^2 lies below the midpoint between its
// minimum and the background (mean of the two end values).
double fano_width(const std::vector<double> &x, const std::vector<double> &abs_T2);
double fano_width(const SweepResult &sweep);

// s(epsilon, lambda0 + epsilon kappa + epsilon^2 mu) for one epsilon.
struct ConvergenceSample
{
  double epsilon = 0.0;
  std::vector<double> mu;
  std::vector<Eigen::Matrix2cd> S;
};

struct ConvergenceEntry
{
  double epsilon = 0.0;
  double deviation = 0.0;  // max over mu of max |entry of s - s_asy(A mu + B)|
  double A = 0.0, B = 0.0;
};

struct ConvergenceReport
{
  std::vector<ConvergenceEntry> entries;
  double slope = 0.0;  // least-squares slope of log deviation against log epsilon
};

// Fits mu_tilde = A mu + B per epsilon (alignment only) and measures the deviation.
ConvergenceReport analyze_convergence(const std::vector<ConvergenceSample> &samples, const Eigen::Matrix2cd &s0,
                                      const CPair &tau);

ConvergenceReport epsilon_convergence_study(const WaveguideGeometry &g0, const SolverSettings &settings,
                                            const FanoAsymptotics &asy, const std::vector<double> &epsilons,
                                            const std::vector<double> &mu);

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace fano

#endif  // FANO_SWEEP_HPP
