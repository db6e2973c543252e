// SPDX-License-Identifier: Apache-2.0
//
// fano: command line front end. Frequencies on the command line are sqrt(lambda).

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fano/asymptotics.hpp"
#include "fano/config.hpp"
#include "fano/error.hpp"
#include "fano/spectral.hpp"
#include "fano/sweep.hpp"

using namespace fano;
using nlohmann::json;

namespace
{

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

struct Loaded
{
  GeometryDescription desc;
  WaveguideGeometry geometry;  // unperturbed
  SolverSettings settings;
};

Loaded load(const std::string &path, int threads = 1)
{
  Loaded l;
  l.desc = load_geometry_description(path);
  l.geometry = build_geometry(l.desc);
  l.settings = solver_settings(l.desc);
  l.settings.threads = threads;
  return l;
}

void write_json(const json &j, const std::string &path)
{
  if (path.empty())
  {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f)
  {
    fail(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
  }
  f << j.dump(2) << "\n";
}

int cmd_sweep(const std::string &config, double from, double to, int steps, std::optional<double> eps,
              const std::string &out, const std::string &oracle, int mm_modes, int threads)
{
  const Loaded l = load(config, threads);
  const double e = eps.value_or(l.desc.epsilon);
  SweepResult r;
  if (oracle == "mm")
  {
    r = run_sweep_mm(l.geometry, e, from, to, steps, mm_modes, threads);
  }
  else
  {
    r = run_sweep(l.geometry, e, from, to, steps, l.settings);
  }
  write_csv(out, r);
  int failed = 0;
  for (const auto &row : r.rows)
  {
    if (!row.ok)
    {
      ++failed;
      std::cerr << "row " << row.sqrt_lambda << " failed: " << row.error << "\n";
    }
  }
  std::cerr << steps - failed << "/" << steps << " rows written to " << out << "\n";
  return 0;
}

int cmd_zero(const std::string &config, std::optional<double> eps, double a, double b, double tol)
{
  const Loaded l = load(config);
  const double e = eps.value_or(l.desc.epsilon);
  const ZeroTransmissionResult z = find_zero_transmission(l.geometry, e, a, b, l.settings, tol);
  write_json({{"epsilon", e},
              {"sqrt_lambda_star", z.sqrt_lambda_star},
              {"min_abs_T", z.min_abs_T},
              {"bracket", {z.bracket_lo, z.bracket_hi}},
              {"iterations", z.iterations}},
             "");
  return 0;
}

int cmd_trapped(const std::string &config, double from, double to, const std::string &out)
{
  const Loaded l = load(config);
  const ScatteringProblem problem(l.geometry, l.settings);
  const TrappedMode tm = find_trapped_mode(problem, from * from, to * to);
  write_json({{"lambda0", tm.lambda0},
              {"sqrt_lambda0", tm.sqrt_lambda0()},
              {"K", tm.K},
              {"residual", tm.residual},
              {"pml_lambda", cjson(tm.pml_lambda)},
              {"imag_ratio", tm.imag_ratio},
              {"newton_iterations", tm.newton_iterations},
              {"h", l.settings.h},
              {"order", l.settings.order}},
             out);
  return 0;
}

int cmd_resonance(const std::string &config, std::optional<double> eps, double re, double im)
{
  const Loaded l = load(config);
  const double e = eps.value_or(l.desc.epsilon);
  const cplx guess = cplx(re, im) * cplx(re, im);
  const ComplexResonance r = find_resonance(apply_perturbation(l.geometry, e), l.settings, guess);
  write_json({{"epsilon", e},
              {"lambda_c", cjson(r.lambda_c)},
              {"sqrt_lambda_c", cjson(r.sqrt_lambda_c)},
              {"sigma0", r.sigma0},
              {"pml_thickness", r.thickness},
              {"residual", r.residual},
              {"stability_shift", r.stability_shift}},
             "");
  return 0;
}

int cmd_asympt(const std::string &config, const std::string &bump, const std::string &out, double from, double to)
{
  Loaded l = load(config);
  const PerturbationProfile H = load_profile(bump);
  GeometryDescription desc = l.desc;
  desc.mode = PerturbationMode::wall_bump;
  desc.bump = H;
  const WaveguideGeometry g = build_geometry(desc);
  const ScatteringProblem problem(g, l.settings);
  const TrappedMode tm = find_trapped_mode(problem, from * from, to * to);
  json j = to_json(compute_fano_asymptotics(problem, H, tm));
  j["sqrt_lambda0"] = tm.sqrt_lambda0();
  j["h"] = l.settings.h;
  write_json(j, out);
  return 0;
}

// Invariants that must hold on any admissible geometry.
int cmd_verify(const std::string &config)
{
  const Loaded l = load(config);
  const WaveguideGeometry g = apply_perturbation(l.geometry, l.desc.epsilon);
  const ScatteringProblem problem(g, l.settings);
  int failures = 0;
  auto report = [&](const std::string &name, double value, double tol) {
    const bool ok = value <= tol;
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " = " << value << " (<= " << tol << ")\n";
  };

  const MeshReport mr = check_mesh(problem.mesh());
  report("mesh conforming/positive/ports", mr.ok() ? 0.0 : 1.0, 0.0);
  // curved bump cells are straight-sided in the mesh, so only obstacle geometries are exact
  const double area_tol = g.bump && g.epsilon != 0.0 ? 1e-4 : 1e-12;
  report("|mesh area - domain area| / area", std::abs(mr.area - g.area()) / g.area(), area_tol);
  report("|sum(M) - mesh area| / area", std::abs(problem.operators().M.sum().real() - mr.area) / mr.area, 1e-12);
  const CVec ones = CVec::Ones(problem.mesh().num_dofs());
  report("max |K 1|", (problem.operators().K * ones).cwiseAbs().maxCoeff(), 1e-12);

  const bool straight = g.obstacles.empty() && !(g.bump && g.epsilon != 0.0);
  SparseLU lu;
  for (double k : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
  {
    const ScatteringMatrix S = problem.scattering_matrix(k * k, lu);
    const std::string at = " at sqrt(lambda)=" + std::to_string(k).substr(0, 3);
    report("unitarity" + at, S.defects.unitarity, 1e-3);
    report("energy" + at, std::max(S.defects.energy_plus, S.defects.energy_minus), 1e-3);
    report("energy - 10 unitarity" + at,
           std::max(S.defects.energy_plus, S.defects.energy_minus) - 10.0 * S.defects.unitarity, 1e-14);
    report("reciprocity" + at, S.defects.reciprocity, 1e-6);
    if (straight)
    {
      report("|T - 1| + |R+| + |R-|" + at, std::abs(S.T - 1.0) + std::abs(S.R_plus) + std::abs(S.R_minus), 1e-4);
    }
  }
  std::cout << (failures == 0 ? "all invariants hold" : std::to_string(failures) + " invariant(s) violated") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Waveguide scattering, trapped modes and Fano resonances"};
  app.require_subcommand(1);

  std::string config, out, bump, oracle = "fem";
  double from = 0.0, to = 0.0, tol = 2e-2, guess_re = 0.0, guess_im = 0.0;
  std::optional<double> eps;
  int steps = 200, threads = 1, mm_modes = 320;
  std::vector<double> bracket;

  auto *sweep = app.add_subcommand("sweep", "sample the scattering matrix, write CSV");
  sweep->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--from", from, "first sqrt(lambda)")->required();
  sweep->add_option("--to", to, "last sqrt(lambda)")->required();
  sweep->add_option("--steps", steps, "number of samples, endpoints included")->required();
  sweep->add_option("--epsilon", eps, "perturbation amplitude (default: from the config)");
  sweep->add_option("--out", out, "CSV path")->required();
  sweep->add_option("--oracle", oracle, "solver")->check(CLI::IsMember({"fem", "mm"}));
  sweep->add_option("--mm-modes", mm_modes, "mode-matching modes per unit width");
  sweep->add_option("--threads", threads, "workers, 0 = all cores");

  auto *zero = app.add_subcommand("zero-t", "locate the transmission zero");
  zero->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);
  zero->add_option("--epsilon", eps, "perturbation amplitude");
  zero->add_option("--bracket", bracket, "sqrt(lambda) interval A B")->required()->expected(2);
  zero->add_option("--tol", tol, "largest |T| accepted as a zero");

  auto *trapped = app.add_subcommand("trapped", "find the embedded eigenvalue");
  trapped->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);
  trapped->add_option("--from", from, "lower sqrt(lambda)")->required();
  trapped->add_option("--to", to, "upper sqrt(lambda)")->required();
  trapped->add_option("--out", out, "JSON path (default stdout)");

  auto *res = app.add_subcommand("resonance", "complex resonance by PML");
  res->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);
  res->add_option("--epsilon", eps, "perturbation amplitude");
  res->add_option("--guess-re", guess_re, "Re sqrt(lambda) of the guess")->required();
  res->add_option("--guess-im", guess_im, "Im sqrt(lambda) of the guess")->required();

  double asy_from = 1.9, asy_to = 2.1;
  auto *asy = app.add_subcommand("asympt", "trapped mode, reference pair and Fano coefficients");
  asy->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);
  asy->add_option("--bump", bump, "bump profile JSON")->required()->check(CLI::ExistingFile);
  asy->add_option("--out", out, "JSON report path")->required();
  asy->add_option("--from", asy_from, "trapped mode search, lower sqrt(lambda)");
  asy->add_option("--to", asy_to, "trapped mode search, upper sqrt(lambda)");

  auto *verify = app.add_subcommand("verify", "run the invariant suite on a geometry");
  verify->add_option("--config", config, "geometry JSON")->required()->check(CLI::ExistingFile);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try
  {
    if (*sweep)
    {
      return cmd_sweep(config, from, to, steps, eps, out, oracle, mm_modes, threads);
    }
    if (*zero)
    {
      return cmd_zero(config, eps, bracket[0], bracket[1], tol);
    }
    if (*trapped)
    {
      return cmd_trapped(config, from, to, out);
    }
    if (*res)
    {
      return cmd_resonance(config, eps, guess_re, guess_im);
    }
    if (*asy)
    {
      return cmd_asympt(config, bump, out, asy_from, asy_to);
    }
    if (*verify)
    {
      return cmd_verify(config);
    }
  }
  catch (const Error &e)
  {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return e.kind() == ErrorKind::NoZeroFound || e.kind() == ErrorKind::NoTrappedMode ? 2 : 1;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
