// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fano/error.hpp"
#include "fano/mode_matching.hpp"
#include "fano/scattering.hpp"
#include "fano/sweep.hpp"
#include "test_support.hpp"

using namespace fano;

TEST_CASE("matrix defects by arithmetic")
{
  ScatteringMatrix S = make_scattering_matrix(1.0, 0.0, 0.0, 1.0, 1.0);
  CHECK(S.defects.unitarity == 0.0);
  CHECK(S.defects.energy_plus == 0.0);
  CHECK(S.defects.energy_minus == 0.0);
  CHECK(S.defects.reciprocity == 0.0);
  CHECK(S.defects.cross == 0.0);

  for (double theta : {0.3, 1.7, -2.9})
  {
    const cplx t = std::exp(I * theta);
    const Defects d = make_scattering_matrix(1.0, 0.0, 0.0, t, t).defects;
    CHECK(d.unitarity <= 1e-15);
    CHECK(d.energy_plus <= 1e-15);
    CHECK(d.energy_minus <= 1e-15);
    CHECK(d.cross <= 1e-15);
  }

  S = make_scattering_matrix(1.0, 1.0, 0.0, 1.0, 1.0);
  CHECK(S.defects.energy_plus == doctest::Approx(1.0));
  CHECK(S.defects.energy_minus == 0.0);
  S.T = 0.5;
  CHECK(matrix_defects(S).energy_minus == doctest::Approx(0.75));
}

TEST_CASE("straight strip is transparent")
{
  SolverSettings s;
  s.h = 0.01;
  const ScatteringProblem p(test::strip(0.5), s);
  for (double k : {0.3, 1.2, 2.0, 3.1})
  {
    const ScatteringMatrix S = p.scattering_matrix(k * k);
    CHECK(std::abs(S.T - 1.0) <= 1e-4);
    CHECK(std::abs(S.R_plus) <= 1e-4);
    CHECK(std::abs(S.R_minus) <= 1e-4);
  }
  CHECK(error_kind([&] { p.scattering_matrix(10.0); }) == ErrorKind::OutOfMonomodeRange);
}

TEST_CASE("mirror-symmetric obstacle has equal reflections")
{
  SolverSettings s;
  s.h = 0.02;
  const ScatteringProblem p(test::centered_obstacle(), s);
  for (double k : {1.5, 2.0, 2.7})
  {
    const ScatteringMatrix S = p.scattering_matrix(k * k);
    CHECK(std::abs(S.R_plus - S.R_minus) <= 1e-6);
  }
}

TEST_CASE("single obstacle agrees with mode matching")
{
  SolverSettings s;
  s.h = 0.01;
  s.grading_levels = 4;
  const WaveguideGeometry g = test::centered_obstacle();
  const ScatteringMatrix fem = scattering_matrix(g, 4.0, s);
  const ScatteringMatrix mm = mm_smatrix(g, 4.0, 160);
  CHECK(std::abs(fem.T - mm.T) <= 5e-3);
  CHECK(std::abs(fem.R_plus - mm.R_plus) <= 5e-3);
}

TEST_CASE("structural defects on the perturbed reference geometry")
{
  const WaveguideGeometry g = apply_perturbation(test::reference_geometry(), 0.05);
  for (double h : {0.02, 0.01, 0.005})
  {
    SolverSettings s;
    s.h = h;
    const ScatteringMatrix S = scattering_matrix(g, 4.0, s);
    CHECK(S.defects.unitarity <= 1e-10);
    CHECK(S.defects.cross <= S.defects.unitarity + 1e-15);
    CHECK(S.defects.energy_plus <= S.defects.unitarity + 1e-15);
    CHECK(S.defects.energy_minus <= S.defects.unitarity + 1e-15);
    CHECK(S.defects.reciprocity <= 1e-6);
  }
}

TEST_CASE("reflection is total at the transmission zero")
{
  SolverSettings s;
  s.h = 0.01;
  const ScatteringProblem p(apply_perturbation(test::reference_geometry(), 0.05), s);
  const ZeroTransmissionResult z = find_zero_transmission(p, 1.99, 2.02);
  CHECK(std::abs(z.sqrt_lambda_star - 2.0072) <= 0.01);
  const ScatteringMatrix S = p.scattering_matrix(z.sqrt_lambda_star * z.sqrt_lambda_star);
  CHECK(std::abs(S.T) <= 0.02);
  CHECK(std::abs(std::abs(S.R_plus) - 1.0) <= 1e-3);
}
