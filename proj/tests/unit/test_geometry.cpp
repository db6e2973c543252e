// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fano/config.hpp"
#include "fano/error.hpp"
#include "fano/mesh.hpp"
#include "test_support.hpp"

using namespace fano;

TEST_CASE("empty obstacle list gives the straight strip")
{
  GeometryDescription d;
  d.L = 1.0;
  const WaveguideGeometry g = build_geometry(d);
  CHECK(g.obstacles.empty());
  CHECK(!g.bump);
  CHECK(g.area() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("obstacle leaving the strip is rejected")
{
  GeometryDescription d;
  d.obstacles = {{-0.2, 0.2, 0.5, 1.2}};
  CHECK(error_kind([&] { build_geometry(d); }) == ErrorKind::ObstacleOutOfStrip);
}

TEST_CASE("bump support must stay inside (-d, d)")
{
  GeometryDescription d;
  d.L = 1.0;
  d.d = 0.5;
  d.mode = PerturbationMode::wall_bump;
  d.bump = PerturbationProfile{Wall::top, -0.75, -0.25, {1.0}};
  CHECK(error_kind([&] { build_geometry(d); }) == ErrorKind::BumpSupportTooWide);
}

TEST_CASE("reference geometry parses and shifts by epsilon")
{
  const WaveguideGeometry g = test::reference_geometry();
  REQUIRE(g.obstacles.size() == 2);
  const WaveguideGeometry g0 = apply_perturbation(g, 0.0);
  CHECK(g0 == g);

  const WaveguideGeometry ge = apply_perturbation(g, 0.05);
  CHECK(ge.obstacles[0].x0 == -0.5);
  CHECK(ge.obstacles[0].x1 == 0.5);
  CHECK(ge.obstacles[0].y0 == doctest::Approx(0.40).epsilon(1e-14));
  CHECK(ge.obstacles[0].y1 == doctest::Approx(0.70).epsilon(1e-14));
  CHECK(ge.obstacles[1].y0 == doctest::Approx(0.20).epsilon(1e-14));
  CHECK(ge.obstacles[1].y1 == doctest::Approx(0.90).epsilon(1e-14));
  // the input is untouched
  CHECK(g.obstacles[0].y0 == 0.35);
}

TEST_CASE("obstacle shift is additive")
{
  const WaveguideGeometry g = test::reference_geometry();
  const WaveguideGeometry a = apply_perturbation(apply_perturbation(g, 0.02), 0.03);
  const WaveguideGeometry b = apply_perturbation(g, 0.05);
  for (std::size_t k = 0; k < g.obstacles.size(); ++k)
  {
    CHECK(std::abs(a.obstacles[k].y0 - b.obstacles[k].y0) < 1e-14);
    CHECK(std::abs(a.obstacles[k].y1 - b.obstacles[k].y1) < 1e-14);
  }
  CHECK(a.epsilon == doctest::Approx(0.05));
}

TEST_CASE("shifting an obstacle into the wall collides")
{
  const WaveguideGeometry g = test::reference_geometry();
  CHECK(error_kind([&] { apply_perturbation(g, 0.2); }) == ErrorKind::PerturbationCollision);
  CHECK(error_kind([&] { apply_perturbation(g, -0.1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("wall bump moves the top boundary to 1 + eps H")
{
  GeometryDescription d;
  d.L = 1.0;
  d.d = 0.85;
  d.mode = PerturbationMode::wall_bump;
  d.bump = PerturbationProfile{Wall::top, -0.75, -0.25, {1.0}};
  const WaveguideGeometry g = apply_perturbation(build_geometry(d), 0.1);
  const double H = g.bump->value(-0.5);
  CHECK(H == doctest::Approx(std::pow(0.25, 4)));  // (xi (1 - xi))^4 at xi = 1/2
  MeshOptions o;
  o.h = 0.05;
  const Mesh m = generate_mesh(g, o);
  double top = -1.0;
  for (const Point2 &p : m.nodes)
  {
    if (std::abs(p.x() + 0.5) < 1e-12)
    {
      top = std::max(top, p.y());
    }
  }
  CHECK(top == doctest::Approx(1.0 + 0.1 * H).epsilon(1e-14));
}

TEST_CASE("structured strip mesh counts")
{
  GeometryDescription d;
  d.L = 1.0;
  MeshOptions o;
  o.h = 0.25;
  o.order = 1;
  const Mesh m = generate_mesh(build_geometry(d), o);
  CHECK(m.num_vertices == 45);
  CHECK(m.num_dofs() == 45);
  CHECK(m.num_triangles() == 64);
}

TEST_CASE("mesh area equals domain area and the mesh is valid")
{
  for (const WaveguideGeometry &g : {test::reference_geometry(), apply_perturbation(test::reference_geometry(), 0.05),
                                      test::nonsymmetric_geometry(), test::strip(0.5)})
  {
    for (int order : {1, 2})
    {
      MeshOptions o;
      o.h = 0.02;
      o.order = order;
      const Mesh m = generate_mesh(g, o);
      const MeshReport r = check_mesh(m);
      CHECK(r.ok());
      double area = 0.0;
      for (int t = 0; t < m.num_triangles(); ++t)
      {
        area += m.triangle_area(t);
      }
      CHECK(std::abs(area - g.area()) <= 1e-12 * g.area());
    }
  }
}

TEST_CASE("mesh resolves every obstacle corner on its boundary")
{
  const WaveguideGeometry g = test::reference_geometry();
  MeshOptions o;
  o.h = 0.01;
  const Mesh m = generate_mesh(g, o);
  for (const Rect &r : g.obstacles)
  {
    for (double x : {r.x0, r.x1})
    {
      for (double y : {r.y0, r.y1})
      {
        bool found = false;
        for (const TaggedEdge &e : m.tagged_edges)
        {
          for (int v : {e.a, e.b})
          {
            found = found || (m.nodes[v] - Point2(x, y)).norm() < 1e-12;
          }
        }
        // corners buried inside the other obstacle are not boundary points
        const bool buried = g.in_obstacle(x + 1e-9, y + 1e-9) && g.in_obstacle(x - 1e-9, y - 1e-9) &&
                            g.in_obstacle(x + 1e-9, y - 1e-9) && g.in_obstacle(x - 1e-9, y + 1e-9);
        CHECK((found || buried));
      }
    }
  }
}

TEST_CASE("mesh generation is deterministic")
{
  MeshOptions o;
  o.h = 0.02;
  const Mesh a = generate_mesh(test::reference_geometry(), o);
  const Mesh b = generate_mesh(test::reference_geometry(), o);
  CHECK(a.nodes == b.nodes);
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("too coarse a mesh is reported")
{
  MeshOptions o;
  o.h = 0.5;
  CHECK(error_kind([&] { generate_mesh(test::reference_geometry(), o); }) == ErrorKind::MeshTooCoarse);
}

TEST_CASE("config round trip")
{
  const GeometryDescription d = load_geometry_description(test::config_path("reference_bump.json"));
  const GeometryDescription e = parse_geometry_description(to_json(d));
  CHECK(build_geometry(d) == build_geometry(e));
  CHECK(geometry_hash(build_geometry(d)) == geometry_hash(build_geometry(e)));
  CHECK(error_kind([] { parse_geometry_description(nlohmann::json::parse(R"({"L": "x"})")); }) ==
        ErrorKind::ConfigError);
}
