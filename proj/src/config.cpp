// SPDX-License-Identifier: Apache-2.0

#include "fano/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "fano/error.hpp"

namespace fano
{

using nlohmann::json;

namespace
{

double number(const json &j, const char *key)
{
  if (!j.contains(key) || !j.at(key).is_number())
  {
    fail(ErrorKind::ConfigError, std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

json read_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    fail(ErrorKind::ConfigError, "cannot open " + path);
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    fail(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

}  // namespace

PerturbationProfile parse_profile(const json &doc)
{
  if (doc.contains("perturbation"))
  {
    const json &p = doc.at("perturbation");
    if (!p.contains("bump"))
    {
      fail(ErrorKind::ConfigError, "perturbation has no bump");
    }
    return parse_profile(p.at("bump"));
  }
  PerturbationProfile prof;
  const std::string wall = doc.value("wall", std::string("top"));
  if (wall == "top")
  {
    prof.wall = Wall::top;
  }
  else if (wall == "bottom")
  {
    prof.wall = Wall::bottom;
  }
  else
  {
    fail(ErrorKind::ConfigError, "bump wall must be 'top' or 'bottom'");
  }
  if (!doc.contains("support") || !doc.at("support").is_array() || doc.at("support").size() != 2)
  {
    fail(ErrorKind::ConfigError, "bump support must be [s0, s1]");
  }
  prof.s0 = doc.at("support")[0].get<double>();
  prof.s1 = doc.at("support")[1].get<double>();
  if (!doc.contains("coeffs") || !doc.at("coeffs").is_array())
  {
    fail(ErrorKind::ConfigError, "bump coeffs must be an array");
  }
  prof.coeffs = doc.at("coeffs").get<std::vector<double>>();
  return prof;
}

PerturbationProfile load_profile(const std::string &path) { return parse_profile(read_file(path)); }

GeometryDescription parse_geometry_description(const json &doc)
{
  if (!doc.is_object())
  {
    fail(ErrorKind::ConfigError, "geometry document must be a JSON object");
  }
  GeometryDescription desc;
  if (doc.contains("L"))
  {
    desc.L = number(doc, "L");
  }
  if (doc.contains("d"))
  {
    desc.d = number(doc, "d");
  }
  if (doc.contains("obstacles"))
  {
    for (const json &o : doc.at("obstacles"))
    {
      desc.obstacles.push_back({number(o, "x0"), number(o, "x1"), number(o, "y0"), number(o, "y1")});
    }
  }
  if (doc.contains("perturbation"))
  {
    const json &p = doc.at("perturbation");
    const std::string mode = p.value("mode", std::string("obstacle_shift"));
    if (mode == "obstacle_shift")
    {
      desc.mode = PerturbationMode::obstacle_shift;
    }
    else if (mode == "wall_bump")
    {
      desc.mode = PerturbationMode::wall_bump;
    }
    else
    {
      fail(ErrorKind::ConfigError, "unknown perturbation mode '" + mode + "'");
    }
    if (p.contains("epsilon"))
    {
      desc.epsilon = number(p, "epsilon");
    }
    if (p.contains("bump") && !p.at("bump").is_null())
    {
      desc.bump = parse_profile(p.at("bump"));
    }
  }
  if (doc.contains("mesh"))
  {
    const json &m = doc.at("mesh");
    if (m.contains("h"))
    {
      desc.mesh.h = number(m, "h");
    }
    if (m.contains("order"))
    {
      desc.mesh.order = m.at("order").get<int>();
    }
    if (m.contains("grading_levels"))
    {
      desc.mesh.grading_levels = m.at("grading_levels").get<int>();
      if (desc.mesh.grading_levels < 0)
      {
        fail(ErrorKind::ConfigError, "grading_levels must be nonnegative");
      }
    }
    if (desc.mesh.order != 1 && desc.mesh.order != 2)
    {
      fail(ErrorKind::ConfigError, "mesh order must be 1 or 2");
    }
  }
  return desc;
}

GeometryDescription load_geometry_description(const std::string &path)
{
  return parse_geometry_description(read_file(path));
}

json to_json(const PerturbationProfile &p)
{
  return json{{"wall", p.wall == Wall::top ? "top" : "bottom"},
              {"support", {p.s0, p.s1}},
              {"coeffs", p.coeffs}};
}

json to_json(const GeometryDescription &desc)
{
  json j;
  j["L"] = desc.L;
  if (desc.d)
  {
    j["d"] = *desc.d;
  }
  j["obstacles"] = json::array();
  for (const Rect &r : desc.obstacles)
  {
    j["obstacles"].push_back({{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}});
  }
  json p;
  p["mode"] = desc.mode == PerturbationMode::obstacle_shift ? "obstacle_shift" : "wall_bump";
  p["epsilon"] = desc.epsilon;
  if (desc.bump)
  {
    p["bump"] = to_json(*desc.bump);
  }
  j["perturbation"] = p;
  j["mesh"] = {{"h", desc.mesh.h}, {"order", desc.mesh.order}, {"grading_levels", desc.mesh.grading_levels}};
  return j;
}

json to_json(const WaveguideGeometry &g)
{
  GeometryDescription desc;
  desc.L = g.L;
  desc.d = g.d;
  desc.obstacles = g.obstacles;
  desc.mode = g.perturbation_mode;
  desc.epsilon = g.epsilon;
  desc.bump = g.bump;
  json j = to_json(desc);
  j.erase("mesh");
  return j;
}

SolverSettings solver_settings(const GeometryDescription &desc)
{
  SolverSettings s;
  s.h = desc.mesh.h;
  s.order = desc.mesh.order;
  s.grading_levels = desc.mesh.grading_levels;
  return s;
}

std::string geometry_hash(const WaveguideGeometry &g)
{
  const std::string s = to_json(g).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s)
  {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fano
