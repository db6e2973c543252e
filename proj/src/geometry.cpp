// SPDX-License-Identifier: Apache-2.0

#include "fano/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "fano/error.hpp"

namespace fano
{

namespace
{

// Gauss-Legendre nodes on [-1,1], 8 points; exact for the degree-15 integrands
// produced by profiles with up to 8 coefficients.
constexpr double gl8_x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                             0.7966664774136267,  0.9602898564975363};
constexpr double gl8_w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                             0.2223810344533745, 0.1012285362903763};

std::vector<double> unique_sorted(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double a : v)
  {
    if (out.empty() || a - out.back() > 1e-12)
    {
      out.push_back(a);
    }
  }
  return out;
}

double profile_integral(const PerturbationProfile &p)
{
  const double len = p.s1 - p.s0;
  double sum = 0.0;
  for (int q = 0; q < 8; ++q)
  {
    sum += gl8_w[q] * p.value(p.s0 + 0.5 * len * (1.0 + gl8_x[q]));
  }
  return 0.5 * len * sum;
}

}  // namespace

double PerturbationProfile::value(double s) const
{
  if (s <= s0 || s >= s1)
  {
    return 0.0;
  }
  const double xi = (s - s0) / (s1 - s0);
  const double b = xi * (1.0 - xi);
  double poly = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
  {
    poly = poly * xi + *it;
  }
  return b * b * b * b * poly;
}

double PerturbationProfile::derivative(double s) const
{
  if (s <= s0 || s >= s1)
  {
    return 0.0;
  }
  const double len = s1 - s0;
  const double xi = (s - s0) / len;
  const double b = xi * (1.0 - xi);
  double poly = 0.0, dpoly = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
  {
    dpoly = dpoly * xi + poly;
    poly = poly * xi + *it;
  }
  const double b3 = b * b * b;
  return (4.0 * b3 * (1.0 - 2.0 * xi) * poly + b3 * b * dpoly) / len;
}

bool WaveguideGeometry::in_obstacle(double x, double y) const
{
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [&](const Rect &r) { return r.contains(x, y); });
}

double WaveguideGeometry::bump_anchor() const
{
  if (!bump)
  {
    return 0.0;
  }
  double anchor = bump->wall == Wall::top ? 0.0 : strip_height;
  for (const Rect &r : obstacles)
  {
    if (r.x1 <= bump->s0 || r.x0 >= bump->s1)
    {
      continue;
    }
    anchor = bump->wall == Wall::top ? std::max(anchor, r.y1) : std::min(anchor, r.y0);
  }
  return anchor;
}

double WaveguideGeometry::area() const
{
  // union of obstacles by summing breakpoint-grid cells
  std::vector<double> xs{-L, L}, ys{0.0, strip_height};
  for (const Rect &r : obstacles)
  {
    xs.insert(xs.end(), {r.x0, r.x1});
    ys.insert(ys.end(), {r.y0, r.y1});
  }
  xs = unique_sorted(xs);
  ys = unique_sorted(ys);
  double removed = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
  {
    for (std::size_t j = 0; j + 1 < ys.size(); ++j)
    {
      if (in_obstacle(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])))
      {
        removed += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
      }
    }
  }
  double a = 2.0 * L * strip_height - removed;
  if (bump && perturbation_mode == PerturbationMode::wall_bump)
  {
    a += epsilon * profile_integral(*bump);
  }
  return a;
}

void validate_geometry(const WaveguideGeometry &g)
{
  if (!(g.L > 0.0) || !(g.d > 0.0) || !(g.d < g.L))
  {
    std::ostringstream os;
    os << "need 0 < d < L, got d=" << g.d << " L=" << g.L;
    fail(ErrorKind::ConfigError, os.str());
  }
  if (!(g.epsilon >= 0.0))
  {
    fail(ErrorKind::InvalidArgument, "epsilon must be >= 0");
  }
  for (const Rect &r : g.obstacles)
  {
    const bool ok = -g.d < r.x0 && r.x0 < r.x1 && r.x1 < g.d && 0.0 < r.y0 && r.y0 < r.y1 &&
                    r.y1 < g.strip_height;
    if (!ok)
    {
      std::ostringstream os;
      os << "obstacle [" << r.x0 << "," << r.x1 << "]x[" << r.y0 << "," << r.y1
         << "] must lie inside (-d,d)x(0,1) with d=" << g.d;
      fail(ErrorKind::ObstacleOutOfStrip, os.str());
    }
  }
  if (g.bump)
  {
    const auto &b = *g.bump;
    if (!(b.s0 < b.s1))
    {
      fail(ErrorKind::ConfigError, "bump support must satisfy s0 < s1");
    }
    if (!(-g.d < b.s0 && b.s1 < g.d))
    {
      std::ostringstream os;
      os << "bump support [" << b.s0 << "," << b.s1 << "] reaches |x| >= d=" << g.d;
      fail(ErrorKind::BumpSupportTooWide, os.str());
    }
    if (b.coeffs.empty())
    {
      fail(ErrorKind::ConfigError, "bump needs at least one coefficient");
    }
  }

  // connectivity over the breakpoint grid
  std::vector<double> xs{-g.L, g.L}, ys{0.0, g.strip_height};
  for (const Rect &r : g.obstacles)
  {
    xs.insert(xs.end(), {r.x0, r.x1});
    ys.insert(ys.end(), {r.y0, r.y1});
  }
  xs = unique_sorted(xs);
  ys = unique_sorted(ys);
  const int nx = static_cast<int>(xs.size()) - 1, ny = static_cast<int>(ys.size()) - 1;
  std::vector<int> state(static_cast<std::size_t>(nx * ny), 0);  // 0 free, 1 void, 2 reached
  int free_cells = 0;
  for (int i = 0; i < nx; ++i)
  {
    for (int j = 0; j < ny; ++j)
    {
      const bool v = g.in_obstacle(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
      state[i * ny + j] = v ? 1 : 0;
      free_cells += v ? 0 : 1;
    }
  }
  std::queue<int> q;
  for (int j = 0; j < ny; ++j)
  {
    if (state[j] == 0)
    {
      state[j] = 2;
      q.push(j);
      break;
    }
  }
  int reached = 0;
  while (!q.empty())
  {
    const int c = q.front();
    q.pop();
    ++reached;
    const int i = c / ny, j = c % ny;
    const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
    for (const auto &n : nb)
    {
      if (n[0] < 0 || n[0] >= nx || n[1] < 0 || n[1] >= ny)
      {
        continue;
      }
      int &s = state[n[0] * ny + n[1]];
      if (s == 0)
      {
        s = 2;
        q.push(n[0] * ny + n[1]);
      }
    }
  }
  if (reached != free_cells)
  {
    fail(ErrorKind::DisconnectedDomain, "obstacles split the guide into disconnected parts");
  }
}

WaveguideGeometry build_geometry(const GeometryDescription &desc)
{
  WaveguideGeometry g;
  g.L = desc.L;
  g.obstacles = desc.obstacles;
  g.bump = desc.bump;
  g.perturbation_mode = desc.mode;
  if (desc.d)
  {
    g.d = *desc.d;
  }
  else
  {
    double reach = 0.0;
    for (const Rect &r : desc.obstacles)
    {
      reach = std::max({reach, std::abs(r.x0), std::abs(r.x1)});
    }
    if (desc.bump)
    {
      reach = std::max({reach, std::abs(desc.bump->s0), std::abs(desc.bump->s1)});
    }
    g.d = 0.5 * (reach + desc.L);
  }
  if (desc.mode == PerturbationMode::wall_bump && !desc.bump)
  {
    fail(ErrorKind::ConfigError, "wall_bump mode requires a bump profile");
  }
  validate_geometry(g);
  return g;
}

WaveguideGeometry apply_perturbation(const WaveguideGeometry &g, double epsilon)
{
  if (!(epsilon >= 0.0))
  {
    fail(ErrorKind::InvalidArgument, "perturbation amplitude must be >= 0");
  }
  WaveguideGeometry out = g;
  out.epsilon = g.epsilon + epsilon;
  if (epsilon == 0.0)
  {
    return out;
  }
  if (g.perturbation_mode == PerturbationMode::obstacle_shift)
  {
    for (Rect &r : out.obstacles)
    {
      r.y0 += epsilon;
      r.y1 += epsilon;
      if (!(r.y1 < g.strip_height))
      {
        std::ostringstream os;
        os << "shifted obstacle [" << r.x0 << "," << r.x1 << "]x[" << r.y0 << "," << r.y1
           << "] touches the top wall";
        fail(ErrorKind::PerturbationCollision, os.str());
      }
    }
    return out;
  }

  if (!g.bump)
  {
    fail(ErrorKind::ConfigError, "wall_bump mode requires a bump profile");
  }
  // the stretched wall must stay clear of the obstacles underneath
  const auto &b = *g.bump;
  const double anchor = g.bump_anchor();
  const double clearance = b.wall == Wall::top ? g.strip_height - anchor : anchor;
  for (int k = 0; k <= 2000; ++k)
  {
    const double s = b.s0 + (b.s1 - b.s0) * k / 2000.0;
    if (out.epsilon * b.value(s) <= -clearance)
    {
      fail(ErrorKind::PerturbationCollision, "wall bump reaches an obstacle or the opposite wall");
    }
  }
  return out;
}

}  // namespace fano
