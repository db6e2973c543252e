// SPDX-License-Identifier: Apache-2.0

#include "fano/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fano/error.hpp"

namespace fano
{

namespace
{

constexpr double merge_tol = 1e-12;

std::vector<double> unique_sorted(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double a : v)
  {
    if (out.empty() || a - out.back() > merge_tol)
    {
      out.push_back(a);
    }
  }
  return out;
}

// Adds soft breakpoints unless they crowd an existing one.
std::vector<double> add_soft(std::vector<double> hard, const std::vector<double> &soft,
                             double min_gap)
{
  std::vector<double> base = hard;
  for (double s : soft)
  {
    if (s <= base.front() || s >= base.back())
    {
      continue;
    }
    const bool crowded = std::any_of(base.begin(), base.end(),
                                     [&](double b) { return std::abs(b - s) < min_gap; });
    if (!crowded)
    {
      hard.push_back(s);
    }
  }
  return unique_sorted(hard);
}

double min_gap(const std::vector<double> &v)
{
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
  {
    g = std::min(g, v[i + 1] - v[i]);
  }
  return g;
}

std::vector<double> subdivide(const std::vector<double> &breaks, double h)
{
  std::vector<double> lines;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
  {
    const double a = breaks[i], b = breaks[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    for (int k = 0; k < n; ++k)
    {
      lines.push_back(k == 0 ? a : a + (b - a) * k / n);
    }
  }
  lines.push_back(breaks.back());
  return lines;
}

// Geometrically graded cell widths from h up to hmax, rescaled to fill t.
std::vector<double> pml_widths(double t, double h, double hmax, double growth)
{
  std::vector<double> w;
  double sum = 0.0, s = h;
  while (sum < t * (1.0 - 1e-12))
  {
    w.push_back(s);
    sum += s;
    s = std::min(s * growth, std::max(hmax, h));
  }
  for (double &x : w)
  {
    x *= t / sum;
  }
  return w;
}

void grade(std::vector<double> &lines, const std::vector<double> &corners, int levels,
           double factor)
{
  if (levels <= 0)
  {
    return;
  }
  std::vector<double> extra;
  for (double c : corners)
  {
    auto it = std::lower_bound(lines.begin(), lines.end(), c - merge_tol);
    if (it == lines.end() || std::abs(*it - c) > merge_tol)
    {
      continue;
    }
    const std::size_t k = static_cast<std::size_t>(it - lines.begin());
    double f = 1.0;
    for (int m = 1; m <= levels; ++m)
    {
      f *= factor;
      if (k > 0)
      {
        extra.push_back(c - (c - lines[k - 1]) * f);
      }
      if (k + 1 < lines.size())
      {
        extra.push_back(c + (lines[k + 1] - c) * f);
      }
    }
  }
  lines.insert(lines.end(), extra.begin(), extra.end());
  lines = unique_sorted(lines);
}

// Vertical stretch realizing the wall bump while keeping obstacles fixed.
void stretch_for_bump(const WaveguideGeometry &g, Mesh &mesh)
{
  if (!g.bump || g.perturbation_mode != PerturbationMode::wall_bump || g.epsilon == 0.0)
  {
    return;
  }
  const PerturbationProfile &b = *g.bump;
  const double anchor = g.bump_anchor();
  const double top = g.strip_height;
  for (int v = 0; v < mesh.num_vertices; ++v)
  {
    Point2 &p = mesh.nodes[v];
    const double eh = g.epsilon * b.value(p.x());
    if (eh == 0.0)
    {
      continue;
    }
    if (b.wall == Wall::top)
    {
      if (p.y() > anchor)
      {
        p.y() += eh * (p.y() - anchor) / (top - anchor);
      }
    }
    else if (p.y() < anchor)
    {
      p.y() -= eh * (anchor - p.y()) / anchor;
    }
  }
}

}  // namespace

double Mesh::triangle_area(int t) const
{
  const auto &tri = triangles[t];
  const Point2 &a = nodes[tri[0]], &b = nodes[tri[1]], &c = nodes[tri[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Mesh generate_mesh(const WaveguideGeometry &g, const MeshOptions &opts)
{
  if (!(opts.h > 0.0))
  {
    fail(ErrorKind::InvalidArgument, "mesh size h must be positive");
  }
  if (opts.order != 1 && opts.order != 2)
  {
    fail(ErrorKind::InvalidArgument, "element order must be 1 or 2");
  }
  const double h = opts.h;
  std::vector<double> hx{-g.L, g.L, -g.d, g.d}, hy{0.0, g.strip_height};
  std::vector<double> cx, cy;
  for (const Rect &r : g.obstacles)
  {
    hx.insert(hx.end(), {r.x0, r.x1});
    hy.insert(hy.end(), {r.y0, r.y1});
  }
  cx = unique_sorted(std::vector<double>(hx.begin() + 4, hx.end()));
  cy = unique_sorted(std::vector<double>(hy.begin() + 2, hy.end()));
  // same topology with and without the bump, and traces align with its support
  if (g.bump)
  {
    hx.insert(hx.end(), {g.bump->s0, g.bump->s1});
  }
  hx = unique_sorted(hx);
  hy = unique_sorted(hy);
  const double gap = std::min(min_gap(hx), min_gap(hy));
  if (h > gap * (1.0 + 1e-9))
  {
    std::ostringstream os;
    os << "h=" << h << " exceeds the smallest geometric gap " << gap;
    fail(ErrorKind::MeshTooCoarse, os.str());
  }
  const std::vector<double> bx = add_soft(hx, {0.0}, 0.5 * h);
  const std::vector<double> by = add_soft(hy, {0.5 * g.strip_height}, 0.5 * h);

  std::vector<double> xs = subdivide(bx, h);
  std::vector<double> ys = subdivide(by, h);
  grade(xs, cx, opts.grading_levels, opts.grading_factor);
  grade(ys, cy, opts.grading_levels, opts.grading_factor);

  Mesh mesh;
  mesh.order = opts.order;
  mesh.h = h;
  mesh.L = g.L;
  if (opts.pml_thickness)
  {
    const double t = *opts.pml_thickness;
    if (!(t > 0.0))
    {
      fail(ErrorKind::InvalidArgument, "PML thickness must be positive");
    }
    mesh.pml_thickness = t;
    const std::vector<double> w = pml_widths(t, h, opts.pml_max_spacing, opts.pml_growth);
    std::vector<double> left, right;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k)
    {
      acc += w[k];
      const double x = k + 1 == w.size() ? t : acc;
      left.push_back(-g.L - x);
      right.push_back(g.L + x);
    }
    xs.insert(xs.end(), left.begin(), left.end());
    xs.insert(xs.end(), right.begin(), right.end());
    xs = unique_sorted(xs);
  }
  mesh.xlines = xs;
  mesh.ylines = ys;

  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  const double ymid = 0.5 * g.strip_height;
  std::vector<char> cell_void(static_cast<std::size_t>((nx - 1) * (ny - 1)));
  std::vector<int> vid(static_cast<std::size_t>(nx * ny), -1);
  for (int i = 0; i + 1 < nx; ++i)
  {
    for (int j = 0; j + 1 < ny; ++j)
    {
      const bool v = g.in_obstacle(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
      cell_void[i * (ny - 1) + j] = v;
      if (!v)
      {
        vid[i * ny + j] = vid[(i + 1) * ny + j] = vid[i * ny + j + 1] = vid[(i + 1) * ny + j + 1] = 0;
      }
    }
  }
  for (int i = 0; i < nx; ++i)
  {
    for (int j = 0; j < ny; ++j)
    {
      if (vid[i * ny + j] == 0)
      {
        vid[i * ny + j] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.emplace_back(xs[i], ys[j]);
      }
    }
  }
  mesh.num_vertices = static_cast<int>(mesh.nodes.size());

  for (int i = 0; i + 1 < nx; ++i)
  {
    const double xc = 0.5 * (xs[i] + xs[i + 1]);
    const Region region = xc < -g.L ? Region::pml_left : (xc > g.L ? Region::pml_right : Region::physical);
    for (int j = 0; j + 1 < ny; ++j)
    {
      if (cell_void[i * (ny - 1) + j])
      {
        continue;
      }
      const double yc = 0.5 * (ys[j] + ys[j + 1]);
      const int v00 = vid[i * ny + j], v10 = vid[(i + 1) * ny + j];
      const int v01 = vid[i * ny + j + 1], v11 = vid[(i + 1) * ny + j + 1];
      // diagonal direction mirrors across x = 0 and y = 1/2
      if ((xc < 0.0) == (yc < ymid))
      {
        mesh.triangles.push_back({v00, v10, v11, -1, -1, -1});
        mesh.triangles.push_back({v00, v11, v01, -1, -1, -1});
      }
      else
      {
        mesh.triangles.push_back({v00, v10, v01, -1, -1, -1});
        mesh.triangles.push_back({v10, v11, v01, -1, -1, -1});
      }
      mesh.regions.push_back(region);
      mesh.regions.push_back(region);
    }
  }

  // unique edges with their adjacent triangles
  std::map<std::pair<int, int>, int> edge_index;
  std::vector<std::array<int, 2>> edge_tris;
  std::vector<std::array<int, 3>> tri_edges(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    auto &tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e)
    {
      const int a = tri[e], b = tri[(e + 1) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, static_cast<int>(mesh.edges.size()));
      if (inserted)
      {
        mesh.edges.push_back({key.first, key.second, -1});
        edge_tris.push_back({t, -1});
      }
      else
      {
        edge_tris[it->second][1] = t;
      }
      tri_edges[t][e] = it->second;
    }
  }
  if (mesh.order == 2)
  {
    for (auto &e : mesh.edges)
    {
      e.mid = static_cast<int>(mesh.nodes.size());
      mesh.nodes.push_back(0.5 * (mesh.nodes[e.a] + mesh.nodes[e.b]));
    }
    for (int t = 0; t < mesh.num_triangles(); ++t)
    {
      for (int e = 0; e < 3; ++e)
      {
        mesh.triangles[t][3 + e] = mesh.edges[tri_edges[t][e]].mid;
      }
    }
  }

  const double xmin = xs.front(), xmax = xs.back();
  const bool pml = mesh.has_pml();
  for (std::size_t e = 0; e < mesh.edges.size(); ++e)
  {
    const MeshEdge &me = mesh.edges[e];
    const Point2 &pa = mesh.nodes[me.a], &pb = mesh.nodes[me.b];
    const bool vertical = pa.x() == pb.x();
    if (edge_tris[e][1] < 0)
    {
      BoundaryTag tag = BoundaryTag::wall;
      if (!pml && vertical && pa.x() == xmin)
      {
        tag = BoundaryTag::port_left;
      }
      else if (!pml && vertical && pa.x() == xmax)
      {
        tag = BoundaryTag::port_right;
      }
      mesh.tagged_edges.push_back({me.a, me.b, me.mid, tag, edge_tris[e][0]});
    }
    else if (pml && vertical && std::abs(std::abs(pa.x()) - g.L) < merge_tol)
    {
      const int t0 = edge_tris[e][0], t1 = edge_tris[e][1];
      const int phys = mesh.regions[t0] == Region::physical ? t0 : t1;
      mesh.tagged_edges.push_back({me.a, me.b, me.mid, BoundaryTag::pml_interface, phys});
    }
  }

  stretch_for_bump(g, mesh);
  if (mesh.order == 2)
  {
    for (const auto &e : mesh.edges)
    {
      mesh.nodes[e.mid] = 0.5 * (mesh.nodes[e.a] + mesh.nodes[e.b]);
    }
  }
  return mesh;
}

MeshReport check_mesh(const Mesh &mesh)
{
  MeshReport rep;
  std::ostringstream msg;
  std::map<std::pair<int, int>, int> uses;
  rep.min_area = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const double a = mesh.triangle_area(t);
    rep.area += a;
    rep.min_area = std::min(rep.min_area, a);
    if (!(a > 0.0))
    {
      rep.positive = false;
    }
    const auto &tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e)
    {
      const auto key = std::minmax(tri[e], tri[(e + 1) % 3]);
      ++uses[{key.first, key.second}];
    }
    if (mesh.order == 2)
    {
      for (int e = 0; e < 3; ++e)
      {
        const Point2 m = 0.5 * (mesh.nodes[tri[e]] + mesh.nodes[tri[(e + 1) % 3]]);
        if ((m - mesh.nodes[tri[3 + e]]).norm() > 1e-12)
        {
          rep.conforming = false;
        }
      }
    }
  }
  if (!rep.positive)
  {
    msg << "non-positive triangle; ";
  }
  // hanging vertices would show up as boundary edges in the interior: every
  // once-used edge must be one of the tagged boundary edges, and no edge may be
  // shared by more than two triangles
  std::size_t boundary = 0;
  for (const auto &[key, n] : uses)
  {
    if (n > 2)
    {
      rep.conforming = false;
    }
    boundary += n == 1 ? 1 : 0;
  }
  std::size_t tagged_boundary = 0;
  for (const auto &te : mesh.tagged_edges)
  {
    tagged_boundary += te.tag != BoundaryTag::pml_interface ? 1 : 0;
  }
  if (boundary != tagged_boundary)
  {
    rep.conforming = false;
  }
  if (!rep.conforming)
  {
    msg << "non-conforming edge structure; ";
  }
  if (!mesh.has_pml())
  {
    for (BoundaryTag tag : {BoundaryTag::port_left, BoundaryTag::port_right})
    {
      const double x = tag == BoundaryTag::port_left ? -mesh.L : mesh.L;
      double len = 0.0;
      for (const auto &te : mesh.tagged_edges)
      {
        if (te.tag != tag)
        {
          continue;
        }
        const Point2 &pa = mesh.nodes[te.a], &pb = mesh.nodes[te.b];
        if (pa.x() != x || pb.x() != x)
        {
          rep.ports_complete = false;
        }
        len += std::abs(pb.y() - pa.y());
      }
      if (std::abs(len - 1.0) > 1e-12)
      {
        rep.ports_complete = false;
      }
    }
    if (!rep.ports_complete)
    {
      msg << "ports do not span the cross-section; ";
    }
  }
  rep.message = msg.str();
  return rep;
}

void validate_mesh(const Mesh &mesh)
{
  const MeshReport rep = check_mesh(mesh);
  if (!rep.ok())
  {
    fail(ErrorKind::InvalidMesh, rep.message);
  }
}

std::vector<int> tagged_nodes(const Mesh &mesh, BoundaryTag tag)
{
  std::vector<int> out;
  for (const auto &te : mesh.tagged_edges)
  {
    if (te.tag != tag)
    {
      continue;
    }
    out.push_back(te.a);
    out.push_back(te.b);
    if (te.mid >= 0)
    {
      out.push_back(te.mid);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fano
