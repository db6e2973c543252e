// SPDX-License-Identifier: Apache-2.0

#include "fano/fem.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "fano/error.hpp"

namespace fano
{

namespace
{

// Symmetric 6-point rule, exact for degree 4 (weights sum to 1).
constexpr double q_a1 = 0.44594849091596488632, q_w1 = 0.22338158967801146570;
constexpr double q_a2 = 0.09157621350977074346, q_w2 = 0.10995174365532186764;
constexpr double quad_xi[6] = {q_a1, 1.0 - 2.0 * q_a1, q_a1, q_a2, 1.0 - 2.0 * q_a2, q_a2};
constexpr double quad_eta[6] = {q_a1, q_a1, 1.0 - 2.0 * q_a1, q_a2, q_a2, 1.0 - 2.0 * q_a2};
constexpr double quad_w[6] = {q_w1, q_w1, q_w1, q_w2, q_w2, q_w2};

template <unsigned N>
void boost_rule(std::vector<double> &x, std::vector<double> &w)
{
  using G = boost::math::quadrature::gauss<double, N>;
  const auto &a = G::abscissa();
  const auto &wt = G::weights();
  x.clear();
  w.clear();
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    x.push_back(0.5 * (1.0 + a[i]));
    w.push_back(0.5 * wt[i]);
    if (a[i] != 0.0)
    {
      x.push_back(0.5 * (1.0 - a[i]));
      w.push_back(0.5 * wt[i]);
    }
  }
}

struct ElementGeometry
{
  double det = 0.0;
  double inv[2][2] = {};  // d(xi,eta)/d(x,y)
};

ElementGeometry element_geometry(const Mesh &mesh, const std::array<int, 6> &tri)
{
  const Point2 &p0 = mesh.nodes[tri[0]], &p1 = mesh.nodes[tri[1]], &p2 = mesh.nodes[tri[2]];
  const double j00 = p1.x() - p0.x(), j01 = p2.x() - p0.x();
  const double j10 = p1.y() - p0.y(), j11 = p2.y() - p0.y();
  ElementGeometry eg;
  eg.det = j00 * j11 - j01 * j10;
  eg.inv[0][0] = j11 / eg.det;
  eg.inv[0][1] = -j01 / eg.det;
  eg.inv[1][0] = -j10 / eg.det;
  eg.inv[1][1] = j00 / eg.det;
  return eg;
}

bool same_mesh(const FieldSolution &u, const FieldSolution &v)
{
  return u.mesh && v.mesh && u.mesh == v.mesh && u.coefficients.size() == u.mesh->num_dofs() &&
         v.coefficients.size() == v.mesh->num_dofs();
}

}  // namespace

void gauss_legendre01(int n, std::vector<double> &x, std::vector<double> &w)
{
  switch (n)
  {
  case 2: boost_rule<2>(x, w); break;
  case 3: boost_rule<3>(x, w); break;
  case 4: boost_rule<4>(x, w); break;
  case 5: boost_rule<5>(x, w); break;
  case 6: boost_rule<6>(x, w); break;
  case 8: boost_rule<8>(x, w); break;
  case 10: boost_rule<10>(x, w); break;
  case 12: boost_rule<12>(x, w); break;
  case 16: boost_rule<16>(x, w); break;
  case 20: boost_rule<20>(x, w); break;
  case 30: boost_rule<30>(x, w); break;
  default: fail(ErrorKind::InvalidArgument, "unsupported Gauss rule size " + std::to_string(n));
  }
  std::vector<std::size_t> idx(x.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
  {
    idx[i] = i;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs, ws;
  for (std::size_t i : idx)
  {
    xs.push_back(x[i]);
    ws.push_back(w[i]);
  }
  x = std::move(xs);
  w = std::move(ws);
}

std::array<double, 6> shape_values(int order, double xi, double eta)
{
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  if (order == 1)
  {
    return {l0, l1, l2, 0.0, 0.0, 0.0};
  }
  return {l0 * (2.0 * l0 - 1.0), l1 * (2.0 * l1 - 1.0), l2 * (2.0 * l2 - 1.0),
          4.0 * l0 * l1,         4.0 * l1 * l2,         4.0 * l2 * l0};
}

std::array<std::array<double, 2>, 6> shape_gradients_ref(int order, double xi, double eta)
{
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  // gradients of the barycentrics in (xi, eta)
  const double g0[2] = {-1.0, -1.0}, g1[2] = {1.0, 0.0}, g2[2] = {0.0, 1.0};
  std::array<std::array<double, 2>, 6> g{};
  for (int c = 0; c < 2; ++c)
  {
    if (order == 1)
    {
      g[0][c] = g0[c];
      g[1][c] = g1[c];
      g[2][c] = g2[c];
      continue;
    }
    g[0][c] = (4.0 * l0 - 1.0) * g0[c];
    g[1][c] = (4.0 * l1 - 1.0) * g1[c];
    g[2][c] = (4.0 * l2 - 1.0) * g2[c];
    g[3][c] = 4.0 * (g0[c] * l1 + l0 * g1[c]);
    g[4][c] = 4.0 * (g1[c] * l2 + l1 * g2[c]);
    g[5][c] = 4.0 * (g2[c] * l0 + l2 * g0[c]);
  }
  return g;
}

AssembledOperators assemble_operators(const Mesh &mesh, cplx pml_stretch)
{
  const int nloc = mesh.nodes_per_triangle();
  const int n = mesh.num_dofs();

  // reference data at the quadrature points
  std::array<std::array<double, 6>, 6> phi{};
  std::array<std::array<std::array<double, 2>, 6>, 6> dphi{};
  for (int q = 0; q < 6; ++q)
  {
    phi[q] = shape_values(mesh.order, quad_xi[q], quad_eta[q]);
    dphi[q] = shape_gradients_ref(mesh.order, quad_xi[q], quad_eta[q]);
  }

  std::vector<Eigen::Triplet<cplx>> tk, tm;
  tk.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nloc * nloc);
  tm.reserve(tk.capacity());
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles[t];
    const ElementGeometry eg = element_geometry(mesh, tri);
    const double area2 = std::abs(eg.det);  // reference triangle has area 1/2
    double kxx[6][6] = {}, kyy[6][6] = {}, mm[6][6] = {};
    for (int q = 0; q < 6; ++q)
    {
      const double wq = 0.5 * quad_w[q] * area2;
      double gx[6], gy[6];
      for (int a = 0; a < nloc; ++a)
      {
        gx[a] = dphi[q][a][0] * eg.inv[0][0] + dphi[q][a][1] * eg.inv[1][0];
        gy[a] = dphi[q][a][0] * eg.inv[0][1] + dphi[q][a][1] * eg.inv[1][1];
      }
      for (int a = 0; a < nloc; ++a)
      {
        for (int b = a; b < nloc; ++b)
        {
          kxx[a][b] += wq * gx[a] * gx[b];
          kyy[a][b] += wq * gy[a] * gy[b];
          mm[a][b] += wq * phi[q][a] * phi[q][b];
        }
      }
    }
    const bool in_pml = mesh.regions[t] != Region::physical;
    const cplx s = in_pml ? pml_stretch : cplx(1.0);
    for (int a = 0; a < nloc; ++a)
    {
      for (int b = a; b < nloc; ++b)
      {
        const cplx k = in_pml ? kxx[a][b] / s + s * kyy[a][b] : cplx(kxx[a][b] + kyy[a][b]);
        const cplx m = s * mm[a][b];
        tk.emplace_back(tri[a], tri[b], k);
        tm.emplace_back(tri[a], tri[b], m);
        if (a != b)
        {
          tk.emplace_back(tri[b], tri[a], k);
          tm.emplace_back(tri[b], tri[a], m);
        }
      }
    }
  }
  AssembledOperators ops;
  ops.order = mesh.order;
  ops.K.resize(n, n);
  ops.M.resize(n, n);
  ops.K.setFromTriplets(tk.begin(), tk.end());
  ops.M.setFromTriplets(tm.begin(), tm.end());
  ops.K.makeCompressed();
  ops.M.makeCompressed();
  return ops;
}

CVec interpolate(const Mesh &mesh, const std::function<cplx(double, double)> &f)
{
  CVec u(mesh.num_dofs());
  for (int i = 0; i < mesh.num_dofs(); ++i)
  {
    u[i] = f(mesh.nodes[i].x(), mesh.nodes[i].y());
  }
  return u;
}

cplx inner_product_l2(const FieldSolution &u, const FieldSolution &v)
{
  if (!same_mesh(u, v))
  {
    fail(ErrorKind::MeshMismatch, "inner product of fields on different meshes");
  }
  const Mesh &mesh = *u.mesh;
  const int nloc = mesh.nodes_per_triangle();
  std::array<std::array<double, 6>, 6> phi{};
  for (int q = 0; q < 6; ++q)
  {
    phi[q] = shape_values(mesh.order, quad_xi[q], quad_eta[q]);
  }
  cplx sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles[t];
    const double area = std::abs(mesh.triangle_area(t));
    for (int q = 0; q < 6; ++q)
    {
      cplx uq = 0.0, vq = 0.0;
      for (int a = 0; a < nloc; ++a)
      {
        uq += phi[q][a] * u.coefficients[tri[a]];
        vq += phi[q][a] * v.coefficients[tri[a]];
      }
      sum += quad_w[q] * area * uq * std::conj(vq);
    }
  }
  return sum;
}

cplx inner_product_l2(const SpMat &M, const CVec &u, const CVec &v)
{
  if (M.rows() != u.size() || M.rows() != v.size())
  {
    fail(ErrorKind::MeshMismatch, "vector length does not match the mass matrix");
  }
  return v.dot(M * u);
}

bool evaluate(const Mesh &mesh, const CVec &u, const Point2 &p, cplx &value)
{
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles[t];
    const Point2 &p0 = mesh.nodes[tri[0]];
    const ElementGeometry eg = element_geometry(mesh, tri);
    const double dx = p.x() - p0.x(), dy = p.y() - p0.y();
    const double xi = eg.inv[0][0] * dx + eg.inv[0][1] * dy;
    const double eta = eg.inv[1][0] * dx + eg.inv[1][1] * dy;
    constexpr double tol = 1e-12;
    if (xi < -tol || eta < -tol || xi + eta > 1.0 + tol)
    {
      continue;
    }
    const auto phi = shape_values(mesh.order, xi, eta);
    value = 0.0;
    for (int a = 0; a < mesh.nodes_per_triangle(); ++a)
    {
      value += phi[a] * u[tri[a]];
    }
    return true;
  }
  return false;
}

cplx TracePiece::value(double s) const
{
  const double t = (s - s_a) / (s_b - s_a);
  return u_a * (1.0 - t) * (1.0 - 2.0 * t) + u_m * 4.0 * t * (1.0 - t) + u_b * t * (2.0 * t - 1.0);
}

cplx TracePiece::derivative(double s) const
{
  const double len = s_b - s_a;
  const double t = (s - s_a) / len;
  return (u_a * (4.0 * t - 3.0) + u_m * (4.0 - 8.0 * t) + u_b * (4.0 * t - 1.0)) / len;
}

TraceSamples boundary_trace(const FieldSolution &u, const Segment &segment, int points_per_edge)
{
  if (!u.mesh || u.coefficients.size() != u.mesh->num_dofs())
  {
    fail(ErrorKind::MeshMismatch, "field does not match its mesh");
  }
  const Mesh &mesh = *u.mesh;
  const Point2 dir = segment.b - segment.a;
  const double len = dir.norm();
  if (!(len > 0.0))
  {
    fail(ErrorKind::InvalidArgument, "degenerate segment");
  }
  const Point2 e = dir / len;
  constexpr double tol = 1e-10;
  auto param = [&](const Point2 &p, double &s) {
    const Point2 r = p - segment.a;
    s = r.dot(e);
    return std::abs(r.x() * e.y() - r.y() * e.x()) < tol && s > -tol && s < len + tol;
  };

  TraceSamples out;
  for (const auto &te : mesh.tagged_edges)
  {
    if (te.tag == BoundaryTag::pml_interface)
    {
      continue;
    }
    double sa, sb;
    if (!param(mesh.nodes[te.a], sa) || !param(mesh.nodes[te.b], sb))
    {
      continue;
    }
    TracePiece piece;
    const cplx ua = u.coefficients[te.a], ub = u.coefficients[te.b];
    const cplx um = te.mid >= 0 ? u.coefficients[te.mid] : 0.5 * (ua + ub);
    if (sa <= sb)
    {
      piece = {sa, sb, ua, um, ub};
    }
    else
    {
      piece = {sb, sa, ub, um, ua};
    }
    out.pieces.push_back(piece);
  }
  std::sort(out.pieces.begin(), out.pieces.end(),
            [](const TracePiece &a, const TracePiece &b) { return a.s_a < b.s_a; });
  double covered = 0.0;
  for (const auto &p : out.pieces)
  {
    covered += p.s_b - p.s_a;
  }
  if (out.pieces.empty() || std::abs(covered - len) > 1e-9)
  {
    fail(ErrorKind::SegmentNotOnBoundary, "segment is not covered by boundary edges");
  }
  std::vector<double> gx, gw;
  gauss_legendre01(points_per_edge, gx, gw);
  for (const auto &p : out.pieces)
  {
    const double h = p.s_b - p.s_a;
    for (std::size_t q = 0; q < gx.size(); ++q)
    {
      const double s = p.s_a + h * gx[q];
      out.s.push_back(s);
      out.weight.push_back(h * gw[q]);
      out.value.push_back(p.value(s));
      out.derivative.push_back(p.derivative(s));
    }
  }
  return out;
}

cplx line_integral(const Mesh &mesh, const CVec &u, double x0, const std::function<double(double)> &f,
                   int points_per_edge)
{
  std::vector<double> gx, gw;
  gauss_legendre01(points_per_edge, gx, gw);
  cplx sum = 0.0;
  constexpr double tol = 1e-12;
  for (const auto &e : mesh.edges)
  {
    const Point2 &pa = mesh.nodes[e.a], &pb = mesh.nodes[e.b];
    if (std::abs(pa.x() - x0) > tol || std::abs(pb.x() - x0) > tol)
    {
      continue;
    }
    const TracePiece piece{pa.y(), pb.y(), u[e.a], e.mid >= 0 ? u[e.mid] : 0.5 * (u[e.a] + u[e.b]), u[e.b]};
    const double h = pb.y() - pa.y();
    for (std::size_t q = 0; q < gx.size(); ++q)
    {
      const double y = pa.y() + h * gx[q];
      sum += std::abs(h) * gw[q] * piece.value(y) * f(y);
    }
  }
  return sum;
}

}  // namespace fano
