// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_FEM_HPP
#define FANO_FEM_HPP

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "fano/mesh.hpp"
#include "fano/types.hpp"

namespace fano
{

// Stiffness K (grad u . grad v) and mass M (u v) on the mesh dofs. Elements in
// PML regions use the 1D stretch s along x: K = Kxx/s + s Kyy, M = s M.
struct AssembledOperators
{
  SpMat K;
  SpMat M;
  int order = 2;
};

AssembledOperators assemble_operators(const Mesh &mesh, cplx pml_stretch = 1.0);

struct FieldSolution
{
  std::shared_ptr<const Mesh> mesh;
  CVec coefficients;
  cplx lambda = 0.0;
};

// Lagrange basis on the reference triangle (xi, eta); node layout as in Mesh.
std::array<double, 6> shape_values(int order, double xi, double eta);
std::array<std::array<double, 2>, 6> shape_gradients_ref(int order, double xi, double eta);

// Nodal interpolation of f onto the mesh dofs.
CVec interpolate(const Mesh &mesh, const std::function<cplx(double, double)> &f);

// integral of u * conj(v) over the mesh, by elementwise quadrature.
cplx inner_product_l2(const FieldSolution &u, const FieldSolution &v);
// Same through an assembled mass matrix: v^H M u.
cplx inner_product_l2(const SpMat &M, const CVec &u, const CVec &v);

// Point evaluation; returns false when p is outside the mesh.
bool evaluate(const Mesh &mesh, const CVec &u, const Point2 &p, cplx &value);

struct Segment
{
  Point2 a, b;
};

// Restriction of u to one boundary edge: a quadratic in the arclength s
// (measured from segment.a) through the endpoint and midpoint values.
struct TracePiece
{
  double s_a = 0.0, s_b = 0.0;
  cplx u_a, u_m, u_b;

  cplx value(double s) const;
  cplx derivative(double s) const;
};

struct TraceSamples
{
  std::vector<double> s, weight;
  std::vector<cplx> value, derivative;  // u and its derivative along a -> b
  std::vector<TracePiece> pieces;
};

// Gauss samples of the trace on the boundary edges covering the segment.
TraceSamples boundary_trace(const FieldSolution &u, const Segment &segment, int points_per_edge = 10);

// integral over {x = x0} of u(x0,y) f(y) dy along vertical mesh edges.
cplx line_integral(const Mesh &mesh, const CVec &u, double x0, const std::function<double(double)> &f,
                   int points_per_edge = 10);

// Gauss-Legendre rule on [0,1].
void gauss_legendre01(int n, std::vector<double> &x, std::vector<double> &w);

}  // namespace fano

#endif  // FANO_FEM_HPP
