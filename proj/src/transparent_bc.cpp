// SPDX-License-Identifier: Apache-2.0

#include "fano/transparent_bc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fano/error.hpp"

namespace fano
{

cplx axial_wavenumber(cplx lambda, int n, Branch branch)
{
  if (n < 0)
  {
    fail(ErrorKind::InvalidArgument, "mode index must be >= 0");
  }
  const cplx z = lambda - static_cast<double>(n * n) * pi * pi;
  if (std::abs(z) < 1e-10)
  {
    std::ostringstream os;
    os << "lambda=" << lambda << " is at the cutoff of mode " << n;
    fail(ErrorKind::ThresholdDegeneracy, os.str());
  }
  if (branch == Branch::continued)
  {
    return z.real() > 0.0 ? std::sqrt(z) : I * std::sqrt(-z);
  }
  cplx b = std::sqrt(z);
  if (b.imag() < 0.0)
  {
    b = -b;
  }
  // on the branch cut (negative real z) keep the decaying root
  if (b.imag() == 0.0 && z.real() < 0.0)
  {
    b = cplx(0.0, std::abs(b));
  }
  return b;
}

double transverse_profile(int n, double y)
{
  return n == 0 ? 1.0 : std::sqrt(2.0) * std::cos(n * pi * y);
}

PortModes port_modes(Port port, cplx lambda, int n_terms)
{
  PortModes pm;
  pm.port = port;
  pm.lambda = lambda;
  pm.n_terms = n_terms;
  for (int n = 0; n < n_terms; ++n)
  {
    pm.beta.push_back(axial_wavenumber(lambda, n));
  }
  return pm;
}

PortSpace build_port_space(const Mesh &mesh, Port port, int n_terms)
{
  if (n_terms < 1)
  {
    fail(ErrorKind::InvalidArgument, "need at least one DtN term");
  }
  const BoundaryTag tag = port == Port::left ? BoundaryTag::port_left : BoundaryTag::port_right;
  PortSpace ps;
  ps.port = port;
  ps.x = port == Port::left ? -mesh.L : mesh.L;
  ps.n_terms = n_terms;
  ps.dofs = tagged_nodes(mesh, tag);
  if (ps.dofs.empty())
  {
    fail(ErrorKind::InvalidMesh, "mesh has no port edges");
  }
  std::vector<int> local(static_cast<std::size_t>(mesh.num_dofs()), -1);
  for (std::size_t k = 0; k < ps.dofs.size(); ++k)
  {
    local[ps.dofs[k]] = static_cast<int>(k);
  }
  ps.projection = Eigen::MatrixXd::Zero(static_cast<int>(ps.dofs.size()), n_terms);
  std::vector<double> gx, gw;
  gauss_legendre01(20, gx, gw);
  for (const auto &te : mesh.tagged_edges)
  {
    if (te.tag != tag)
    {
      continue;
    }
    const double ya = mesh.nodes[te.a].y(), yb = mesh.nodes[te.b].y();
    const double len = std::abs(yb - ya);
    for (std::size_t q = 0; q < gx.size(); ++q)
    {
      const double t = gx[q];
      const double y = ya + (yb - ya) * t;
      double psi[3];
      int idx[3] = {te.a, te.b, te.mid};
      if (te.mid >= 0)
      {
        psi[0] = (1.0 - t) * (1.0 - 2.0 * t);
        psi[1] = t * (2.0 * t - 1.0);
        psi[2] = 4.0 * t * (1.0 - t);
      }
      else
      {
        psi[0] = 1.0 - t;
        psi[1] = t;
        psi[2] = 0.0;
      }
      for (int n = 0; n < n_terms; ++n)
      {
        const double f = len * gw[q] * transverse_profile(n, y);
        for (int a = 0; a < (te.mid >= 0 ? 3 : 2); ++a)
        {
          ps.projection(local[idx[a]], n) += f * psi[a];
        }
      }
    }
  }
  return ps;
}

Eigen::MatrixXcd dtn_block(const PortSpace &ps, cplx lambda, Branch branch)
{
  Eigen::VectorXcd ib(ps.n_terms);
  for (int n = 0; n < ps.n_terms; ++n)
  {
    ib[n] = I * axial_wavenumber(lambda, n, branch);
  }
  const Eigen::MatrixXcd P = ps.projection.cast<cplx>();
  return P * ib.asDiagonal() * P.transpose();
}

SpMat dtn_matrix(const Mesh &mesh, const PortSpace &ps, cplx lambda, Branch branch)
{
  const Eigen::MatrixXcd B = dtn_block(ps, lambda, branch);
  std::vector<Eigen::Triplet<cplx>> trip;
  const int p = static_cast<int>(ps.dofs.size());
  trip.reserve(static_cast<std::size_t>(p) * p);
  for (int j = 0; j < p; ++j)
  {
    for (int i = 0; i < p; ++i)
    {
      trip.emplace_back(ps.dofs[i], ps.dofs[j], B(i, j));
    }
  }
  SpMat D(mesh.num_dofs(), mesh.num_dofs());
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

CVec incident_load(const Mesh &mesh, const PortSpace &inflow, double lambda, Direction dir,
                   cplx amplitude)
{
  if (!(lambda > 0.0 && lambda < pi * pi))
  {
    std::ostringstream os;
    os << "lambda=" << lambda << " outside the monomode range (0, pi^2)";
    fail(ErrorKind::OutOfMonomodeRange, os.str());
  }
  const Port expected = dir == Direction::rightgoing ? Port::left : Port::right;
  if (inflow.port != expected)
  {
    fail(ErrorKind::InvalidArgument, "incident load must be built on the inflow port");
  }
  // on either inflow port: d_nu w - Lambda w = -2 i k e^{-ikL} for the plane wave
  const double k = std::sqrt(lambda);
  const cplx g = amplitude * (-2.0 * I * k) * std::exp(-I * k * mesh.L);
  CVec G = CVec::Zero(mesh.num_dofs());
  for (std::size_t j = 0; j < inflow.dofs.size(); ++j)
  {
    G[inflow.dofs[j]] = g * inflow.projection(static_cast<int>(j), 0);
  }
  return G;
}

std::vector<cplx> extract_modal_amplitudes(const CVec &u, const PortSpace &ps, cplx lambda,
                                           PhaseReference ref)
{
  std::vector<cplx> c(static_cast<std::size_t>(ps.n_terms));
  const double L = std::abs(ps.x);
  for (int n = 0; n < ps.n_terms; ++n)
  {
    cplx s = 0.0;
    for (std::size_t j = 0; j < ps.dofs.size(); ++j)
    {
      s += ps.projection(static_cast<int>(j), n) * u[ps.dofs[j]];
    }
    if (ref == PhaseReference::absolute)
    {
      s *= std::exp(-I * axial_wavenumber(lambda, n) * L);
    }
    c[n] = s;
  }
  return c;
}

std::vector<cplx> extract_modal_amplitudes(const FieldSolution &u, Port port, cplx lambda, int n_terms,
                                           PhaseReference ref)
{
  if (!u.mesh || u.coefficients.size() != u.mesh->num_dofs())
  {
    fail(ErrorKind::MeshMismatch, "field does not match its mesh");
  }
  return extract_modal_amplitudes(u.coefficients, build_port_space(*u.mesh, port, n_terms), lambda, ref);
}

}  // namespace fano
