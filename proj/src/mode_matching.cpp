// SPDX-License-Identifier: Apache-2.0

#include "fano/mode_matching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fano/error.hpp"

namespace fano
{

namespace
{

constexpr double interval_tol = 1e-12;

double mode_norm(int k, double width) { return std::sqrt((k == 0 ? 1.0 : 2.0) / width); }

cplx local_wavenumber(double lambda, double kappa)
{
  const double z = lambda - kappa * kappa;
  if (std::abs(z) < 1e-10)
  {
    std::ostringstream os;
    os << "lambda=" << lambda << " sits on a local cutoff " << kappa * kappa;
    fail(ErrorKind::ThresholdDegeneracy, os.str());
  }
  return z > 0.0 ? cplx(std::sqrt(z), 0.0) : cplx(0.0, std::sqrt(-z));
}

// sin(t)/t with the removable point filled in
double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

// integral over (c, d) of cos(p y + q)
double cos_integral(double p, double q, double c, double d)
{
  const double half = 0.5 * (d - c), mid = 0.5 * (c + d);
  return (d - c) * std::cos(p * mid + q) * sinc(p * half);
}

std::vector<Interval> cross_section(const WaveguideGeometry &g, double xm)
{
  std::vector<std::pair<double, double>> blocked;
  for (const Rect &r : g.obstacles)
  {
    if (r.x0 < xm && xm < r.x1)
    {
      blocked.emplace_back(std::max(0.0, r.y0), std::min(g.strip_height, r.y1));
    }
  }
  std::sort(blocked.begin(), blocked.end());
  std::vector<Interval> open;
  double y = 0.0;
  for (const auto &[b0, b1] : blocked)
  {
    if (b0 > y + interval_tol)
    {
      open.push_back({y, b0});
    }
    y = std::max(y, b1);
  }
  if (g.strip_height > y + interval_tol)
  {
    open.push_back({y, g.strip_height});
  }
  return open;
}

std::vector<Interval> intersect(const std::vector<Interval> &A, const std::vector<Interval> &B)
{
  std::vector<Interval> out;
  for (const auto &a : A)
  {
    for (const auto &b : B)
    {
      const double lo = std::max(a.a, b.a), hi = std::min(a.b, b.b);
      if (hi > lo + interval_tol)
      {
        out.push_back({lo, hi});
      }
    }
  }
  return out;
}

// W(m, k) = integral over the aperture of psi_m phi_k
Eigen::MatrixXd aperture_overlaps(const ModalBasis &aperture, const ModalBasis &side)
{
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(aperture.size(), side.size());
  for (int m = 0; m < aperture.size(); ++m)
  {
    const Interval &ia = aperture.intervals[aperture.interval_of[m]];
    const double wa = ia.b - ia.a;
    for (int k = 0; k < side.size(); ++k)
    {
      const Interval &is = side.intervals[side.interval_of[k]];
      if (ia.a < is.a - interval_tol || ia.b > is.b + interval_tol)
      {
        continue;
      }
      const double ws = is.b - is.a;
      W(m, k) = mode_norm(aperture.order[m], wa) * mode_norm(side.order[k], ws) *
                cosine_overlap(aperture.order[m] * pi / wa, ia.a, side.order[k] * pi / ws, is.a, ia.a, ia.b);
    }
  }
  return W;
}

}  // namespace

double ModalBasis::value(int mode, double y) const
{
  const Interval &iv = intervals[interval_of[mode]];
  if (y < iv.a || y > iv.b)
  {
    return 0.0;
  }
  const double w = iv.b - iv.a;
  return mode_norm(order[mode], w) * std::cos(order[mode] * pi * (y - iv.a) / w);
}

int modes_for_width(double width, int n_per_unit)
{
  return std::max(2, static_cast<int>(std::ceil(n_per_unit * width - 1e-9)));
}

ModalBasis mm_local_modes(const std::vector<Interval> &cross_section, double lambda, int n_per_unit)
{
  if (cross_section.empty())
  {
    fail(ErrorKind::InvalidArgument, "empty cross-section");
  }
  ModalBasis basis;
  basis.intervals = cross_section;
  std::vector<cplx> beta;
  for (std::size_t p = 0; p < cross_section.size(); ++p)
  {
    const Interval &iv = cross_section[p];
    if (!(iv.b > iv.a))
    {
      fail(ErrorKind::InvalidArgument, "cross-section intervals must be nonempty");
    }
    if (p > 0 && iv.a < cross_section[p - 1].b - interval_tol)
    {
      fail(ErrorKind::InvalidArgument, "cross-section intervals must be disjoint and sorted");
    }
    const double w = iv.b - iv.a;
    const int n = modes_for_width(w, n_per_unit);
    for (int k = 0; k < n; ++k)
    {
      basis.interval_of.push_back(static_cast<int>(p));
      basis.order.push_back(k);
      beta.push_back(local_wavenumber(lambda, k * pi / w));
    }
  }
  basis.beta = Eigen::Map<Eigen::VectorXcd>(beta.data(), static_cast<int>(beta.size()));
  return basis;
}

double cosine_overlap(double p1, double a1, double p2, double a2, double c, double d)
{
  // cos A cos B = (cos(A - B) + cos(A + B)) / 2
  return 0.5 * (cos_integral(p1 - p2, -p1 * a1 + p2 * a2, c, d) + cos_integral(p1 + p2, -p1 * a1 - p2 * a2, c, d));
}

ModalSMatrix ModalSMatrix::identity(int n)
{
  ModalSMatrix s;
  s.S11 = Eigen::MatrixXcd::Zero(n, n);
  s.S22 = Eigen::MatrixXcd::Zero(n, n);
  s.S12 = Eigen::MatrixXcd::Identity(n, n);
  s.S21 = Eigen::MatrixXcd::Identity(n, n);
  return s;
}

ModalSMatrix mm_interface(const ModalBasis &left, const ModalBasis &right, int n_per_unit)
{
  const std::vector<Interval> gap = intersect(left.intervals, right.intervals);
  if (gap.empty())
  {
    fail(ErrorKind::IllConditionedProjection, "interface has no aperture");
  }
  // aperture basis: only its shape functions matter, wavenumbers are unused
  ModalBasis ap;
  ap.intervals = gap;
  for (std::size_t p = 0; p < gap.size(); ++p)
  {
    const int n = modes_for_width(gap[p].b - gap[p].a, n_per_unit);
    for (int k = 0; k < n; ++k)
    {
      ap.interval_of.push_back(static_cast<int>(p));
      ap.order.push_back(k);
    }
  }
  const Eigen::MatrixXcd WL = aperture_overlaps(ap, left).cast<cplx>();
  const Eigen::MatrixXcd WR = aperture_overlaps(ap, right).cast<cplx>();
  const Eigen::VectorXcd dl = (I * left.beta).cwiseInverse();
  const Eigen::VectorXcd dr = (I * right.beta).cwiseInverse();

  const Eigen::MatrixXcd Y = WL * dl.asDiagonal() * WL.transpose() + WR * dr.asDiagonal() * WR.transpose();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Y);
  if (!(lu.rcond() > 1e-12))
  {
    fail(ErrorKind::IllConditionedProjection, "aperture admittance matrix is ill-conditioned");
  }
  const Eigen::MatrixXcd ZL = lu.solve(WL);  // Y^{-1} W_L
  const Eigen::MatrixXcd ZR = lu.solve(WR);

  ModalSMatrix s;
  const int nl = left.size(), nr = right.size();
  s.S11 = Eigen::MatrixXcd::Identity(nl, nl) - 2.0 * dl.asDiagonal() * (WL.transpose() * ZL);
  s.S12 = 2.0 * dl.asDiagonal() * (WL.transpose() * ZR);
  s.S21 = 2.0 * dr.asDiagonal() * (WR.transpose() * ZL);
  s.S22 = Eigen::MatrixXcd::Identity(nr, nr) - 2.0 * dr.asDiagonal() * (WR.transpose() * ZR);
  return s;
}

ModalSMatrix mm_propagation(const Eigen::VectorXcd &beta, double ell)
{
  const int n = static_cast<int>(beta.size());
  ModalSMatrix s = ModalSMatrix::identity(n);
  const Eigen::VectorXcd p = (I * beta * ell).array().exp();
  s.S12 = p.asDiagonal();
  s.S21 = p.asDiagonal();
  return s;
}

ModalSMatrix mm_cascade(const ModalSMatrix &A, const ModalSMatrix &B)
{
  const int n = static_cast<int>(A.S22.rows());
  if (B.S11.rows() != n)
  {
    fail(ErrorKind::InvalidArgument, "star product of incompatible mode counts");
  }
  const Eigen::MatrixXcd Id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> l1(Id - B.S11 * A.S22);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> l2(Id - A.S22 * B.S11);
  ModalSMatrix s;
  const Eigen::MatrixXcd X = l1.solve(B.S11 * A.S21);  // (I - B11 A22)^{-1} B11 A21
  const Eigen::MatrixXcd Yb = l1.solve(B.S12);
  const Eigen::MatrixXcd Xa = l2.solve(A.S21);
  const Eigen::MatrixXcd Ya = l2.solve(A.S22 * B.S12);
  s.S11 = A.S11 + A.S12 * X;
  s.S12 = A.S12 * Yb;
  s.S21 = B.S21 * Xa;
  s.S22 = B.S22 + B.S21 * Ya;
  return s;
}

ModalSMatrix mm_cascade(const ModalSMatrix &A, const ModalSMatrix &B, const Eigen::VectorXcd &beta, double ell)
{
  return mm_cascade(mm_cascade(A, mm_propagation(beta, ell)), B);
}

double flux_unitarity_defect(const ModalSMatrix &S, const Eigen::VectorXcd &beta_left,
                             const Eigen::VectorXcd &beta_right)
{
  std::vector<int> pl, pr;
  for (int k = 0; k < beta_left.size(); ++k)
  {
    if (beta_left[k].imag() == 0.0 && beta_left[k].real() > 0.0)
    {
      pl.push_back(k);
    }
  }
  for (int k = 0; k < beta_right.size(); ++k)
  {
    if (beta_right[k].imag() == 0.0 && beta_right[k].real() > 0.0)
    {
      pr.push_back(k);
    }
  }
  const int nl = static_cast<int>(pl.size()), n = nl + static_cast<int>(pr.size());
  Eigen::MatrixXcd St(n, n);
  auto idx = [&](int i, bool &is_left) {
    is_left = i < nl;
    return is_left ? pl[i] : pr[i - nl];
  };
  for (int i = 0; i < n; ++i)
  {
    bool li;
    const int mi = idx(i, li);
    const double bi = (li ? beta_left[mi] : beta_right[mi]).real();
    for (int j = 0; j < n; ++j)
    {
      bool lj;
      const int mj = idx(j, lj);
      const double bj = (lj ? beta_left[mj] : beta_right[mj]).real();
      const cplx e = li ? (lj ? S.S11(mi, mj) : S.S12(mi, mj)) : (lj ? S.S21(mi, mj) : S.S22(mi, mj));
      St(i, j) = std::sqrt(bi / bj) * e;
    }
  }
  return (St.adjoint() * St - Eigen::MatrixXcd::Identity(n, n)).norm();
}

SegmentStack build_segment_stack(const WaveguideGeometry &g, double lambda, int n_per_unit)
{
  if (g.perturbation_mode == PerturbationMode::wall_bump && g.epsilon != 0.0)
  {
    fail(ErrorKind::UnsupportedPerturbation, "mode matching handles rectilinear geometries only");
  }
  if (!(lambda > 0.0 && lambda < pi * pi))
  {
    fail(ErrorKind::OutOfMonomodeRange, "lambda outside (0, pi^2)");
  }
  std::vector<double> xs{-g.L, g.L};
  for (const Rect &r : g.obstacles)
  {
    for (double x : {r.x0, r.x1})
    {
      if (-g.L < x && x < g.L)
      {
        xs.push_back(x);
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  SegmentStack st;
  for (double x : xs)
  {
    if (st.breaks.empty() || x > st.breaks.back() + interval_tol)
    {
      st.breaks.push_back(x);
    }
  }
  for (std::size_t i = 0; i + 1 < st.breaks.size(); ++i)
  {
    const auto sec = cross_section(g, 0.5 * (st.breaks[i] + st.breaks[i + 1]));
    if (sec.empty())
    {
      fail(ErrorKind::DisconnectedDomain, "a segment is fully blocked");
    }
    st.sections.push_back(sec);
    st.bases.push_back(mm_local_modes(sec, lambda, n_per_unit));
  }
  const auto &first = st.sections.front(), &last = st.sections.back();
  if (first.size() != 1 || last.size() != 1 || first[0].a != 0.0 || last[0].b != g.strip_height)
  {
    fail(ErrorKind::ConfigError, "the end segments must be the full strip");
  }
  return st;
}

ModalSMatrix mm_modal_smatrix(const SegmentStack &stack, int n_per_unit)
{
  ModalSMatrix s = mm_propagation(stack.bases[0].beta, stack.breaks[1] - stack.breaks[0]);
  for (std::size_t i = 1; i < stack.bases.size(); ++i)
  {
    s = mm_cascade(s, mm_interface(stack.bases[i - 1], stack.bases[i], n_per_unit));
    s = mm_cascade(s, mm_propagation(stack.bases[i].beta, stack.breaks[i + 1] - stack.breaks[i]));
  }
  return s;
}

ScatteringMatrix mm_smatrix(const WaveguideGeometry &g, double lambda, int n_per_unit)
{
  const SegmentStack stack = build_segment_stack(g, lambda, n_per_unit);
  const ModalSMatrix s = mm_modal_smatrix(stack, n_per_unit);
  // reference planes at -L and L to the absolute convention e^{+-ikx}
  const double k = std::sqrt(lambda);
  const double span = stack.breaks.back() - stack.breaks.front();
  const cplx phase = std::exp(-I * k * span);
  return make_scattering_matrix(lambda, s.S11(0, 0) * phase, s.S22(0, 0) * phase, s.S21(0, 0) * phase,
                                s.S12(0, 0) * phase);
}

}  // namespace fano
