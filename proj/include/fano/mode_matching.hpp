// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_MODE_MATCHING_HPP
#define FANO_MODE_MATCHING_HPP

#include <vector>

#include "fano/geometry.hpp"
#include "fano/scattering.hpp"

namespace fano
{

struct Interval
{
  double a = 0.0, b = 0.0;
};

// Neumann cosines on each interval of a cross-section, stacked interval by
// interval: sqrt((k == 0 ? 1 : 2) / (b - a)) cos(k pi (y - a) / (b - a)).
struct ModalBasis
{
  std::vector<Interval> intervals;
  std::vector<int> interval_of;  // per mode
  std::vector<int> order;        // k per mode
  Eigen::VectorXcd beta;         // axial wavenumbers, Im >= 0

  int size() const { return static_cast<int>(order.size()); }
  double value(int mode, double y) const;
};

// Mode count on an interval of width w is max(2, ceil(n_per_unit * w)), so
// every interval resolves the same transverse wavenumbers.
int modes_for_width(double width, int n_per_unit);

ModalBasis mm_local_modes(const std::vector<Interval> &cross_section, double lambda, int n_per_unit);

// integral over (c, d) of cos(p1 (y - a1)) cos(p2 (y - a2)), closed form.
double cosine_overlap(double p1, double a1, double p2, double a2, double c, double d);

// Two-port S-matrix in modal amplitudes: [b_left; d_right] = S [a_left; c_right],
// amplitudes measured at the block's own reference planes.
struct ModalSMatrix
{
  Eigen::MatrixXcd S11, S12, S21, S22;

  static ModalSMatrix identity(int n);
};

// Interface between two cross-sections at the same x: continuity of u and of
// d_x u on the common aperture, d_x u = 0 on the blocked parts. Unknowns are
// the aperture normal derivative in aperture cosines.
ModalSMatrix mm_interface(const ModalBasis &left, const ModalBasis &right, int n_per_unit);

// Uniform section of length ell: diagonal e^{i beta ell}.
ModalSMatrix mm_propagation(const Eigen::VectorXcd &beta, double ell);

// Redheffer star product of A (ports 1-2) and B (ports 2-3).
ModalSMatrix mm_cascade(const ModalSMatrix &A, const ModalSMatrix &B);
// A, then the spacer, then B.
ModalSMatrix mm_cascade(const ModalSMatrix &A, const ModalSMatrix &B, const Eigen::VectorXcd &beta, double ell);

// ||S~^H S~ - I|| on the propagating modes, with S~ the flux-normalized matrix.
double flux_unitarity_defect(const ModalSMatrix &S, const Eigen::VectorXcd &beta_left,
                             const Eigen::VectorXcd &beta_right);

struct SegmentStack
{
  std::vector<double> breaks;  // -L = x_0 < ... < x_n = L
  std::vector<std::vector<Interval>> sections;
  std::vector<ModalBasis> bases;
};

SegmentStack build_segment_stack(const WaveguideGeometry &g, double lambda, int n_per_unit);

// Full modal S-matrix between x = -L and x = L (local phases).
ModalSMatrix mm_modal_smatrix(const SegmentStack &stack, int n_per_unit);

// Monomode scattering matrix with the absolute phase convention of the FEM.
ScatteringMatrix mm_smatrix(const WaveguideGeometry &g, double lambda, int n_per_unit = 30);

}  // namespace fano

#endif  // FANO_MODE_MATCHING_HPP
