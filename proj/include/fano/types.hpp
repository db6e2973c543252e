// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_TYPES_HPP
#define FANO_TYPES_HPP

#include <complex>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fano
{

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using RealSpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Point2 = Eigen::Vector2d;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

}  // namespace fano

#endif  // FANO_TYPES_HPP
