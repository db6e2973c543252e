// SPDX-License-Identifier: Apache-2.0

#include "fano/linear_solver.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <umfpack.h>

#include "fano/error.hpp"

namespace fano
{

SparseLU::SparseLU() : control_(UMFPACK_CONTROL)
{
  umfpack_zi_defaults(control_.data());
  control_[UMFPACK_IRSTEP] = 0;  // callers refine explicitly where it matters
}

SparseLU::~SparseLU() { release_all(); }

SparseLU::SparseLU(SparseLU &&other) noexcept { *this = std::move(other); }

SparseLU &SparseLU::operator=(SparseLU &&other) noexcept
{
  if (this != &other)
  {
    release_all();
    n_ = other.n_;
    colptr_ = std::move(other.colptr_);
    rowind_ = std::move(other.rowind_);
    values_ = std::move(other.values_);
    symbolic_ = std::exchange(other.symbolic_, nullptr);
    numeric_ = std::exchange(other.numeric_, nullptr);
    rcond_ = other.rcond_;
    control_ = other.control_;
  }
  return *this;
}

void SparseLU::release_numeric()
{
  if (numeric_)
  {
    umfpack_zi_free_numeric(&numeric_);
    numeric_ = nullptr;
  }
}

void SparseLU::release_all()
{
  release_numeric();
  if (symbolic_)
  {
    umfpack_zi_free_symbolic(&symbolic_);
    symbolic_ = nullptr;
  }
}

void SparseLU::factorize(const SpMat &A)
{
  if (A.rows() != A.cols())
  {
    fail(ErrorKind::InvalidArgument, "factorize needs a square matrix");
  }
  if (!A.isCompressed())
  {
    fail(ErrorKind::InvalidArgument, "factorize needs a compressed matrix");
  }
  const int n = static_cast<int>(A.rows());
  const int nnz = static_cast<int>(A.nonZeros());
  const bool same_pattern =
      symbolic_ && n == n_ && static_cast<int>(rowind_.size()) == nnz &&
      std::equal(colptr_.begin(), colptr_.end(), A.outerIndexPtr()) &&
      std::equal(rowind_.begin(), rowind_.end(), A.innerIndexPtr());
  release_numeric();
  if (!same_pattern)
  {
    release_all();
    n_ = n;
    colptr_.assign(A.outerIndexPtr(), A.outerIndexPtr() + n + 1);
    rowind_.assign(A.innerIndexPtr(), A.innerIndexPtr() + nnz);
  }
  const double *raw = reinterpret_cast<const double *>(A.valuePtr());
  values_.assign(raw, raw + 2 * static_cast<std::size_t>(nnz));

  double info[UMFPACK_INFO];
  if (!symbolic_)
  {
    const int status = umfpack_zi_symbolic(n, n, colptr_.data(), rowind_.data(), values_.data(),
                                           nullptr, &symbolic_, control_.data(), info);
    if (status != UMFPACK_OK)
    {
      symbolic_ = nullptr;
      fail(ErrorKind::SingularMatrix, "symbolic analysis failed, status " + std::to_string(status));
    }
  }
  const int status = umfpack_zi_numeric(colptr_.data(), rowind_.data(), values_.data(), nullptr,
                                        symbolic_, &numeric_, control_.data(), info);
  rcond_ = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || !std::isfinite(rcond_) || rcond_ == 0.0)
  {
    release_numeric();
    fail(ErrorKind::SingularMatrix, "matrix is singular to working precision");
  }
  if (status != UMFPACK_OK)
  {
    release_numeric();
    fail(ErrorKind::SingularMatrix, "numeric factorization failed, status " + std::to_string(status));
  }
}

CVec SparseLU::solve_impl(const CVec &b, int sys) const
{
  if (!numeric_)
  {
    fail(ErrorKind::InvalidArgument, "solve before factorize");
  }
  if (b.size() != n_)
  {
    fail(ErrorKind::InvalidArgument, "right-hand side has the wrong length");
  }
  CVec x(n_);
  double info[UMFPACK_INFO];
  const int status = umfpack_zi_solve(sys, colptr_.data(), rowind_.data(), values_.data(), nullptr,
                                      reinterpret_cast<double *>(x.data()), nullptr,
                                      reinterpret_cast<const double *>(b.data()), nullptr, numeric_,
                                      control_.data(), info);
  if (status != UMFPACK_OK)
  {
    fail(ErrorKind::SingularMatrix, "triangular solve failed, status " + std::to_string(status));
  }
  return x;
}

CVec SparseLU::solve(const CVec &b) const { return solve_impl(b, UMFPACK_A); }

CVec SparseLU::solve_transpose(const CVec &b) const { return solve_impl(b, UMFPACK_Aat); }

CVec solve_linear_system(const SpMat &A, const CVec &b)
{
  SpMat Ac = A;
  Ac.makeCompressed();
  SparseLU lu;
  lu.factorize(Ac);
  CVec x = lu.solve(b);
  const double bn = b.norm();
  double res = (b - Ac * x).norm();
  for (int it = 0; it < 3 && res > 1e-12 * bn; ++it)
  {
    x += lu.solve(b - Ac * x);
    res = (b - Ac * x).norm();
  }
  if (!std::isfinite(res) || res > 1e-10 * std::max(bn, 1e-300))
  {
    std::ostringstream os;
    os << "residual " << res / bn << " after refinement";
    fail(ErrorKind::SingularMatrix, os.str());
  }
  return x;
}

CVec deflated_solve(const SpMat &A, const CVec &b, const Eigen::MatrixXcd &V, const SpMat *M)
{
  const int n = static_cast<int>(A.rows());
  const int k = static_cast<int>(V.cols());
  if (V.rows() != n || b.size() != n || k == 0)
  {
    fail(ErrorKind::InvalidArgument, "deflation vectors do not match the system");
  }
  if (V.norm() == 0.0)
  {
    fail(ErrorKind::InvalidArgument, "deflation vector must be nonzero");
  }
  const Eigen::MatrixXcd MV = M ? Eigen::MatrixXcd(*M * V) : V;
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * static_cast<std::size_t>(n) * k);
  for (int c = 0; c < A.outerSize(); ++c)
  {
    for (SpMat::InnerIterator it(A, c); it; ++it)
    {
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int j = 0; j < k; ++j)
  {
    for (int i = 0; i < n; ++i)
    {
      if (MV(i, j) != 0.0)
      {
        trip.emplace_back(i, n + j, MV(i, j));
        trip.emplace_back(n + j, i, std::conj(MV(i, j)));
      }
    }
  }
  SpMat B(n + k, n + k);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  CVec rhs = CVec::Zero(n + k);
  rhs.head(n) = b;

  SparseLU lu;
  try
  {
    lu.factorize(B);
  }
  catch (const Error &e)
  {
    fail(ErrorKind::SingularAugmentedSystem, e.what());
  }
  CVec z = lu.solve(rhs);
  const double bn = std::max(b.norm(), 1e-300);
  double res = (rhs - B * z).norm();
  for (int it = 0; it < 3 && res > 1e-12 * bn; ++it)
  {
    z += lu.solve(rhs - B * z);
    res = (rhs - B * z).norm();
  }
  if (!std::isfinite(res) || res > 1e-8 * bn)
  {
    std::ostringstream os;
    os << "bordered residual " << res / bn;
    fail(ErrorKind::SingularAugmentedSystem, os.str());
  }
  return z.head(n);
}

CVec deflated_solve(const SpMat &A, const CVec &b, const CVec &v, const SpMat *M)
{
  return deflated_solve(A, b, Eigen::MatrixXcd(v), M);
}

}  // namespace fano
