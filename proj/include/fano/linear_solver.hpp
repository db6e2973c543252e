// SPDX-License-Identifier: Apache-2.0

#ifndef FANO_LINEAR_SOLVER_HPP
#define FANO_LINEAR_SOLVER_HPP

#include <vector>

#include "fano/types.hpp"

namespace fano
{

//
// Direct LU factorization of a complex sparse matrix (UMFPACK). The symbolic
// analysis is kept across factorize() calls with the same sparsity pattern.
// One object per worker; not thread-safe.
//
class SparseLU
{
public:
  SparseLU();
  ~SparseLU();
  SparseLU(const SparseLU &) = delete;
  SparseLU &operator=(const SparseLU &) = delete;
  SparseLU(SparseLU &&other) noexcept;
  SparseLU &operator=(SparseLU &&other) noexcept;

  // Throws SingularMatrix when UMFPACK reports an exactly singular matrix.
  void factorize(const SpMat &A);

  CVec solve(const CVec &b) const;
  // Solve with A^T (no conjugation).
  CVec solve_transpose(const CVec &b) const;

  // Reciprocal condition estimate min|U_ii| / max|U_ii|.
  double rcond() const { return rcond_; }
  int rows() const { return n_; }

private:
  CVec solve_impl(const CVec &b, int sys) const;
  void release_numeric();
  void release_all();

  int n_ = 0;
  std::vector<int> colptr_, rowind_;
  std::vector<double> values_;  // interleaved complex, matching A's pattern
  void *symbolic_ = nullptr;
  void *numeric_ = nullptr;
  double rcond_ = 0.0;
  std::vector<double> control_;
};

// One-shot direct solve with residual check; throws SingularMatrix.
CVec solve_linear_system(const SpMat &A, const CVec &b);

// Bordered solve [[A, M v], [(M v)^H, 0]] [x; y] = [b; 0]; returns x, which
// satisfies <x, v>_M = 0. M defaults to the identity.
CVec deflated_solve(const SpMat &A, const CVec &b, const CVec &v, const SpMat *M = nullptr);

// Same with several deflation vectors (columns of V).
CVec deflated_solve(const SpMat &A, const CVec &b, const Eigen::MatrixXcd &V, const SpMat *M);

}  // namespace fano

#endif  // FANO_LINEAR_SOLVER_HPP
