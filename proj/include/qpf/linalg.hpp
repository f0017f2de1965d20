#pragma once
// Small dense linear algebra: LU with partial pivoting and a cyclic Jacobi
// eigenvalue sweep for symmetric matrices.  Sizes here stay modest (Newton
// systems <= a few thousand, eigen problems <= a few hundred), so simple
// row-major kernels are enough.

#include <cstddef>
#include <vector>

namespace qpf {

struct Matrix {
  int n = 0, m = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(int rows, int cols) : n(rows), m(cols), a((size_t)rows * cols, 0.0) {}
  double& operator()(int i, int j) { return a[(size_t)i * m + j]; }
  double operator()(int i, int j) const { return a[(size_t)i * m + j]; }
};

// In-place LU factorization with partial pivoting; perm holds row swaps.
// Returns false if a pivot underflows (singular to working precision).
bool lu_factor(Matrix& A, std::vector<int>& perm);

// Solve A x = b using a factorization from lu_factor; b is overwritten.
void lu_solve(const Matrix& LU, const std::vector<int>& perm,
              std::vector<double>& b);

// Eigenvalues (ascending) of a symmetric matrix via cyclic Jacobi rotations,
// converged to off-diagonal Frobenius mass <= tol.  Throws after max_sweeps.
std::vector<double> jacobi_eigenvalues(Matrix A, double tol = 1e-13,
                                       int max_sweeps = 100);

// Smallest-magnitude eigenvalue of a symmetric matrix by shifted inverse
// power iteration (shift 0, with a tiny fallback shift if A is singular).
double smallest_abs_eigenvalue(const Matrix& A, int max_iter = 500,
                               double tol = 1e-12);

}  // namespace qpf
