#include "qpf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qpf {

bool lu_factor(Matrix& A, std::vector<int>& perm) {
  int n = A.n;
  perm.resize(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::fabs(A(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(A(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best < 1e-300) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      std::swap(perm[k], perm[p]);
    }
    double piv = A(k, k);
    for (int i = k + 1; i < n; ++i) {
      double f = A(i, k) / piv;
      A(i, k) = f;
      if (f == 0.0) continue;
      double* ri = &A.a[(size_t)i * n];
      const double* rk = &A.a[(size_t)k * n];
      for (int j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
  return true;
}

void lu_solve(const Matrix& LU, const std::vector<int>& perm,
              std::vector<double>& b) {
  int n = LU.n;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
  for (int i = 0; i < n; ++i) {
    double s = x[i];
    const double* ri = &LU.a[(size_t)i * n];
    for (int j = 0; j < i; ++j) s -= ri[j] * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    const double* ri = &LU.a[(size_t)i * n];
    for (int j = i + 1; j < n; ++j) s -= ri[j] * x[j];
    x[i] = s / ri[i];
  }
  b = x;
}

std::vector<double> jacobi_eigenvalues(Matrix A, double tol, int max_sweeps) {
  int n = A.n;
  auto off = [&]() {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += A(i, j) * A(i, j);
    return std::sqrt(2 * s);
  };
  double scale = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(A(i, j)));
  if (scale == 0) return std::vector<double>(n, 0.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off() <= tol * scale) {
      std::vector<double> ev(n);
      for (int i = 0; i < n; ++i) ev[i] = A(i, i);
      std::sort(ev.begin(), ev.end());
      return ev;
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (apq == 0.0) continue;
        double theta = (A(q, q) - A(p, p)) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
  }
  throw std::runtime_error("jacobi_eigenvalues: no convergence (matrix not symmetric?)");
}

double smallest_abs_eigenvalue(const Matrix& A, int max_iter, double tol) {
  int n = A.n;
  Matrix LU = A;
  std::vector<int> perm;
  double shift = 0.0;
  if (!lu_factor(LU, perm)) {
    return 0.0;  // exactly singular on the truncation
  }
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = U(rng);
  double mu = 0, mu_prev = 1e300;
  for (int it = 0; it < max_iter; ++it) {
    lu_solve(LU, perm, v);
    double nv = 0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;
    // Rayleigh quotient of A
    double num = 0;
    for (int i = 0; i < n; ++i) {
      double s = 0;
      const double* ri = &A.a[(size_t)i * n];
      for (int j = 0; j < n; ++j) s += ri[j] * v[j];
      num += v[i] * s;
    }
    mu = num + shift;
    if (std::fabs(mu - mu_prev) <= tol * (std::fabs(mu) + 1e-30) && it > 2)
      break;
    mu_prev = mu;
  }
  return mu;
}

}  // namespace qpf
