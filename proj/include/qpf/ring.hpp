#pragma once
// Exact arithmetic in Z[omega], omega = 2cos(pi/q), reduced modulo the
// minimal polynomial of omega.  Everything here is integer-exact; floats
// only appear when a value is finally evaluated.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpf {

// Coefficients of the n-th cyclotomic polynomial, ascending degree, monic.
std::vector<long long> cyclotomic(int n);

// Minimal polynomial of omega = 2cos(pi/q) over Z, ascending degree, monic.
// Obtained from Phi_{2q}(x) by collapsing the palindrome x + 1/x -> y.
// Degree d = phi(2q)/2 = l0 + 1.
std::vector<long long> minimal_polynomial(int q);

// An element of (1/2^e) Z[omega] stored in the power basis {1, omega, ...,
// omega^{d-1}} with a common power-of-two denominator.
struct RingElement {
  std::vector<long long> coeffs;  // length d
  int log2_den = 0;               // denominator 2^log2_den

  bool is_zero() const {
    for (long long c : coeffs)
      if (c != 0) return false;
    return true;
  }
};

// Context caching the minimal polynomial and the reduced powers of omega
// needed for norm computations at a fixed q.
class Ring {
 public:
  explicit Ring(int q);

  int q() const { return q_; }
  int degree() const { return d_; }
  const std::vector<long long>& min_poly() const { return psi_; }
  double omega() const { return omega_; }

  RingElement zero() const { return {std::vector<long long>(d_, 0), 0}; }
  RingElement from_int(long long n) const;

  RingElement add(const RingElement& a, const RingElement& b) const;
  RingElement sub(const RingElement& a, const RingElement& b) const;
  RingElement scale(const RingElement& a, long long n) const;

  // 2cos(r*pi/q) as an exact element of Z[omega] (Chebyshev-style recursion
  // D_0 = 2, D_1 = omega, D_{r+1} = omega*D_r - D_{r-1}, reduced mod psi).
  const RingElement& two_cos(int r) const;

  // Exact 2|k|^2 for a word m' over k_1..k_q (k = sum m'_j k_j).
  RingElement norm2_doubled(const std::vector<int>& word) const;

  double value(const RingElement& a) const;  // evaluate at omega

 private:
  int q_, d_;
  std::vector<long long> psi_;
  double omega_;
  std::vector<RingElement> dr_;  // two_cos table, r = 0..2q
};

}  // namespace qpf
