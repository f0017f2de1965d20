#include "qpf/ring.hpp"

#include <cmath>
#include <numbers>

namespace qpf {

std::vector<long long> cyclotomic(int n) {
  if (n < 1) throw std::invalid_argument("cyclotomic: n must be positive");
  // Phi_n = (x^n - 1) / prod_{d|n, d<n} Phi_d, by repeated exact division.
  std::vector<long long> p(n + 1, 0);
  p[0] = -1;
  p[n] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    std::vector<long long> phi_d = cyclotomic(d);
    // divide p by phi_d (both monic up to sign; phi_d monic)
    std::vector<long long> quot(p.size() - phi_d.size() + 1, 0);
    std::vector<long long> rem = p;
    for (int i = (int)quot.size() - 1; i >= 0; --i) {
      long long f = rem[i + phi_d.size() - 1];
      quot[i] = f;
      if (f == 0) continue;
      for (size_t j = 0; j < phi_d.size(); ++j) rem[i + j] -= f * phi_d[j];
    }
    p = quot;
  }
  return p;
}

std::vector<long long> minimal_polynomial(int q) {
  if (q < 2) throw std::invalid_argument("minimal_polynomial: q >= 2 required");
  std::vector<long long> phi = cyclotomic(2 * q);
  int d = ((int)phi.size() - 1) / 2;  // phi(2q)/2
  // Phi_{2q} is palindromic; with x^d factored out it is a polynomial in
  // y = x + 1/x:  Phi(x)/x^d = c_d + sum_{r>=1} c_{d+r} (x^r + x^-r)
  // and x^r + x^-r = p_r(y), p_0 = 2, p_1 = y, p_{r+1} = y p_r - p_{r-1}.
  std::vector<std::vector<long long>> pr(d + 1);
  pr[0] = {2};
  if (d >= 1) pr[1] = {0, 1};
  for (int r = 2; r <= d; ++r) {
    pr[r].assign(r + 1, 0);
    for (size_t i = 0; i < pr[r - 1].size(); ++i) pr[r][i + 1] += pr[r - 1][i];
    for (size_t i = 0; i < pr[r - 2].size(); ++i) pr[r][i] -= pr[r - 2][i];
  }
  std::vector<long long> psi(d + 1, 0);
  psi[0] = phi[d];
  for (int r = 1; r <= d; ++r)
    for (size_t i = 0; i < pr[r].size(); ++i) psi[i] += phi[d + r] * pr[r][i];
  return psi;  // monic since phi[2d] = 1 and pr[d] is monic
}

Ring::Ring(int q) : q_(q) {
  psi_ = minimal_polynomial(q);
  d_ = (int)psi_.size() - 1;
  omega_ = 2.0 * std::cos(std::numbers::pi / q);
  // two_cos table via the reduced Chebyshev recursion
  dr_.resize(2 * q + 1, zero());
  dr_[0].coeffs[0] = 2;
  if (d_ >= 2) {
    dr_[1].coeffs[1] = 1;
  } else {
    // d == 1: omega is an integer root of psi (never happens for q >= 4)
    dr_[1].coeffs[0] = -psi_[0];
  }
  auto mul_omega = [this](const RingElement& a) {
    RingElement r = zero();
    long long top = 0;
    for (int i = d_ - 1; i >= 1; --i) r.coeffs[i] = a.coeffs[i - 1];
    top = a.coeffs[d_ - 1];
    if (top != 0)
      for (int i = 0; i < d_; ++i) r.coeffs[i] -= top * psi_[i];
    return r;
  };
  for (int r = 2; r <= 2 * q; ++r)
    dr_[r] = sub(mul_omega(dr_[r - 1]), dr_[r - 2]);
}

RingElement Ring::from_int(long long n) const {
  RingElement r = zero();
  r.coeffs[0] = n;
  return r;
}

static void align(const RingElement& a, const RingElement& b, RingElement& aa,
                  RingElement& bb) {
  aa = a;
  bb = b;
  while (aa.log2_den < bb.log2_den) {
    for (auto& c : aa.coeffs) c *= 2;
    ++aa.log2_den;
  }
  while (bb.log2_den < aa.log2_den) {
    for (auto& c : bb.coeffs) c *= 2;
    ++bb.log2_den;
  }
}

RingElement Ring::add(const RingElement& a, const RingElement& b) const {
  RingElement aa, bb;
  align(a, b, aa, bb);
  for (int i = 0; i < d_; ++i) aa.coeffs[i] += bb.coeffs[i];
  return aa;
}

RingElement Ring::sub(const RingElement& a, const RingElement& b) const {
  RingElement aa, bb;
  align(a, b, aa, bb);
  for (int i = 0; i < d_; ++i) aa.coeffs[i] -= bb.coeffs[i];
  return aa;
}

RingElement Ring::scale(const RingElement& a, long long n) const {
  RingElement r = a;
  for (auto& c : r.coeffs) c *= n;
  return r;
}

const RingElement& Ring::two_cos(int r) const {
  r = ((r % (2 * q_)) + 2 * q_) % (2 * q_);
  return dr_[r];
}

RingElement Ring::norm2_doubled(const std::vector<int>& word) const {
  // 2|k|^2 = sum_{i,j} m_i m_j * 2cos((i-j) pi/q)
  RingElement acc = zero();
  int n = (int)word.size();
  for (int i = 0; i < n; ++i) {
    if (word[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (word[j] == 0) continue;
      acc = add(acc, scale(two_cos(std::abs(i - j)),
                           (long long)word[i] * word[j]));
    }
  }
  return acc;
}

double Ring::value(const RingElement& a) const {
  long double v = 0, p = 1;
  for (int i = 0; i < d_; ++i) {
    v += (long double)a.coeffs[i] * p;
    p *= omega_;
  }
  return (double)(v / std::exp2l(a.log2_den));
}

}  // namespace qpf
