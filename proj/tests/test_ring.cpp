#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qpf/ring.hpp"

using namespace qpf;

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic(1) == std::vector<long long>{-1, 1});
  CHECK(cyclotomic(2) == std::vector<long long>{1, 1});
  CHECK(cyclotomic(8) == std::vector<long long>{1, 0, 0, 0, 1});
  CHECK(cyclotomic(10) == std::vector<long long>{1, -1, 1, -1, 1});
  CHECK(cyclotomic(12) == std::vector<long long>{1, 0, -1, 0, 1});
}

TEST_CASE("minimal polynomial of 2cos(pi/q)") {
  // q=4: omega = sqrt(2)
  CHECK(minimal_polynomial(4) == std::vector<long long>{-2, 0, 1});
  // q=5: omega = golden ratio, y^2 - y - 1
  CHECK(minimal_polynomial(5) == std::vector<long long>{-1, -1, 1});
  // q=6: omega = sqrt(3)
  CHECK(minimal_polynomial(6) == std::vector<long long>{-3, 0, 1});
  // degree = phi(2q)/2 and omega is a root, q = 4..9
  for (int q = 4; q <= 9; ++q) {
    auto psi = minimal_polynomial(q);
    double w = 2.0 * std::cos(std::numbers::pi / q), v = 0, p = 1;
    for (auto c : psi) {
      v += c * p;
      p *= w;
    }
    CHECK(std::fabs(v) < 1e-9);
    CHECK(psi.back() == 1);
  }
}

TEST_CASE("two_cos table and evaluation") {
  for (int q = 4; q <= 8; ++q) {
    Ring R(q);
    CHECK(std::fabs(R.omega() - 2 * std::cos(std::numbers::pi / q)) < 1e-14);
    for (int r = 0; r <= 2 * q; ++r)
      CHECK(std::fabs(R.value(R.two_cos(r)) -
                      2 * std::cos(std::numbers::pi * r / q)) < 1e-12);
  }
}

TEST_CASE("exact doubled norm") {
  Ring R(4);
  // k1 + k2: 2|k|^2 = 4 + 2 sqrt(2)
  RingElement n = R.norm2_doubled({1, 1, 0, 0});
  CHECK(n.coeffs == std::vector<long long>{4, 2});
  CHECK(std::fabs(R.value(n) - (4 + 2 * std::sqrt(2.0))) < 1e-12);
  // unit vector: 2|k|^2 = 2
  CHECK(R.norm2_doubled({0, 0, 1, 0}).coeffs == std::vector<long long>{2, 0});
  // zero word
  CHECK(R.norm2_doubled({0, 0, 0, 0}).is_zero());
}

TEST_CASE("ring arithmetic with dyadic denominators") {
  Ring R(4);
  RingElement a{{1, 2}, 0}, b{{1, 0}, 1};  // 1 + 2w  and  1/2
  RingElement s = R.add(a, b);
  CHECK(s.log2_den == 1);
  CHECK(s.coeffs == std::vector<long long>{3, 4});
  CHECK(std::fabs(R.value(s) - (1.5 + 2 * std::sqrt(2.0))) < 1e-12);
  CHECK(R.sub(a, a).is_zero());
}
