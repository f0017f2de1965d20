#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qpf/asymptotics.hpp"

using namespace qpf;

TEST_CASE("lambda2 = 3(2q-1) with convolution cross-check") {
  CHECK(lambda_2(4) == 21.0);
  CHECK(lambda_2(5) == 27.0);
  CHECK(lambda_2(6) == 33.0);
  for (int q : {4, 5, 6}) {
    auto B = expand_bundle(q);  // throws if the u0^3 route disagrees
    CHECK(B.lambda2 == 3.0 * (2 * q - 1));
  }
}

TEST_CASE("u1 coefficients") {
  for (int q = 4; q <= 8; ++q) {
    auto B = expand_bundle(q);
    const LatticeAtlas& A = *B.host;
    Canon c3k1 = canon_add(canon_add(A.unit_canon(0), A.unit_canon(0)),
                           A.unit_canon(0));
    CHECK(std::fabs(B.u1.get(A.find(c3k1)) - (-1.0 / 64.0)) <= 1e-15);
    for (auto& [i, v] : B.u1.coeffs) CHECK(v < 0.0);
    for (auto& [i, v] : B.u1.coeffs) CHECK(A.site(i).n <= 3);
  }
  // 2k1 + k2 at q=4: alpha = -3/(1 - (5 + 2 sqrt 2))^2 = -3/(24 + 16 sqrt 2)
  auto B = expand_bundle(4);
  const LatticeAtlas& A = *B.host;
  Canon c = canon_add(canon_add(A.unit_canon(0), A.unit_canon(0)),
                      A.unit_canon(1));
  double expect = -3.0 / (24.0 + 16.0 * std::sqrt(2.0));
  CHECK(B.u1.get(A.find(c)) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(rotate_field(B.u1).coeffs == B.u1.coeffs);
}

TEST_CASE("lambda4 regression (frozen oracle values) and bundle means") {
  // values pinned from an independent prototype of the triple convolution
  const double expect[5] = {-259.921875, -707.44687499999998, -2320.921875,
                            -2970.046875, -5173.921875};
  for (int q = 4; q <= 8; ++q) {
    auto B = expand_bundle(q);
    CHECK(B.lambda4 < 0);
    CHECK(B.lambda4 ==
          doctest::Approx(expect[q - 4]).epsilon(1e-9));
    CHECK(B.a0 == 3.0);
    CHECK(B.b0 == -B.lambda4);
    // a is supported on {0} union two-sums; a two-sum can collapse to a
    // shorter word (q = 6: k_1 + k_5 = k_3), so only N <= 2 is structural
    for (auto& [i, v] : B.a_field.coeffs) CHECK(B.host->site(i).n <= 2);
  }
}

TEST_CASE("u2 support and symmetry") {
  auto B = expand_bundle(5);
  for (auto& [i, v] : B.u2.coeffs) CHECK(B.host->site(i).n <= 5);
  CHECK(rotate_field(B.u2).coeffs == B.u2.coeffs);
}

TEST_CASE("prepared state and residual order eps^7") {
  auto B = expand_bundle(4);
  auto P1 = prepare(B, 0.04);
  auto P2 = prepare(B, 0.02);
  CHECK(P1.lambda_eps ==
        doctest::Approx(0.04 * 0.04 * 21 + std::pow(0.04, 4) * B.lambda4));
  for (auto& [i, v] : P1.f_eps.coeffs) CHECK(P1.host->site(i).n <= 15);
  double r1 = std::pow(0.04, 7) * hs_norm(P1.f_eps, 0);
  double r2 = std::pow(0.02, 7) * hs_norm(P2.f_eps, 0);
  double ratio = r1 / r2;
  MESSAGE("residual ratio at (0.04, 0.02): ", ratio);
  CHECK(ratio >= 100.0);
  CHECK(ratio <= 160.0);
  // f_eps itself stays O(1): bounded ratio across eps
  double f1 = hs_norm(P1.f_eps, 0), f2 = hs_norm(P2.f_eps, 0);
  CHECK(f1 / f2 > 0.5);
  CHECK(f1 / f2 < 2.0);
}

TEST_CASE("epsilon_from_lambda") {
  auto B = expand_bundle(4);
  for (double e0 : {0.02, 0.05, 0.1}) {
    double lam = lambda_eps(B, e0);
    CHECK(epsilon_from_lambda(B, lam) == doctest::Approx(e0).epsilon(1e-14));
  }
  double tiny = 1e-8;
  CHECK(epsilon_from_lambda(B, tiny) ==
        doctest::Approx(std::sqrt(tiny / 21.0)).epsilon(1e-4));
  CHECK_THROWS(epsilon_from_lambda(B, -1.0));
  CHECK_THROWS(epsilon_from_lambda(B, 1e9));
}

TEST_CASE("U_eps assembly on a foreign atlas") {
  auto B = expand_bundle(4);
  LatticeAtlas target(4, 9);
  double eps = 0.05;
  SpectralField U = assemble_U_eps(B, eps, target);
  CHECK(U.get(target.unit_site(0)) ==
        doctest::Approx(eps + std::pow(eps, 3) * 0.0 +
                        std::pow(eps, 5) * B.u2.get(B.host->unit_site(0))));
  CHECK(U.symmetric);
}
