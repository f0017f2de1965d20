#include "qpf/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qpf {

SpectralField base_pattern(const LatticeAtlas& host) {
  SpectralField u0 = zero_field(host);
  for (int j = 0; j < 2 * host.q(); ++j) u0.coeffs[host.unit_site(j)] = 1.0;
  u0.symmetric = true;
  return u0;
}

double lambda_2(int q) { return 3.0 * (2 * q - 1); }

namespace {

// (1 - |k|^2)^2 from the exact norm; callers must have excluded the unit
// circle (checked exactly) before dividing by this.
double divisor_sq(const LatticeAtlas& A, int i) {
  double d = A.small_divisor(i);
  return d * d;
}

}  // namespace

ExpansionBundle expand_bundle(int q) {
  ExpansionBundle B;
  B.q = q;
  B.host = std::make_shared<LatticeAtlas>(q, 6);
  const LatticeAtlas& A = *B.host;

  B.u0 = base_pattern(A);
  B.lambda2 = lambda_2(q);

  // u0^3 by exact convolution
  SpectralField u0sq = multiply(B.u0, B.u0, A).field;
  SpectralField c3 = multiply(u0sq, B.u0, A).field;

  // independent route: count ordered generator triples per canonical key
  std::unordered_map<Canon, long long, CanonHash> triple;
  for (int j = 0; j < 2 * q; ++j)
    for (int l = 0; l < 2 * q; ++l)
      for (int r = 0; r < 2 * q; ++r)
        triple[canon_add(canon_add(A.unit_canon(j), A.unit_canon(l)),
                         A.unit_canon(r))] += 1;

  int k1 = A.unit_site(0);
  if (std::fabs(c3.get(k1) - B.lambda2) > 1e-12)
    throw std::runtime_error("expand: u0^3 coefficient at k1 disagrees with 3(2q-1)");

  B.u1 = zero_field(A);
  SpectralField u1_counted = zero_field(A);
  for (auto& [i, v] : c3.coeffs) {
    if (A.small_divisor_exact(i).is_zero()) {
      // solvability: every unit-circle coefficient must equal lambda2
      if (std::fabs(v - B.lambda2) > 1e-12)
        throw std::runtime_error("expand: unit-circle solvability failure at order 3");
      continue;
    }
    B.u1.set(i, -v / divisor_sq(A, i));
  }
  for (auto& [c, cnt] : triple) {
    int i = A.find(c);
    if (i < 0 || A.small_divisor_exact(i).is_zero()) continue;
    u1_counted.set(i, -(double)cnt / divisor_sq(A, i));
  }
  for (auto& [i, v] : B.u1.coeffs)
    if (std::fabs(v - u1_counted.get(i)) > 1e-13)
      throw std::runtime_error("expand: u1 dual-construction mismatch");
  if (B.u1.nnz() != u1_counted.nnz())
    throw std::runtime_error("expand: u1 support mismatch between routes");
  B.u1.symmetric = true;

  // order 5: 3 u0^2 u1 with the lambda4 solvability correction
  SpectralField u0u1 = multiply(B.u0, B.u1, A).field;
  SpectralField t = multiply(u0u1, B.u0, A).field;  // u0^2 u1
  B.lambda4 = 3.0 * t.get(k1);
  if (!(B.lambda4 < 0)) throw std::runtime_error("expand: lambda4 not negative");

  B.u2 = zero_field(A);
  for (int i = 0; i < (int)A.size(); ++i) {
    double rhs = B.lambda2 * B.u1.get(i) + B.lambda4 * B.u0.get(i) -
                 3.0 * t.get(i);
    if (A.small_divisor_exact(i).is_zero()) {
      if (std::fabs(rhs) > 1e-12)
        throw std::runtime_error("expand: unit-circle solvability failure at order 5");
      continue;
    }
    if (rhs != 0.0) B.u2.set(i, rhs / divisor_sq(A, i));
  }
  // the per-site convolution sums drift across an orbit at machine level;
  // orbit-averaging makes the pi/q symmetry exact
  for (auto& orb : A.orbits()) {
    double avg = 0;
    for (int i : orb) avg += B.u2.get(i);
    avg /= (double)orb.size();
    for (int i : orb) B.u2.set(i, avg);
  }
  B.u2.symmetric = true;

  // a = 3 u0^2 - lambda2, b = 6 u0 u1 - lambda4 (constants shift the mean)
  B.a_field = zero_field(A);
  accumulate(B.a_field, 3.0, u0sq);
  B.a_field.add(A.origin(), -B.lambda2);
  B.b_field = zero_field(A);
  accumulate(B.b_field, 6.0, u0u1);
  B.b_field.add(A.origin(), -B.lambda4);
  B.a0 = B.a_field.get(A.origin());
  B.b0 = B.b_field.get(A.origin());
  return B;
}

double lambda_4(int q) { return expand_bundle(q).lambda4; }

double lambda_eps(const ExpansionBundle& B, double eps) {
  return eps * eps * B.lambda2 + eps * eps * eps * eps * B.lambda4;
}

SpectralField assemble_U_eps(const ExpansionBundle& B, double eps,
                             const LatticeAtlas& target) {
  SpectralField U = zero_field(target);
  accumulate(U, eps, rebase(B.u0, target));
  accumulate(U, eps * eps * eps, rebase(B.u1, target));
  accumulate(U, eps * eps * eps * eps * eps, rebase(B.u2, target));
  U.symmetric = true;
  return U;
}

PreparedState prepare(const ExpansionBundle& B, double epsilon) {
  if (!(epsilon > 0 && epsilon <= 0.5))
    throw std::invalid_argument("prepare: need 0 < eps <= 0.5");
  PreparedState P;
  P.epsilon = epsilon;
  P.host = std::make_shared<LatticeAtlas>(B.q, 15);
  const LatticeAtlas& A = *P.host;
  P.U_eps = assemble_U_eps(B, epsilon, A);
  P.lambda_eps = lambda_eps(B, epsilon);
  SpectralField Usq = multiply(P.U_eps, P.U_eps, A).field;
  SpectralField Ucub = multiply(Usq, P.U_eps, A).field;
  P.f_eps = zero_field(A);
  double e7 = std::pow(epsilon, 7);
  for (int i = 0; i < (int)A.size(); ++i) {
    double d = A.small_divisor(i);
    double r = P.lambda_eps * P.U_eps.get(i) - d * d * P.U_eps.get(i) -
               Ucub.get(i);
    if (r != 0.0) P.f_eps.set(i, -r / e7);
  }
  P.f_eps.symmetric = true;
  return P;
}

double epsilon_from_lambda(const ExpansionBundle& B, double lambda) {
  double disc = B.lambda2 * B.lambda2 + 4.0 * B.lambda4 * lambda;
  if (!(lambda > 0) || !(disc > 0))
    throw std::invalid_argument("epsilon_from_lambda: lambda out of range");
  double eps2 = (-B.lambda2 + std::sqrt(disc)) / (2.0 * B.lambda4);
  return std::sqrt(eps2);
}

}  // namespace qpf
