#pragma once
// Formal expansion of the quasipattern branch:
//   U_eps = eps u0 + eps^3 u1 + eps^5 u2,  lambda_eps = eps^2 l2 + eps^4 l4.

#include <memory>

#include "qpf/field.hpp"

namespace qpf {

struct ExpansionBundle {
  int q = 0;
  std::shared_ptr<const LatticeAtlas> host;  // full atlas, n_max = 6
  SpectralField u0, u1, u2;
  double lambda2 = 0, lambda4 = 0;
  SpectralField a_field, b_field;
  double a0 = 0, b0 = 0;  // means (coefficients at k = 0)
};

struct PreparedState {
  double epsilon = 0;
  std::shared_ptr<const LatticeAtlas> host;  // full atlas, n_max = 15
  SpectralField U_eps;
  double lambda_eps = 0;
  SpectralField f_eps;  // -(1/eps^7) * [lambda_eps U - (1+D)^2 U - U^3]
};

SpectralField base_pattern(const LatticeAtlas& host);
double lambda_2(int q);

// Computes u0..u2, lambda2/4, a, b; u1 is built two independent ways
// (ordered-triple counting vs convolution solvability) and cross-checked.
ExpansionBundle expand_bundle(int q);

double lambda_4(int q);  // convenience wrapper over expand_bundle

PreparedState prepare(const ExpansionBundle& bundle, double epsilon);

// Solve lambda = eps^2 l2 + eps^4 l4 for the root with eps^2 near lambda/l2.
double epsilon_from_lambda(const ExpansionBundle& bundle, double lambda);

// U_eps and lambda_eps assembled on an arbitrary atlas containing the
// expansion support (used by the solver presets).
SpectralField assemble_U_eps(const ExpansionBundle& bundle, double epsilon,
                             const LatticeAtlas& target);
double lambda_eps(const ExpansionBundle& bundle, double epsilon);

}  // namespace qpf
