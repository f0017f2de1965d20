#pragma once
// Galerkin-Newton solver for the truncated steady Swift-Hohenberg equation
//   (1+Delta)^2 U - lambda U + U^3 = 0
// in pi/q-symmetric representative coordinates, plus the contraction map of
// the W-formulation for cross-validation.

#include <memory>

#include "qpf/asymptotics.hpp"
#include "qpf/field.hpp"
#include "qpf/linalg.hpp"

namespace qpf {

using Vec = std::vector<double>;

struct GalerkinSystem {
  std::shared_ptr<const LatticeAtlas> atlas;
  std::vector<int> reps;       // orbit representative site per unknown
  std::vector<double> weight;  // orbit sizes (H0 inner-product weights)
  std::vector<double> diag;    // (1 - |k|^2)^2 per representative, exact norm
  int dof = 0;
};

GalerkinSystem make_system(std::shared_ptr<const LatticeAtlas> atlas);

SpectralField to_field(const GalerkinSystem& sys, const Vec& u);
Vec from_field(const GalerkinSystem& sys, const SpectralField& f);
double h0_norm(const GalerkinSystem& sys, const Vec& u);
double hs_norm(const GalerkinSystem& sys, const Vec& u, double s);

// residual (1-|k|^2)^2 u - lambda u + (u^3)_T per representative; the cube
// is the lossy truncated convolution, lost mass reported via *loss
Vec residual(const GalerkinSystem& sys, const Vec& u, double lambda,
             double* loss = nullptr);

// ((1-|k|^2)^2 - lambda) v + 3 conv(u^2, v), truncated like the residual
Vec jacobian_apply(const GalerkinSystem& sys, const Vec& u, double lambda,
                   const Vec& v);

// dense Jacobian in representative coordinates
Matrix jacobian_matrix(const GalerkinSystem& sys, const Vec& u, double lambda);

struct NewtonConfig {
  double tol = 1e-10;
  int max_iter = 50;
  int max_halvings = 10;
};

struct SolveReport {
  std::vector<std::pair<double, double>> iterates;  // (residual, step) norms
  std::vector<double> conv_loss;                    // truncation loss per step
  bool converged = false;
  double final_residual = 0;
  double epsilon_used = 0;
  double diff_ueps = 0;        // ||u - U_eps||_0 when epsilon_used > 0
  double diff_ueps_scaled = 0; // eps^-4 ||u - U_eps||_0  (= ||W||_0)
  double quad_M = 0;           // step_{n+1} / step_n^2 over the last steps
};

std::pair<Vec, SolveReport> newton_solve(const GalerkinSystem& sys,
                                         double lambda, const Vec& init,
                                         const NewtonConfig& cfg);

// U_eps restricted to the Galerkin window (modes outside the window are
// dropped -- the k_cut presets intentionally cut into the u1/u2 support)
Vec asymptotic_init(const GalerkinSystem& sys, const ExpansionBundle& bundle,
                    double epsilon);

struct FixedPointResult {
  Vec W;
  SolveReport report;
  double g0_norm = 0;  // ||G(eps, 0)||_0 = ||eps^3 Lhat^-1 f_eps||_0
};

// Picard iteration of G(W) = W - Lhat^-1 eps^-4 residual(U_eps + eps^4 W),
// the discrete form of W = -eps^3 L_eps^-1 [f_eps + 3 eps U_eps W^2 + ...];
// Lhat is the chord operator assembled at U_eps and factored once.
FixedPointResult fixed_point_solve(const GalerkinSystem& sys,
                                   const ExpansionBundle& bundle,
                                   double epsilon, const NewtonConfig& cfg);

struct ContinuationPoint {
  double lambda;
  Vec u;
  SolveReport report;
  double branch_norm;  // ||u||_0
};

std::vector<ContinuationPoint> continuation(const GalerkinSystem& sys,
                                            const ExpansionBundle& bundle,
                                            const std::vector<double>& lambda_path,
                                            const NewtonConfig& cfg);

}  // namespace qpf
