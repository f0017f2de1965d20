#include "qpf/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qpf {

GalerkinSystem make_system(std::shared_ptr<const LatticeAtlas> atlas) {
  GalerkinSystem sys;
  sys.atlas = std::move(atlas);
  const auto& orbits = sys.atlas->orbits();
  sys.dof = (int)orbits.size();
  sys.reps.reserve(sys.dof);
  for (auto& o : orbits) {
    sys.reps.push_back(o[0]);
    sys.weight.push_back((double)o.size());
  }
  sys.diag.resize(sys.dof);
  for (int p = 0; p < sys.dof; ++p) {
    double d = sys.atlas->small_divisor(sys.reps[p]);
    if (sys.atlas->small_divisor_exact(sys.reps[p]).is_zero())
      sys.diag[p] = 0.0;  // exactly on the unit circle
    else
      sys.diag[p] = d * d;
  }
  return sys;
}

SpectralField to_field(const GalerkinSystem& sys, const Vec& u) {
  SpectralField f = zero_field(*sys.atlas);
  f.symmetric = true;
  const auto& orbits = sys.atlas->orbits();
  for (int p = 0; p < sys.dof; ++p) {
    if (u[p] == 0.0) continue;
    for (int t : orbits[p]) f.coeffs.emplace(t, u[p]);
  }
  return f;
}

Vec from_field(const GalerkinSystem& sys, const SpectralField& f) {
  Vec u(sys.dof, 0.0);
  for (int p = 0; p < sys.dof; ++p) u[p] = f.get(sys.reps[p]);
  return u;
}

double h0_norm(const GalerkinSystem& sys, const Vec& u) {
  double s = 0;
  for (int p = 0; p < sys.dof; ++p) s += sys.weight[p] * u[p] * u[p];
  return std::sqrt(s);
}

double hs_norm(const GalerkinSystem& sys, const Vec& u, double s) {
  double acc = 0;
  for (int p = 0; p < sys.dof; ++p) {
    double n = (double)sys.atlas->site(sys.reps[p]).n;
    acc += sys.weight[p] * std::pow(1 + n * n, s) * u[p] * u[p];
  }
  return std::sqrt(acc);
}

Vec residual(const GalerkinSystem& sys, const Vec& u, double lambda,
             double* loss) {
  SpectralField uf = to_field(sys, u);
  auto sq = multiply(uf, uf, *sys.atlas, TruncationPolicy::FastReport);
  auto cube = multiply(sq.field, uf, *sys.atlas, TruncationPolicy::FastReport);
  if (loss) *loss = sq.loss_norm + cube.loss_norm;
  Vec r(sys.dof);
  for (int p = 0; p < sys.dof; ++p)
    r[p] = (sys.diag[p] - lambda) * u[p] + cube.field.get(sys.reps[p]);
  return r;
}

// The cube in the residual is the nested truncation P(P(u^2) u), so its
// exact derivative is v -> P(S v) + 2 P(P(u v) u) with S = P(u^2).  Using
// 3 conv(S, v) instead leaves an O(eps^2) window-boundary defect that ruins
// the quadratic Newton step and the chord contraction rate.
Vec jacobian_apply(const GalerkinSystem& sys, const Vec& u, double lambda,
                   const Vec& v) {
  SpectralField uf = to_field(sys, u), vf = to_field(sys, v);
  auto sq = multiply(uf, uf, *sys.atlas, TruncationPolicy::FastReport);
  auto t1 = multiply(sq.field, vf, *sys.atlas, TruncationPolicy::FastReport);
  auto uv = multiply(uf, vf, *sys.atlas, TruncationPolicy::FastReport);
  auto t2 = multiply(uv.field, uf, *sys.atlas, TruncationPolicy::FastReport);
  Vec r(sys.dof);
  for (int p = 0; p < sys.dof; ++p)
    r[p] = (sys.diag[p] - lambda) * v[p] + t1.field.get(sys.reps[p]) +
           2.0 * t2.field.get(sys.reps[p]);
  return r;
}

Matrix jacobian_matrix(const GalerkinSystem& sys, const Vec& u, double lambda) {
  const LatticeAtlas& A = *sys.atlas;
  SpectralField uf = to_field(sys, u);
  auto sq = multiply(uf, uf, A, TruncationPolicy::FastReport);
  std::unordered_map<Canon, double, CanonHash> Usq, Um;
  Usq.reserve(sq.field.nnz() * 2);
  for (auto& [i, v] : sq.field.coeffs) Usq.emplace(A.site(i).canon, v);
  Um.reserve(uf.nnz() * 2);
  for (auto& [i, v] : uf.coeffs) Um.emplace(A.site(i).canon, v);

  const auto& orbits = A.orbits();
  int n = (int)A.size();
  // g[m][r] = sum over the orbit r of u^(c_m - c_t): the inner convolution
  // of the 2 P(P(u v) u) term, tabulated once per site
  std::vector<double> g((size_t)n * sys.dof, 0.0);
  for (int m = 0; m < n; ++m) {
    const Canon& cm = A.site(m).canon;
    double* row = &g[(size_t)m * sys.dof];
    for (int r = 0; r < sys.dof; ++r)
      for (int t : orbits[r]) {
        auto it = Um.find(canon_sub(cm, A.site(t).canon));
        if (it != Um.end()) row[r] += it->second;
      }
  }

  Matrix J(sys.dof, sys.dof);
  for (int p = 0; p < sys.dof; ++p) {
    const Canon& cp = A.site(sys.reps[p]).canon;
    double* jrow = &J(p, 0);
    for (int r = 0; r < sys.dof; ++r) {
      double s = 0;
      for (int t : orbits[r]) {
        auto it = Usq.find(canon_sub(cp, A.site(t).canon));
        if (it != Usq.end()) s += it->second;
      }
      jrow[r] = s;
    }
    for (int m = 0; m < n; ++m) {
      auto it = Um.find(canon_sub(cp, A.site(m).canon));
      if (it == Um.end()) continue;
      double a = 2.0 * it->second;
      const double* grow = &g[(size_t)m * sys.dof];
      for (int r = 0; r < sys.dof; ++r) jrow[r] += a * grow[r];
    }
    jrow[p] += sys.diag[p] - lambda;
  }
  return J;
}

std::pair<Vec, SolveReport> newton_solve(const GalerkinSystem& sys,
                                         double lambda, const Vec& init,
                                         const NewtonConfig& cfg) {
  Vec u = init;
  SolveReport rep;
  double loss = 0;
  Vec r = residual(sys, u, lambda, &loss);
  double rn = h0_norm(sys, r);
  std::vector<double> undamped_steps;
  for (int it = 0; it < cfg.max_iter; ++it) {
    rep.conv_loss.push_back(loss);
    if (rn <= cfg.tol) {
      rep.converged = true;
      break;
    }
    Matrix J = jacobian_matrix(sys, u, lambda);
    std::vector<int> perm;
    if (!lu_factor(J, perm))
      throw std::runtime_error("newton_solve: singular Jacobian");
    Vec step = r;
    lu_solve(J, perm, step);
    for (auto& x : step) x = -x;

    double t = 1.0;
    Vec u_try(sys.dof);
    Vec r_try;
    double rn_try = 0;
    int halvings = 0;
    for (;; ++halvings) {
      for (int p = 0; p < sys.dof; ++p) u_try[p] = u[p] + t * step[p];
      r_try = residual(sys, u_try, lambda, &loss);
      rn_try = h0_norm(sys, r_try);
      if (rn_try < rn || halvings >= cfg.max_halvings) break;
      t *= 0.5;
    }
    double sn = t * h0_norm(sys, step);
    rep.iterates.push_back({rn, sn});
    if (t == 1.0) undamped_steps.push_back(sn);
    u = std::move(u_try);
    r = std::move(r_try);
    rn = rn_try;
  }
  rep.final_residual = rn;
  if (rn <= cfg.tol) rep.converged = true;
  // quadratic-convergence constant over the last undamped steps
  size_t m = undamped_steps.size();
  for (size_t i = (m > 3 ? m - 3 : 1); i < m; ++i) {
    double prev = undamped_steps[i - 1], cur = undamped_steps[i];
    if (prev > 0) rep.quad_M = std::max(rep.quad_M, cur / (prev * prev));
  }
  return {u, rep};
}

Vec asymptotic_init(const GalerkinSystem& sys, const ExpansionBundle& bundle,
                    double epsilon) {
  const LatticeAtlas& A = *sys.atlas;
  Vec u(sys.dof, 0.0);
  // modes outside the Galerkin window are dropped (k_cut presets cut into
  // the u1/u2 support); coefficients are orbit-constant, so read per rep
  auto add_rep = [&](double c, const SpectralField& f) {
    for (int p = 0; p < sys.dof; ++p) {
      int t = bundle.host->find(A.site(sys.reps[p]).canon);
      if (t >= 0) u[p] += c * f.get(t);
    }
  };
  add_rep(epsilon, bundle.u0);
  add_rep(epsilon * epsilon * epsilon, bundle.u1);
  add_rep(std::pow(epsilon, 5), bundle.u2);
  return u;
}

FixedPointResult fixed_point_solve(const GalerkinSystem& sys,
                                   const ExpansionBundle& bundle,
                                   double epsilon, const NewtonConfig& cfg) {
  FixedPointResult out;
  double lam = lambda_eps(bundle, epsilon);
  Vec Ue = asymptotic_init(sys, bundle, epsilon);
  double e4 = std::pow(epsilon, 4);

  Matrix Lhat = jacobian_matrix(sys, Ue, lam);  // chord operator at U_eps
  std::vector<int> perm;
  if (!lu_factor(Lhat, perm))
    throw std::runtime_error("fixed_point_solve: truncated L_eps factorization failed");

  // G(0) = -eps^3 Lhat^-1 f_eps with f_eps = residual(U_eps)/eps^7
  Vec f = residual(sys, Ue, lam);
  Vec g0 = f;
  lu_solve(Lhat, perm, g0);
  for (auto& x : g0) x /= e4;  // eps^-4 * residual solve = eps^3 * (f/eps^7)
  out.g0_norm = h0_norm(sys, g0);

  Vec W(sys.dof, 0.0);
  Vec U(sys.dof);
  SolveReport& rep = out.report;
  rep.epsilon_used = epsilon;
  auto eval = [&](const Vec& w, double* loss) {
    for (int p = 0; p < sys.dof; ++p) U[p] = Ue[p] + e4 * w[p];
    return residual(sys, U, lam, loss);
  };
  double loss = 0;
  Vec r = eval(W, &loss);
  double rn = h0_norm(sys, r);
  for (int it = 0; it < cfg.max_iter; ++it) {
    rep.conv_loss.push_back(loss);
    rep.final_residual = rn;
    if (rn <= cfg.tol) {
      rep.converged = true;
      break;
    }
    Vec s = r;
    lu_solve(Lhat, perm, s);
    // damped chord step: outside the contraction ball (large eps) the full
    // Picard update can overshoot; halve until the residual drops
    double t = 1.0;
    Vec w_try(sys.dof), r_try;
    double rn_try = 0;
    int halvings = 0;
    for (;; ++halvings) {
      for (int p = 0; p < sys.dof; ++p) w_try[p] = W[p] - t * s[p] / e4;
      r_try = eval(w_try, &loss);
      rn_try = h0_norm(sys, r_try);
      if (rn_try < rn || halvings >= cfg.max_halvings) break;
      t *= 0.5;
    }
    if (rn_try >= rn) break;  // stalled; report converged = false
    double sn = 0;
    for (int p = 0; p < sys.dof; ++p) {
      double d = t * s[p] / e4;
      sn += sys.weight[p] * d * d;
    }
    rep.iterates.push_back({rn, std::sqrt(sn)});
    W = std::move(w_try);
    r = std::move(r_try);
    rn = rn_try;
    rep.final_residual = rn;
  }
  if (rn <= cfg.tol) rep.converged = true;
  out.W = W;
  rep.diff_ueps_scaled = h0_norm(sys, W);
  rep.diff_ueps = e4 * rep.diff_ueps_scaled;
  return out;
}

std::vector<ContinuationPoint> continuation(const GalerkinSystem& sys,
                                            const ExpansionBundle& bundle,
                                            const std::vector<double>& lambda_path,
                                            const NewtonConfig& cfg) {
  std::vector<ContinuationPoint> out;
  Vec u;
  for (double lam : lambda_path) {
    if (out.empty()) {
      double eps = epsilon_from_lambda(bundle, lam);
      u = asymptotic_init(sys, bundle, eps);
    }
    auto [sol, rep] = newton_solve(sys, lam, u, cfg);
    if (!rep.converged)
      throw std::runtime_error("continuation: solve failed at lambda = " +
                               std::to_string(lam));
    u = sol;
    out.push_back({lam, sol, rep, h0_norm(sys, sol)});
  }
  return out;
}

}  // namespace qpf
