// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Heavier sweeps (n_max = 40 atlas, the figure-scale solve) run here rather
// than in the unit suites; budget is a few minutes on a laptop.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>

#include "qpf/io.hpp"
#include "qpf/operators.hpp"
#include "qpf/solver.hpp"

using namespace qpf;

namespace {

int g_failures = 0;

template <class F>
void criterion(int id, const char* title, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    detail = body();
    ok = true;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", id,
              title, detail.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

struct check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw check_failure(msg);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

}  // namespace

int main() {
  criterion(1, "lambda2 exact for q = 4, 5, 6", [] {
    for (int q : {4, 5, 6}) {
      auto B = expand_bundle(q);  // internally cross-checks the u0^3 route
      require(B.lambda2 == 3.0 * (2 * q - 1),
              "lambda2 mismatch at q=" + std::to_string(q));
    }
    return std::string("21 / 27 / 33, zero tolerance");
  });

  criterion(2, "u1 coefficients (alpha at 3k_j, all negative, q=4..8)", [] {
    double worst = 0;
    for (int q = 4; q <= 8; ++q) {
      auto B = expand_bundle(q);
      Canon u = B.host->unit_canon(0);
      int i3 = B.host->find(canon_add(canon_add(u, u), u));
      require(i3 >= 0, "3 k_1 missing from host atlas");
      double err = std::fabs(B.u1.get(i3) + 1.0 / 64.0);
      worst = std::max(worst, err);
      require(err <= 1e-15, fmt("alpha(3k_1) off by %.2e", err));
      for (auto& [i, v] : B.u1.coeffs)
        require(v < 0, "nonnegative u1 coefficient at q=" + std::to_string(q));
    }
    return fmt("max |alpha + 1/64| = %.2e", worst);
  });

  criterion(3, "lambda4 < 0, b0 = -lambda4, pinned values q=4..8", [] {
    const double pinned[5] = {-259.921875, -707.44687499999998, -2320.921875,
                              -2970.046875, -5173.921875};
    for (int q = 4; q <= 8; ++q) {
      auto B = expand_bundle(q);
      require(B.lambda4 < 0, "lambda4 not negative");
      require(B.b0 == -B.lambda4, "b0 != -lambda4");
      double rel = std::fabs(B.lambda4 - pinned[q - 4]) / std::fabs(pinned[q - 4]);
      require(rel <= 1e-9, fmt("lambda4 drifted, rel %.2e at q=%g", rel, q));
    }
    return std::string("fixture match, rel tol 1e-9");
  });

  criterion(4, "residual of U_eps is O(eps^7)", [] {
    auto B = expand_bundle(4);
    auto Pa = prepare(B, 0.04);
    auto Pb = prepare(B, 0.02);
    double ra = std::pow(0.04, 7) * hs_norm(Pa.f_eps, 0);
    double rb = std::pow(0.02, 7) * hs_norm(Pb.f_eps, 0);
    double ratio = ra / rb;
    require(ratio >= 100 && ratio <= 160, fmt("ratio %.3f outside [100,160]", ratio));
    return fmt("r(0.04)/r(0.02) = %.3f (theory 128)", ratio);
  });

  criterion(5, "lattice: N1 sampled, N2 exhaustive, census bound (q=4, n=20)", [] {
    LatticeAtlas A(4, 20);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> pick(0, (int)A.size() - 1);
    size_t tested = 0;
    for (size_t t = 0; t < 100000; ++t) {
      int i = pick(rng), j = pick(rng);
      int s = A.find(canon_add(A.site(i).canon, A.site(j).canon));
      if (s < 0) continue;  // sum left the window; N1 untestable there
      require(A.site(s).n <= A.site(i).n + A.site(j).n, "N1 violated");
      ++tested;
    }
    for (int i = 0; i < (int)A.size(); ++i) {
      int m = A.find(canon_neg(A.site(i).canon));
      require(m >= 0 && A.site(m).n == A.site(i).n, "N2 violated");
    }
    auto census = A.shell_census();
    double c1 = A.census_c1();
    for (int n = 1; n <= 20; ++n)
      require((double)census[n] <= c1 * std::pow((double)n, 3) * (1 + 1e-12),
              "census bound violated at N=" + std::to_string(n));
    return fmt("%.0f in-window pairs, %.0f sites, c1 = %.4f", (double)tested,
               (double)A.size(), c1);
  });

  criterion(6, "small divisors: decay exponent >= -2.5, exact nonzero (n=40)", [] {
    LatticeAtlas A(4, 40);
    auto D = divisor_spectrum(A);
    require(D.fitted_exponent >= -2.5,
            fmt("fitted exponent %.3f < -2.5", D.fitted_exponent));
    for (int i = 0; i < (int)A.size(); ++i)
      if (A.site(i).n > 0 && A.small_divisor_exact(i).is_zero())
        require(A.norm2(i) == 1.0, "zero divisor off the unit circle");
    require(D.fitted_c > 0, "fitted c not positive");
    return fmt("%.0f sites, exponent %.3f, c = %.3e", (double)A.size(),
               D.fitted_exponent, D.fitted_c);
  });

  criterion(7, "projection identities P1(aU2) = P1(bU2) = 0 (100 fields)", [] {
    auto B = expand_bundle(4);
    LatticeAtlas A(4, 8);
    auto L = classify_spectrum(A, 0.01, 2.0);
    SpectralField a = rebase(B.a_field, A), b = rebase(B.b_field, A);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> val(-1, 1);
    for (int rep = 0; rep < 100; ++rep) {
      SpectralField u2 = zero_field(A);
      for (int i = 0; i < (int)A.size(); ++i)
        if (L.region[i] == Region::S2 && rng() % 2 == 0) u2.set(i, val(rng));
      auto au = multiply(a, u2, A, TruncationPolicy::Report).field;
      auto bu = multiply(b, u2, A, TruncationPolicy::Report).field;
      require(project(au, L, Region::S1).nnz() == 0, "P1(aU2) nonzero");
      require(project(bu, L, Region::S1).nnz() == 0, "P1(bU2) nonzero");
    }
    return std::string("exact zeros on every trial");
  });

  criterion(8, "block spectra: fitted K, min mu >= 2 eps^2, charpoly oracle", [] {
    const double C = 2.0, eps0 = 0.1;
    double delta1 = std::sqrt(3.0 * C * std::sqrt(eps0));
    auto pts = sector_grid(4, delta1, 64);
    require(pts.size() == 64, "sector grid size");
    double K = 0, min_scaled = 1e300;
    for (double e : {0.1, 0.05, 0.025}) {
      for (auto& kp : pts) {
        auto Bk = assemble_block(4, kp, e);
        auto mu = block_eigenvalues(Bk);
        auto beta = Bk.beta;
        std::sort(beta.begin(), beta.end());
        for (int j = 0; j < 8; ++j)
          K = std::max(K, std::fabs(mu[j] - beta[j] - 3 * e * e) / (e * e * e * e));
        min_scaled = std::min(min_scaled, mu.front() / (e * e));
      }
    }
    // eigensolver vs the independent characteristic-polynomial oracle
    double oracle_err = 0;
    for (auto& kp : pts) {
      auto Bk = assemble_block(4, kp, 0.1);
      auto mu = block_eigenvalues(Bk);
      auto mc = charpoly_eigenvalues(Bk.mat);
      for (int j = 0; j < 8; ++j)
        oracle_err = std::max(oracle_err, std::fabs(mu[j] - mc[j]));
    }
    require(oracle_err <= 1e-10, fmt("oracle mismatch %.2e", oracle_err));
    require(min_scaled >= 2.0,
            fmt("min_j mu_j / eps^2 = %.3f < 2 (Lambda1 has a -6 eigenvalue; "
                "fitted K = %.3f, oracle err %.1e)",
                min_scaled, K, oracle_err));
    return fmt("fitted K = %.3f, min mu/eps^2 = %.3f", K, min_scaled);
  });

  criterion(9, "Lambda1 equals the displayed 8x8 matrix", [] {
    Matrix L1 = lambda1_matrix(4);
    for (int r = 0; r < 8; ++r)
      for (int j = 0; j < 8; ++j) {
        double want = (j == r || j == (r + 4) % 8) ? 3.0 : 6.0;
        require(L1(r, j) == want, "Lambda1 entry mismatch");
      }
    return std::string("entrywise exact (3s on j, j+q; 6s elsewhere)");
  });

  criterion(10, "inverse bound: min|eig(L_eps)|/eps^2 stable within x4", [] {
    auto B = expand_bundle(4);
    LatticeAtlas A(4, 10, 2.5);
    auto rows = inverse_bound_sweep(A, B, {0.1, 0.05, 0.025});
    double lo = 1e300, hi = 0;
    for (auto& r : rows) {
      lo = std::min(lo, r.scaled);
      hi = std::max(hi, r.scaled);
    }
    require(hi / lo < 4.0, fmt("scaled spread %.3f >= 4", hi / lo));
    return fmt("scaled min-eig in [%.3f, %.3f], spread %.3f", lo, hi, hi / lo);
  });

  criterion(11, "figure-scale solve: q=4, lambda=0.1, n=27, kcut=sqrt(5)", [] {
    auto B = expand_bundle(4);
    auto A = std::make_shared<LatticeAtlas>(4, 27, std::sqrt(5.0));
    auto sys = make_system(A);
    double eps = epsilon_from_lambda(B, 0.1);
    NewtonConfig cfg{1e-11, 50, 10};
    auto [u, rep] = newton_solve(sys, 0.1, asymptotic_init(sys, B, eps), cfg);
    require(rep.converged, "Newton did not converge");
    require(rep.final_residual <= 1e-10,
            fmt("final residual %.2e > 1e-10", rep.final_residual));
    int uo = A->orbit_of(A->unit_site(0));
    double dev = std::fabs(u[uo] - eps);
    require(dev <= 10 * eps * eps * eps,
            fmt("|u(k1) - eps| = %.2e > 10 eps^3", dev));
    auto img = sample(to_field(sys, u), 30.0, 256);
    write_pgm16("acceptance_fig1.pgm", img, 256);  // human spot check
    std::ostringstream ss;
    ss << A->size() << " sites, residual " << rep.final_residual
       << ", |u(k1)-eps| = " << dev << ", PGM at acceptance_fig1.pgm";
    return ss.str();
  });

  criterion(12, "solver cross-validation and ||W|| = O(eps)", [] {
    auto B = expand_bundle(4);
    auto A = std::make_shared<LatticeAtlas>(4, 9);
    auto sys = make_system(A);
    NewtonConfig cfg{1e-13, 80, 10};
    double eps = 0.05, lam = lambda_eps(B, eps);
    auto fp = fixed_point_solve(sys, B, eps, cfg);
    require(fp.report.converged, "fixed point did not converge");
    auto [un, nrep] = newton_solve(sys, lam, asymptotic_init(sys, B, eps), cfg);
    require(nrep.converged, "Newton did not converge");
    Vec ue = asymptotic_init(sys, B, eps), d(sys.dof);
    double e4 = std::pow(eps, 4);
    for (int p = 0; p < sys.dof; ++p) d[p] = un[p] - (ue[p] + e4 * fp.W[p]);
    double agree = h0_norm(sys, d);
    require(agree <= 1e-9, fmt("solver disagreement %.2e > 1e-9", agree));
    double w1 = fixed_point_solve(sys, B, 0.1, cfg).report.diff_ueps_scaled;
    double w2 = fp.report.diff_ueps_scaled;
    double ratio = w1 / w2;
    require(ratio >= 1.4 && ratio <= 2.8,
            fmt("||W|| ratio %.3f outside [1.4, 2.8]", ratio));
    return fmt("agreement %.2e, ||W|| ratio %.3f (O(eps) ~ 2)", agree, ratio);
  });

  criterion(13, "negative lambda isolates the zero solution", [] {
    auto A = std::make_shared<LatticeAtlas>(4, 6);
    auto sys = make_system(A);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> val(-1, 1);
    Vec u(sys.dof);
    for (auto& x : u) x = val(rng);
    double n = h0_norm(sys, u);
    for (auto& x : u) x *= 0.1 / n;
    NewtonConfig cfg{1e-12, 50, 10};
    auto [sol, rep] = newton_solve(sys, -0.05, u, cfg);
    require(rep.converged, "Newton did not converge");
    double zn = h0_norm(sys, sol);
    require(zn < 1e-10, fmt("limit norm %.2e not zero", zn));
    return fmt("converged to 0, norm %.2e", zn);
  });

  if (g_failures)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures ? 1 : 0;
}
