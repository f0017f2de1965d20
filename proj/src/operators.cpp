#include "qpf/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace qpf {

namespace {

std::vector<std::pair<double, double>> unit_vectors(int q) {
  std::vector<std::pair<double, double>> u(2 * q);
  for (int j = 0; j < 2 * q; ++j) {
    double a = std::numbers::pi * j / q;
    u[j] = {std::cos(a), std::sin(a)};
  }
  return u;
}

}  // namespace

SplitLabels classify_spectrum(const LatticeAtlas& atlas, double epsilon,
                              double C) {
  SplitLabels L;
  L.atlas = &atlas;
  L.epsilon = epsilon;
  L.C = C;
  L.delta = C * std::sqrt(epsilon);
  L.delta1 = std::sqrt(3.0 * L.delta);
  // the consistency condition 2 delta + delta^2 < delta1^2 reduces
  // to delta < 1, i.e. sqrt(eps) < 1/C
  if (!(2 * L.delta + L.delta * L.delta < L.delta1 * L.delta1))
    throw std::invalid_argument("classify_spectrum: need sqrt(eps) < 1/C");
  int q = atlas.q();
  auto units = unit_vectors(q);
  L.region.resize(atlas.size());
  L.disc.assign(atlas.size(), -1);
  for (int i = 0; i < (int)atlas.size(); ++i) {
    const auto& s = atlas.site(i);
    int jbest = -1;
    double dbest = 1e300;
    for (int j = 0; j < 2 * q; ++j) {
      double d = std::hypot(s.x - units[j].first, s.y - units[j].second);
      if (d < dbest) {
        dbest = d;
        jbest = j;
      }
    }
    // resonance decisions are exact: a site on the unit circle is one of the
    // generators (checked at build time) and always falls in its own disc
    if (atlas.small_divisor_exact(i).is_zero()) dbest = 0.0;
    if (dbest <= L.delta1) {
      L.region[i] = Region::S2;
      L.disc[i] = jbest;
    } else if (std::fabs(atlas.small_divisor(i)) < L.delta) {
      L.region[i] = Region::S1;
    } else {
      L.region[i] = Region::S0;
    }
  }
  return L;
}

Region classify_point(const SplitLabels& L, double x, double y) {
  auto units = unit_vectors(L.atlas->q());
  double dbest = 1e300;
  for (auto& [ux, uy] : units)
    dbest = std::min(dbest, std::hypot(x - ux, y - uy));
  if (dbest <= L.delta1) return Region::S2;
  if (std::fabs(x * x + y * y - 1.0) < L.delta) return Region::S1;
  return Region::S0;
}

std::vector<Violation> check_disjointness(const SplitLabels& L) {
  const LatticeAtlas& A = *L.atlas;
  int q = A.q();
  auto units = unit_vectors(q);
  // distinct nonzero 2-sums and 4-sums of unit vectors
  auto collect = [&](int depth) {
    std::unordered_map<Canon, std::pair<double, double>, CanonHash> out;
    std::vector<std::pair<Canon, std::pair<double, double>>> cur{
        {Canon{}, {0.0, 0.0}}};
    for (int d = 0; d < depth; ++d) {
      std::vector<std::pair<Canon, std::pair<double, double>>> next;
      for (auto& [c, xy] : cur)
        for (int j = 0; j < 2 * q; ++j)
          next.push_back({canon_add(c, A.unit_canon(j)),
                          {xy.first + units[j].first, xy.second + units[j].second}});
      cur = std::move(next);
    }
    for (auto& [c, xy] : cur)
      if (c != Canon{}) out.emplace(c, xy);
    return out;
  };
  auto two = collect(2), four = collect(4);

  std::vector<Violation> v;
  for (int i = 0; i < (int)A.size(); ++i) {
    const auto& s = A.site(i);
    if (L.region[i] == Region::S1) {
      for (auto& [c, xy] : two) {
        double x = s.x + xy.first, y = s.y + xy.second;
        Region r = classify_point(L, x, y);
        if (r == Region::S1) v.push_back({"sigma1+2sum hits sigma1", i, x, y});
        if (r == Region::S2) v.push_back({"sigma1+2sum hits sigma2", i, x, y});
      }
    } else if (L.region[i] == Region::S2) {
      for (auto& [c, xy] : two) {
        double x = s.x + xy.first, y = s.y + xy.second;
        if (classify_point(L, x, y) == Region::S1)
          v.push_back({"sigma2+2sum hits sigma1", i, x, y});
      }
      for (auto& [c, xy] : four) {
        double x = s.x + xy.first, y = s.y + xy.second;
        if (classify_point(L, x, y) == Region::S1)
          v.push_back({"sigma2+4sum hits sigma1", i, x, y});
      }
    }
  }
  return v;
}

SpectralField project(const SpectralField& f, const SplitLabels& L, Region r) {
  if (f.atlas != L.atlas) throw std::invalid_argument("project: atlas mismatch");
  SpectralField out = zero_field(*f.atlas);
  out.symmetric = f.symmetric;
  for (auto& [i, v] : f.coeffs)
    if (L.region[i] == r) out.coeffs.emplace(i, v);
  return out;
}

SpectralField project_disc(const SpectralField& f, const SplitLabels& L, int j) {
  SpectralField out = zero_field(*f.atlas);
  for (auto& [i, v] : f.coeffs)
    if (L.region[i] == Region::S2 && L.disc[i] == j) out.coeffs.emplace(i, v);
  return out;
}

SpectralField apply_P2a(const SpectralField& u, const SplitLabels& L) {
  const LatticeAtlas& A = *u.atlas;
  int q = A.q();
  for (auto& [i, v] : u.coeffs)
    if (L.region[i] != Region::S2)
      throw std::invalid_argument("apply_P2a: input has mass outside sigma2");
  SpectralField out = zero_field(A);
  for (int i = 0; i < (int)A.size(); ++i) {
    if (L.region[i] != Region::S2) continue;
    int m = L.disc[i];
    const Canon& ck = A.site(i).canon;
    double acc = u.get(i);
    // u^(k - 2 k_m)
    Canon c = canon_sub(ck, canon_add(A.unit_canon(m), A.unit_canon(m)));
    if (int t = A.find(c); t >= 0) acc += u.get(t);
    // sum over l != m, m+q of 2 u^(k + k_l - k_m)
    for (int l = 0; l < 2 * q; ++l) {
      if (l == m || l == (m + q) % (2 * q)) continue;
      Canon cl = canon_add(canon_sub(ck, A.unit_canon(m)), A.unit_canon(l));
      if (int t = A.find(cl); t >= 0) acc += 2.0 * u.get(t);
    }
    if (acc != 0.0) out.set(i, 3.0 * acc);
  }
  return out;
}

std::vector<SectorPoint> sector_grid(int q, double delta1, int count) {
  int nr = std::max(1, (int)std::lround(std::sqrt((double)count)));
  int na = std::max(1, count / nr);
  std::vector<SectorPoint> pts;
  pts.reserve((size_t)nr * na);
  double half = std::numbers::pi / (2 * q);
  for (int i = 0; i < nr; ++i) {
    double r = delta1 * (i + 1) / nr;
    for (int j = 0; j < na; ++j) {
      double th = -half + (j + 0.5) * (2 * half) / na;
      pts.push_back({r * std::cos(th), r * std::sin(th)});
    }
  }
  return pts;
}

Matrix lambda1_matrix(int q) {
  // rows follow the apply_P2a formula: the identity term hits j = r, the
  // U^(k - 2 k_r) term hits j = r + q, every other generator couples with 2
  Matrix M(2 * q, 2 * q);
  for (int r = 0; r < 2 * q; ++r) {
    M(r, r) += 3.0;
    M(r, (r + q) % (2 * q)) += 3.0;
    for (int l = 0; l < 2 * q; ++l)
      if (l != r && l != (r + q) % (2 * q)) M(r, l) += 6.0;
  }
  return M;
}

BlockMatrix assemble_block(int q, const SectorPoint& kp, double epsilon) {
  BlockMatrix B;
  B.q = q;
  B.kprime = kp;
  B.epsilon = epsilon;
  auto units = unit_vectors(q);
  double n2 = kp.x * kp.x + kp.y * kp.y;
  B.beta.resize(2 * q);
  for (int j = 0; j < 2 * q; ++j) {
    double t = 2.0 * (units[j].first * kp.x + units[j].second * kp.y) + n2;
    B.beta[j] = t * t;
  }
  B.mat = lambda1_matrix(q);
  for (auto& v : B.mat.a) v *= epsilon * epsilon;
  for (int j = 0; j < 2 * q; ++j) B.mat(j, j) += B.beta[j];
  return B;
}

std::vector<double> block_eigenvalues(const BlockMatrix& block) {
  return jacobi_eigenvalues(block.mat);
}

std::vector<double> charpoly_eigenvalues(const Matrix& A) {
  // inertia bisection: count of eigenvalues below t via the pivots of the
  // symmetric elimination of A - tI (Sylvester's law); independent of Jacobi
  int n = A.n;
  auto count_below = [&](double t) {
    Matrix M = A;
    for (int i = 0; i < n; ++i) M(i, i) -= t;
    int neg = 0;
    for (int k = 0; k < n; ++k) {
      double piv = M(k, k);
      if (piv == 0.0) piv = 1e-300;
      if (piv < 0) ++neg;
      for (int i = k + 1; i < n; ++i) {
        double f = M(i, k) / piv;
        for (int j = k; j < n; ++j) M(i, j) -= f * M(k, j);
      }
    }
    return neg;
  };
  double r = 0;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += std::fabs(A(i, j));
    r = std::max(r, s);
  }
  std::vector<double> ev(n);
  for (int m = 1; m <= n; ++m) {
    double lo = -r, hi = r;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      if (count_below(mid) >= m)
        hi = mid;
      else
        lo = mid;
    }
    ev[m - 1] = 0.5 * (lo + hi);
  }
  return ev;
}

namespace {

// U_eps^2 as a canon-keyed lookup table (exact support N <= 10)
std::unordered_map<Canon, double, CanonHash> ueps_squared(
    int q, double epsilon, const ExpansionBundle& bundle) {
  LatticeAtlas host(q, 10);
  SpectralField U = assemble_U_eps(bundle, epsilon, host);
  SpectralField Usq = multiply(U, U, host).field;
  std::unordered_map<Canon, double, CanonHash> table;
  table.reserve(Usq.nnz() * 2);
  for (auto& [i, v] : Usq.coeffs) table.emplace(host.site(i).canon, v);
  return table;
}

}  // namespace

Matrix assemble_L_eps(const LatticeAtlas& atlas, double epsilon,
                      const ExpansionBundle& bundle) {
  auto Usq = ueps_squared(atlas.q(), epsilon, bundle);
  double lam = lambda_eps(bundle, epsilon);
  int n = (int)atlas.size();
  if ((size_t)n * n > 400'000'000ull)
    throw std::runtime_error("assemble_L_eps: atlas too large for dense assembly");
  Matrix M(n, n);
  for (int i = 0; i < n; ++i) {
    const Canon& ci = atlas.site(i).canon;
    double d = atlas.small_divisor(i);
    M(i, i) = d * d - lam;
    for (int j = 0; j < n; ++j) {
      auto it = Usq.find(canon_sub(ci, atlas.site(j).canon));
      if (it != Usq.end()) M(i, j) += 3.0 * it->second;
    }
  }
  return M;
}

Matrix assemble_L_eps_symmetric(const LatticeAtlas& atlas, double epsilon,
                                const ExpansionBundle& bundle) {
  auto Usq = ueps_squared(atlas.q(), epsilon, bundle);
  double lam = lambda_eps(bundle, epsilon);
  const auto& orbits = atlas.orbits();
  int no = (int)orbits.size();
  Matrix R(no, no);
  for (int o = 0; o < no; ++o) {
    int rep = orbits[o][0];
    const Canon& cr = atlas.site(rep).canon;
    double d = atlas.small_divisor(rep);
    for (int p = 0; p < no; ++p) {
      double s = 0;
      for (int t : orbits[p]) {
        auto it = Usq.find(canon_sub(cr, atlas.site(t).canon));
        if (it != Usq.end()) s += 3.0 * it->second;
      }
      if (o == p) s += d * d - lam;
      R(o, p) = s * std::sqrt((double)orbits[o].size() / orbits[p].size());
    }
  }
  // symmetric up to roundoff by construction; enforce it exactly
  for (int o = 0; o < no; ++o)
    for (int p = o + 1; p < no; ++p) {
      double v = 0.5 * (R(o, p) + R(p, o));
      R(o, p) = R(p, o) = v;
    }
  return R;
}

std::vector<InverseBoundRow> inverse_bound_sweep(
    const LatticeAtlas& atlas, const ExpansionBundle& bundle,
    const std::vector<double>& eps_list) {
  std::vector<InverseBoundRow> rows;
  for (double eps : eps_list) {
    Matrix R = assemble_L_eps_symmetric(atlas, eps, bundle);
    double mu = std::fabs(smallest_abs_eigenvalue(R));
    rows.push_back({eps, mu, mu / (eps * eps)});
  }
  return rows;
}

SchurReduction schur_reduce(const LatticeAtlas& atlas, const SplitLabels& labels,
                            double epsilon, const ExpansionBundle& bundle,
                            const SpectralField& f) {
  SchurReduction S;
  for (int i = 0; i < (int)atlas.size(); ++i) {
    switch (labels.region[i]) {
      case Region::S0: S.idx0.push_back(i); break;
      case Region::S1: S.idx1.push_back(i); break;
      case Region::S2: S.idx2.push_back(i); break;
    }
  }
  Matrix M = assemble_L_eps(atlas, epsilon, bundle);
  std::vector<int> idx01 = S.idx0;
  idx01.insert(idx01.end(), S.idx1.begin(), S.idx1.end());
  int n01 = (int)idx01.size(), n2 = (int)S.idx2.size();
  Matrix K(n01, n01);
  for (int a = 0; a < n01; ++a)
    for (int b = 0; b < n01; ++b) K(a, b) = M(idx01[a], idx01[b]);
  std::vector<int> perm;
  if (!lu_factor(K, perm))
    throw std::runtime_error("schur_reduce: singular E0/E1 block (mislabeled sites?)");

  S.X = Matrix(n01, n2);
  std::vector<double> col(n01);
  for (int c = 0; c < n2; ++c) {
    for (int a = 0; a < n01; ++a) col[a] = -M(idx01[a], S.idx2[c]);
    lu_solve(K, perm, col);
    for (int a = 0; a < n01; ++a) S.X(a, c) = col[a];
  }
  S.rhs01.resize(n01);
  for (int a = 0; a < n01; ++a) S.rhs01[a] = f.get(idx01[a]);
  lu_solve(K, perm, S.rhs01);
  return S;
}

}  // namespace qpf
