#include "qpf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpf {

Canon LatticeAtlas::canon_of_word(const std::vector<int>& w) const {
  // polynomial sum w[j] x^j in zeta, reduced mod Phi_{2q}
  std::vector<long long> p(std::max((size_t)deg_ + 1, w.size()), 0);
  for (size_t j = 0; j < w.size(); ++j) p[j] = w[j];
  for (int d = (int)p.size() - 1; d >= deg_; --d) {
    long long f = p[d];
    if (f == 0) continue;
    p[d] = 0;
    for (int i = 0; i < deg_; ++i) p[d - deg_ + i] -= f * phi2q_[i];
  }
  Canon c{};
  for (int i = 0; i < deg_; ++i) c[i] = (int32_t)p[i];
  return c;
}

Canon LatticeAtlas::rotate_canon(const Canon& c, int steps) const {
  steps = ((steps % (2 * q_)) + 2 * q_) % (2 * q_);
  Canon r = c;
  for (int s = 0; s < steps; ++s) {
    // multiply by zeta: shift, reduce the single overflowing power
    long long top = r[deg_ - 1];
    for (int i = deg_ - 1; i >= 1; --i) r[i] = r[i - 1];
    r[0] = 0;
    if (top != 0)
      for (int i = 0; i < deg_; ++i) r[i] -= (int32_t)(top * phi2q_[i]);
  }
  return r;
}

LatticeAtlas::LatticeAtlas(int q, int n_max, std::optional<double> k_cut,
                           size_t capacity)
    : q_(q), n_max_(n_max), k_cut_(k_cut), ring_(q) {
  if (q < 4) throw std::invalid_argument("atlas: q >= 4 required");
  if (n_max < 1) throw std::invalid_argument("atlas: n_max >= 1 required");
  phi2q_ = cyclotomic(2 * q);
  deg_ = (int)phi2q_.size() - 1;
  if (deg_ > kCanonSlots)
    throw std::invalid_argument("atlas: phi(2q) exceeds canonical key width");

  std::vector<double> cx(q), cy(q);
  for (int j = 0; j < q; ++j) {
    cx[j] = std::cos(std::numbers::pi * j / q);
    cy[j] = std::sin(std::numbers::pi * j / q);
  }
  // With a radius cut we still need BFS layers to equal the true N_k, so the
  // search runs in a slightly larger window (any minimal word can be ordered
  // to keep partial sums within |k| + slack of the target) and prunes after.
  double bfs_limit = k_cut ? *k_cut + 3.0 : 1e30;

  auto push = [&](std::vector<int>&& w, int layer) {
    LatticeSite s;
    s.word = std::move(w);
    s.canon = canon_of_word(s.word);
    if (index_.count(s.canon)) return false;
    double X = 0, Y = 0;
    for (int j = 0; j < q; ++j) {
      X += s.word[j] * cx[j];
      Y += s.word[j] * cy[j];
    }
    if (std::hypot(X, Y) > bfs_limit) return false;
    s.x = X;
    s.y = Y;
    s.n = layer;
    s.norm2x2 = ring_.norm2_doubled(s.word);
    index_.emplace(s.canon, (int)sites_.size());
    sites_.push_back(std::move(s));
    if (sites_.size() > capacity)
      throw std::runtime_error("atlas: site capacity exceeded");
    return true;
  };

  push(std::vector<int>(q, 0), 0);
  std::vector<int> frontier{0};
  for (int layer = 1; layer <= n_max; ++layer) {
    std::vector<int> next;
    for (int fi : frontier) {
      for (int j = 0; j < q; ++j) {
        for (int sg : {1, -1}) {
          std::vector<int> w = sites_[fi].word;
          w[j] += sg;
          if (push(std::move(w), layer)) next.push_back((int)sites_.size() - 1);
        }
      }
    }
    frontier = std::move(next);
  }

  if (k_cut) {
    double lim = (*k_cut) * (*k_cut);
    lim += 1e-6 * (1.0 + lim);  // keep boundary shells like |k|^2 = 5 at sqrt(5)
    std::vector<LatticeSite> kept;
    for (auto& s : sites_)
      if (0.5 * ring_.value(s.norm2x2) <= lim) kept.push_back(std::move(s));
    sites_ = std::move(kept);
  }

  std::sort(sites_.begin(), sites_.end(),
            [](const LatticeSite& a, const LatticeSite& b) {
              if (a.n != b.n) return a.n < b.n;
              return a.canon < b.canon;
            });
  index_.clear();
  for (int i = 0; i < (int)sites_.size(); ++i) index_.emplace(sites_[i].canon, i);

  origin_ = find(Canon{});
  units_.resize(2 * q);
  unit_canon_.resize(2 * q);
  for (int j = 0; j < 2 * q; ++j) {
    std::vector<int> w(q, 0);
    w[j % q] = (j < q) ? 1 : -1;
    unit_canon_[j] = canon_of_word(w);
    units_[j] = find(unit_canon_[j]);
  }

  orbit_of_.assign(sites_.size(), -1);
  for (int i = 0; i < (int)sites_.size(); ++i) {
    if (orbit_of_[i] >= 0) continue;
    std::vector<int> members;
    Canon c = sites_[i].canon;
    for (int s = 0; s < 2 * q; ++s) {
      int t = find(c);
      if (t >= 0 && orbit_of_[t] < 0) {
        orbit_of_[t] = (int)orbits_.size();
        members.push_back(t);
      }
      c = rotate_canon(c);
    }
    std::sort(members.begin(), members.end());
    orbits_.push_back(std::move(members));
  }
}

RingElement LatticeAtlas::small_divisor_exact(int i) const {
  RingElement d = ring_.sub(sites_[i].norm2x2, ring_.from_int(2));
  d.log2_den = 1;  // (2|k|^2 - 2)/2
  return d;
}

double LatticeAtlas::small_divisor(int i) const {
  return ring_.value(small_divisor_exact(i));
}

std::vector<size_t> LatticeAtlas::shell_census() const {
  std::vector<size_t> c(n_max_ + 1, 0);
  for (auto& s : sites_) ++c[s.n];
  return c;
}

double LatticeAtlas::census_c1() const {
  auto c = shell_census();
  double c1 = 0;
  for (int n = 1; n <= n_max_; ++n)
    c1 = std::max(c1, (double)c[n] / std::pow((double)n, q_ - 1));
  return c1;
}

std::vector<int> LatticeAtlas::unit_circle_sites() const {
  std::vector<int> out;
  for (int i = 0; i < (int)sites_.size(); ++i)
    if (small_divisor_exact(i).is_zero()) out.push_back(i);
  return out;
}

int rotate_site(const LatticeAtlas& atlas, int site, int steps) {
  Canon c = atlas.rotate_canon(atlas.site(site).canon, steps);
  int t = atlas.find(c);
  if (t < 0)
    throw std::runtime_error("rotate_site: image outside the truncation window");
  return t;
}

DivisorSpectrum divisor_spectrum(const LatticeAtlas& atlas) {
  if (atlas.n_max() < 4)
    throw std::invalid_argument("divisor_spectrum: n_max >= 4 required");
  DivisorSpectrum out;
  std::vector<double> best(atlas.n_max() + 1, 1e300);
  std::vector<int> arg(atlas.n_max() + 1, -1);
  for (int i = 0; i < (int)atlas.size(); ++i) {
    const auto& s = atlas.site(i);
    if (s.n == 0) continue;
    if (atlas.small_divisor_exact(i).is_zero()) continue;  // unit vectors
    double v = std::fabs(atlas.small_divisor(i));
    if (v < best[s.n]) {
      best[s.n] = v;
      arg[s.n] = i;
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  int two_l0 = 2 * (atlas.ring().degree() - 1);
  double c_best = 1e300;
  for (int n = 1; n <= atlas.n_max(); ++n) {
    if (arg[n] < 0) continue;  // empty shell
    out.rows.push_back({n, best[n], atlas.site(arg[n]).canon});
    double lx = std::log((double)n), ly = std::log(best[n]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
    c_best = std::min(c_best, best[n] * std::pow((double)n, two_l0));
  }
  out.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.fitted_c = c_best;
  return out;
}

std::vector<std::array<int, 4>> resonant_quadruples(int q) {
  LatticeAtlas unit(q, 1);
  std::vector<std::array<int, 4>> out;
  for (int j = 1; j <= 2 * q; ++j)
    for (int l = j; l <= 2 * q; ++l)
      for (int r = l; r <= 2 * q; ++r)
        for (int s = r; s <= 2 * q; ++s) {
          Canon c = canon_add(canon_add(unit.unit_canon(j - 1), unit.unit_canon(l - 1)),
                              canon_add(unit.unit_canon(r - 1), unit.unit_canon(s - 1)));
          if (c == Canon{}) out.push_back({j, l, r, s});
        }
  return out;
}

}  // namespace qpf
