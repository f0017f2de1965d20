#pragma once
// Quasilattice Gamma generated by the 2q unit vectors k_j = e^{i pi (j-1)/q}.
// Sites are keyed canonically by their coordinates in the power basis of the
// 2q-th cyclotomic field, which is injective for every q (the Z^q word fold
// is not, e.g. q = 6).

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qpf/ring.hpp"

namespace qpf {

// Canonical key: coefficients over {zeta^i, 0 <= i < phi(2q)}, zeta = e^{i pi/q}.
// Fixed-width storage; phi(2q) <= 8 covers q = 4..9 and the CLI surface.
constexpr int kCanonSlots = 8;
using Canon = std::array<int32_t, kCanonSlots>;

struct CanonHash {
  size_t operator()(const Canon& c) const {
    uint64_t h = 1469598103934665603ull;
    for (int32_t v : c) {
      h ^= (uint64_t)(uint32_t)v;
      h *= 1099511628211ull;
    }
    return (size_t)h;
  }
};

inline Canon canon_add(const Canon& a, const Canon& b) {
  Canon r;
  for (int i = 0; i < kCanonSlots; ++i) r[i] = a[i] + b[i];
  return r;
}
inline Canon canon_sub(const Canon& a, const Canon& b) {
  Canon r;
  for (int i = 0; i < kCanonSlots; ++i) r[i] = a[i] - b[i];
  return r;
}
inline Canon canon_neg(const Canon& a) {
  Canon r;
  for (int i = 0; i < kCanonSlots; ++i) r[i] = -a[i];
  return r;
}

struct LatticeSite {
  std::vector<int> word;   // m' over k_1..k_q (k_{j+q} folded to -k_j)
  Canon canon{};           // unique canonical key
  double x = 0, y = 0;     // float embedding
  RingElement norm2x2;     // exact 2|k|^2 in Z[omega]
  int n = 0;               // word length N_k (BFS layer)
};

class LatticeAtlas {
 public:
  // BFS expansion by the 2q unit vectors up to layer n_max; when k_cut is
  // set, BFS runs in the window |k| <= k_cut + slack (so layers still equal
  // the unconstrained N_k) and sites outside |k| <= k_cut are then dropped.
  LatticeAtlas(int q, int n_max, std::optional<double> k_cut = std::nullopt,
               size_t capacity = 5'000'000);

  int q() const { return q_; }
  int n_max() const { return n_max_; }
  std::optional<double> k_cut() const { return k_cut_; }
  const Ring& ring() const { return ring_; }
  const std::vector<LatticeSite>& sites() const { return sites_; }
  size_t size() const { return sites_.size(); }
  const LatticeSite& site(int i) const { return sites_[i]; }

  // index of a canonical key, or -1 if outside the atlas
  int find(const Canon& c) const {
    auto it = index_.find(c);
    return it == index_.end() ? -1 : it->second;
  }
  int origin() const { return origin_; }
  int unit_site(int j) const { return units_[j]; }  // k_{j+1}, j = 0..2q-1

  // canonical key of the generator k_{j+1}, j = 0..2q-1
  const Canon& unit_canon(int j) const { return unit_canon_[j]; }
  // canonical key rotated by pi/q (multiplication by zeta, reduced)
  Canon rotate_canon(const Canon& c, int steps = 1) const;

  // rotation orbits; orbit_of[i] gives the orbit id of site i, orbits[o]
  // lists member sites sorted ascending (first entry = representative)
  const std::vector<std::vector<int>>& orbits() const { return orbits_; }
  int orbit_of(int i) const { return orbit_of_[i]; }

  double norm2(int i) const { return 0.5 * ring_.value(sites_[i].norm2x2); }
  // |k|^2 - 1, exact and float
  RingElement small_divisor_exact(int i) const;
  double small_divisor(int i) const;

  // census: number of sites per layer, and the fitted c1 with
  // card{N_k = N} <= c1 * N^{q-1} tight on this atlas
  std::vector<size_t> shell_census() const;
  double census_c1() const;

  // sites with |k| = 1 exactly (should be exactly the 2q generators)
  std::vector<int> unit_circle_sites() const;

 private:
  int q_, n_max_;
  std::optional<double> k_cut_;
  Ring ring_;
  std::vector<LatticeSite> sites_;
  std::unordered_map<Canon, int, CanonHash> index_;
  std::vector<std::vector<int>> orbits_;
  std::vector<int> orbit_of_;
  std::vector<int> units_;
  std::vector<Canon> unit_canon_;
  std::vector<long long> phi2q_;  // cyclotomic Phi_{2q}, ascending
  int deg_ = 0;                   // phi(2q)
  int origin_ = -1;

  Canon canon_of_word(const std::vector<int>& w) const;
  friend class AtlasBuilder;
};

// rotate a site by steps * pi/q; throws if the image left the window
int rotate_site(const LatticeAtlas& atlas, int site, int steps);

struct DivisorRow {
  int n;
  double min_divisor;
  Canon site_canon;
};
struct DivisorSpectrum {
  std::vector<DivisorRow> rows;
  double fitted_exponent;  // least-squares slope of log(min) vs log(N)
  double fitted_c;         // largest c with min >= c / N^{2 l0} on the atlas
};
DivisorSpectrum divisor_spectrum(const LatticeAtlas& atlas);

// all index quadruples (j,l,r,s), 1-based over k_1..k_2q, summing to zero,
// in nondecreasing order, deduplicated
std::vector<std::array<int, 4>> resonant_quadruples(int q);

}  // namespace qpf
