#pragma once
// Fourier coefficient maps over a lattice atlas.  All fields here are real
// with real coefficients (coefficient at -k equals coefficient at k), and
// the branch objects are additionally pi/q-rotation invariant.

#include <map>
#include <vector>

#include "qpf/lattice.hpp"

namespace qpf {

struct SpectralField {
  const LatticeAtlas* atlas = nullptr;
  std::map<int, double> coeffs;  // site index -> coefficient, absent = 0
  bool symmetric = false;

  double get(int i) const {
    auto it = coeffs.find(i);
    return it == coeffs.end() ? 0.0 : it->second;
  }
  void set(int i, double v) {
    if (v == 0.0)
      coeffs.erase(i);
    else
      coeffs[i] = v;
  }
  void add(int i, double v) { set(i, get(i) + v); }
  size_t nnz() const { return coeffs.size(); }
};

SpectralField zero_field(const LatticeAtlas& atlas);

// || f ||_s with weights (1 + N_k^2)^s
double hs_norm(const SpectralField& f, double s);

// axpy: f += alpha * g (same atlas)
void accumulate(SpectralField& f, double alpha, const SpectralField& g);

enum class TruncationPolicy {
  Strict,      // any truncated mass above threshold throws
  Report,      // exact per-mode loss accumulated, H0 norm reported
  FastReport,  // scalar upper bound on lost H0 mass (triangle inequality)
};

struct ProductResult {
  SpectralField field;
  double loss_norm = 0;  // H0 norm of truncated coefficients (or bound)
};

// quasilattice convolution: coefficient at k = sum of f^(m) g^(k-m)
ProductResult multiply(const SpectralField& f, const SpectralField& g,
                       const LatticeAtlas& target,
                       TruncationPolicy policy = TruncationPolicy::Strict,
                       double strict_threshold = 1e-12);

// re-host a field onto a (super)atlas via canonical keys; throws if a
// nonzero mode is missing from the target
SpectralField rebase(const SpectralField& f, const LatticeAtlas& target);

// coefficient permutation along rotation orbits (k -> R_{pi/q} k)
SpectralField rotate_field(const SpectralField& f);

// real-space evaluation of sum u^(k) cos(k.x) on a uniform grid over
// [-window, window]^2, row-major, resolution x resolution
std::vector<double> sample(const SpectralField& f, double window,
                           int resolution);

}  // namespace qpf
