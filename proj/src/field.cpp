#include "qpf/field.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace qpf {

SpectralField zero_field(const LatticeAtlas& atlas) {
  SpectralField f;
  f.atlas = &atlas;
  f.symmetric = true;
  return f;
}

double hs_norm(const SpectralField& f, double s) {
  double acc = 0;
  for (auto& [i, v] : f.coeffs) {
    double n = (double)f.atlas->site(i).n;
    acc += std::pow(1.0 + n * n, s) * v * v;
  }
  return std::sqrt(acc);
}

void accumulate(SpectralField& f, double alpha, const SpectralField& g) {
  if (f.atlas != g.atlas) throw std::invalid_argument("accumulate: atlas mismatch");
  for (auto& [i, v] : g.coeffs) f.add(i, alpha * v);
  f.symmetric = f.symmetric && g.symmetric;
}

ProductResult multiply(const SpectralField& f, const SpectralField& g,
                       const LatticeAtlas& target, TruncationPolicy policy,
                       double strict_threshold) {
  ProductResult out;
  out.field = zero_field(target);
  out.field.symmetric = f.symmetric && g.symmetric;

  // gather nonzeros with canonical keys resolved in the target lattice
  struct Entry {
    Canon c;
    double v;
  };
  auto gather = [&](const SpectralField& h) {
    std::vector<Entry> e;
    e.reserve(h.coeffs.size());
    for (auto& [i, v] : h.coeffs) e.push_back({h.atlas->site(i).canon, v});
    return e;
  };
  std::vector<Entry> fe = gather(f), ge = gather(g);

  std::vector<double> acc(target.size(), 0.0);
  std::vector<int> touched;
  std::unordered_map<Canon, double, CanonHash> lost;
  double lost_bound = 0;
  if (policy != TruncationPolicy::FastReport)
    lost.reserve(fe.size() * 2 + 16);

  for (const auto& a : fe) {
    for (const auto& b : ge) {
      Canon c = canon_add(a.c, b.c);
      int t = target.find(c);
      double w = a.v * b.v;
      if (t >= 0) {
        if (acc[t] == 0.0) touched.push_back(t);
        acc[t] += w;
      } else if (policy == TruncationPolicy::FastReport) {
        lost_bound += std::fabs(w);
      } else {
        lost[c] += w;
      }
    }
  }
  for (int t : touched)
    if (acc[t] != 0.0) out.field.coeffs.emplace(t, acc[t]);

  if (policy == TruncationPolicy::FastReport) {
    out.loss_norm = lost_bound;  // triangle-inequality bound on the H0 norm
  } else {
    double l2 = 0;
    for (auto& [c, v] : lost) l2 += v * v;
    out.loss_norm = std::sqrt(l2);
    if (policy == TruncationPolicy::Strict && out.loss_norm > strict_threshold)
      throw std::runtime_error("multiply: truncation loss " +
                               std::to_string(out.loss_norm) +
                               " exceeds strict threshold");
  }
  return out;
}

SpectralField rebase(const SpectralField& f, const LatticeAtlas& target) {
  SpectralField out = zero_field(target);
  out.symmetric = f.symmetric;
  for (auto& [i, v] : f.coeffs) {
    int t = target.find(f.atlas->site(i).canon);
    if (t < 0) throw std::runtime_error("rebase: mode missing from target atlas");
    out.coeffs.emplace(t, v);
  }
  return out;
}

SpectralField rotate_field(const SpectralField& f) {
  const LatticeAtlas& A = *f.atlas;
  SpectralField out = zero_field(A);
  out.symmetric = f.symmetric;
  for (auto& [i, v] : f.coeffs) {
    int t = A.find(A.rotate_canon(A.site(i).canon));
    if (t < 0) throw std::runtime_error("rotate_field: image outside atlas");
    out.coeffs[t] = v;
  }
  return out;
}

std::vector<double> sample(const SpectralField& f, double window,
                           int resolution) {
  if (resolution < 2) throw std::invalid_argument("sample: resolution >= 2");
  std::vector<double> img((size_t)resolution * resolution, 0.0);
  std::vector<double> kx, ky, cv;
  for (auto& [i, v] : f.coeffs) {
    kx.push_back(f.atlas->site(i).x);
    ky.push_back(f.atlas->site(i).y);
    cv.push_back(v);
  }
  for (int r = 0; r < resolution; ++r) {
    double y = -window + 2.0 * window * r / (resolution - 1);
    for (int c = 0; c < resolution; ++c) {
      double x = -window + 2.0 * window * c / (resolution - 1);
      double s = 0;
      for (size_t m = 0; m < cv.size(); ++m)
        s += cv[m] * std::cos(kx[m] * x + ky[m] * y);
      img[(size_t)r * resolution + c] = s;
    }
  }
  return img;
}

}  // namespace qpf
