#include "qpf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qpf {

using nlohmann::json;

static json canon_json(const LatticeAtlas& A, const Canon& c) {
  int deg = (int)A.ring().min_poly().size() * 2 - 2;  // phi(2q) = 2d
  json arr = json::array();
  for (int i = 0; i < deg; ++i) arr.push_back(c[i]);
  return arr;
}

json atlas_header_json(const LatticeAtlas& A) {
  json h;
  h["q"] = A.q();
  h["n_max"] = A.n_max();
  if (A.k_cut())
    h["k_cut"] = *A.k_cut();
  else
    h["k_cut"] = nullptr;
  h["min_poly"] = A.ring().min_poly();
  return h;
}

json atlas_to_json(const LatticeAtlas& A) {
  json j;
  j["header"] = atlas_header_json(A);
  json sites = json::array();
  for (int i = 0; i < (int)A.size(); ++i) {
    const auto& s = A.site(i);
    json rec;
    rec["canon"] = canon_json(A, s.canon);
    rec["word"] = s.word;
    rec["x"] = s.x;
    rec["y"] = s.y;
    rec["norm2_coeffs"] = s.norm2x2.coeffs;  // doubled norm, integer exact
    rec["n"] = s.n;
    sites.push_back(std::move(rec));
  }
  j["sites"] = std::move(sites);
  return j;
}

json field_to_json(const SpectralField& f) {
  json j;
  j["atlas_header"] = atlas_header_json(*f.atlas);
  json cs = json::array();
  // site indices are already sorted by (N, canon)
  for (auto& [i, v] : f.coeffs) {
    json rec;
    rec["canon"] = canon_json(*f.atlas, f.atlas->site(i).canon);
    rec["value"] = v;
    cs.push_back(std::move(rec));
  }
  j["coeffs"] = std::move(cs);
  j["symmetric"] = f.symmetric;
  return j;
}

SpectralField field_from_json(const json& j, const LatticeAtlas& A) {
  if (j.at("atlas_header").at("q").get<int>() != A.q())
    throw std::runtime_error("field_from_json: q mismatch");
  SpectralField f = zero_field(A);
  f.symmetric = j.value("symmetric", false);
  for (auto& rec : j.at("coeffs")) {
    Canon c{};
    auto arr = rec.at("canon");
    for (size_t i = 0; i < arr.size() && i < (size_t)kCanonSlots; ++i)
      c[i] = arr[i].get<int32_t>();
    int t = A.find(c);
    if (t < 0) throw std::runtime_error("field_from_json: mode outside atlas");
    f.set(t, rec.at("value").get<double>());
  }
  return f;
}

static std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string divisor_csv(const DivisorSpectrum& spec) {
  std::string out = "N,min_divisor,site_canon\n";
  for (auto& r : spec.rows) {
    out += std::to_string(r.n) + "," + fmt_sci(r.min_divisor) + ",";
    for (int i = 0; i < kCanonSlots; ++i)
      out += (i ? ";" : "") + std::to_string(r.site_canon[i]);
    out += "\n";
  }
  return out;
}

std::string blocks_csv(const std::vector<BlockRow>& rows) {
  std::string out =
      "eps,kprime_x,kprime_y,j,beta_j,mu_j,mu_j_minus_beta_minus_3eps2\n";
  for (auto& r : rows) {
    out += fmt_sci(r.eps) + "," + fmt_sci(r.kx) + "," + fmt_sci(r.ky) + "," +
           std::to_string(r.j) + "," + fmt_sci(r.beta) + "," + fmt_sci(r.mu) +
           "," + fmt_sci(r.defect) + "\n";
  }
  return out;
}

std::pair<double, double> write_pgm16(const std::string& path,
                                      const std::vector<double>& img,
                                      int resolution) {
  double lo = img[0], hi = img[0];
  for (double v : img) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi > lo ? hi - lo : 1.0;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_pgm16: cannot open " + path);
  f << "P5\n" << resolution << " " << resolution << "\n65535\n";
  for (double v : img) {
    auto u = (uint16_t)std::lround(65535.0 * (v - lo) / span);
    unsigned char b[2] = {(unsigned char)(u >> 8), (unsigned char)(u & 0xff)};
    f.write((const char*)b, 2);
  }
  return {lo, hi};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << content;
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace qpf
