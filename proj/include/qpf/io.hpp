#pragma once
// Deterministic serialization: atlas/field JSON, divisor and block CSV,
// 16-bit PGM emission with a normalization sidecar.

#include <json.hpp>
#include <string>

#include "qpf/field.hpp"
#include "qpf/operators.hpp"

namespace qpf {

nlohmann::json atlas_header_json(const LatticeAtlas& atlas);
nlohmann::json atlas_to_json(const LatticeAtlas& atlas);
nlohmann::json field_to_json(const SpectralField& f);
SpectralField field_from_json(const nlohmann::json& j, const LatticeAtlas& atlas);

std::string divisor_csv(const DivisorSpectrum& spec);

struct BlockRow {
  double eps, kx, ky;
  int j;
  double beta, mu, defect;  // defect = mu - beta - 3 eps^2
};
std::string blocks_csv(const std::vector<BlockRow>& rows);

// P5, maxval 65535, big-endian; returns {min, max} used for normalization
std::pair<double, double> write_pgm16(const std::string& path,
                                      const std::vector<double>& img,
                                      int resolution);

void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace qpf
