#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace berglab {

// Plain-text experiment configuration: "[section]" headers and "key = value"
// lines, '#' comments. No environment-variable configuration except the
// output-directory override on the command line.
struct ExperimentConfig {
  std::string polynomial_path;

  std::size_t complex_count = 20000;
  std::size_t real_count = 1000;
  std::uint64_t seed = 1;

  int m_min = 1;
  int m_max = 1;
  std::size_t gram_count = 20000;  // pool size for Gram quadrature

  int homotopy_m = 2;
  int homotopy_count = 20;
  int homotopy_steps = 8;
  std::size_t homotopy_vertices = 512;
  double homotopy_amplitude = 0.1;
  double guard_floor = 1e-3;

  std::string out_dir = "out";
  unsigned threads = 0;
};

ExperimentConfig load_config(const std::string& path);

// m >= 1, counts >= 100, referenced files exist. Throws ValidationError.
void validate_config(const ExperimentConfig& cfg);

// Parsed raw sections, exposed for tests.
std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text);

}  // namespace berglab
