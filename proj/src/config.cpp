#include "berglab/config.hpp"

#include <fstream>
#include <sstream>

#include "berglab/errors.hpp"

namespace berglab {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_num(const std::string& v, const std::string& key) {
  std::istringstream ss(v);
  T out;
  ss >> out;
  if (!ss || !(ss >> std::ws).eof())
    throw ValidationError("config: cannot parse value for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line, section;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError("config: malformed section header: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config: expected key = value: " + line);
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto ini = parse_ini(buf.str());

  ExperimentConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
    auto s = ini.find(sec);
    if (s == ini.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
  };
  if (auto* v = get("hypersurface", "polynomial")) cfg.polynomial_path = *v;
  if (auto* v = get("sampling", "complex_count")) cfg.complex_count = parse_num<std::size_t>(*v, "complex_count");
  if (auto* v = get("sampling", "real_count")) cfg.real_count = parse_num<std::size_t>(*v, "real_count");
  if (auto* v = get("sampling", "seed")) cfg.seed = parse_num<std::uint64_t>(*v, "seed");
  if (auto* v = get("bergman", "m_min")) cfg.m_min = parse_num<int>(*v, "m_min");
  if (auto* v = get("bergman", "m_max")) cfg.m_max = parse_num<int>(*v, "m_max");
  if (auto* v = get("bergman", "gram_count")) cfg.gram_count = parse_num<std::size_t>(*v, "gram_count");
  if (auto* v = get("homotopy", "m")) cfg.homotopy_m = parse_num<int>(*v, "m");
  if (auto* v = get("homotopy", "count")) cfg.homotopy_count = parse_num<int>(*v, "count");
  if (auto* v = get("homotopy", "steps")) cfg.homotopy_steps = parse_num<int>(*v, "steps");
  if (auto* v = get("homotopy", "vertices")) cfg.homotopy_vertices = parse_num<std::size_t>(*v, "vertices");
  if (auto* v = get("homotopy", "amplitude")) cfg.homotopy_amplitude = parse_num<double>(*v, "amplitude");
  if (auto* v = get("homotopy", "guard_floor")) cfg.guard_floor = parse_num<double>(*v, "guard_floor");
  if (auto* v = get("output", "dir")) cfg.out_dir = *v;
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.polynomial_path.empty())
    throw ValidationError("config: [hypersurface] polynomial is required");
  std::ifstream probe(cfg.polynomial_path);
  if (!probe) throw ValidationError("config: polynomial file not found: " + cfg.polynomial_path);
  if (cfg.m_min < 1 || cfg.m_max < cfg.m_min)
    throw ValidationError("config: need 1 <= m_min <= m_max");
  if (cfg.homotopy_m < 1) throw ValidationError("config: homotopy m must be >= 1");
  if (cfg.complex_count < 100 || cfg.real_count < 100 || cfg.gram_count < 100)
    throw ValidationError("config: sample counts must be >= 100");
  if (cfg.homotopy_vertices < 32) throw ValidationError("config: homotopy vertices too few");
  if (!(cfg.guard_floor > 0.0)) throw ValidationError("config: guard floor must be positive");
  if (cfg.homotopy_count < 1 || cfg.homotopy_steps < 1)
    throw ValidationError("config: homotopy counts must be >= 1");
}

}  // namespace berglab
