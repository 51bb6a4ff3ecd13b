#include "config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsdcli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
  }
  return x;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt(v[i]);
  }
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1) {
      throw std::invalid_argument("config: bad grid '" + text + "'");
    }
    for (int k = 0; k < count; ++k) {
      grid.push_back(count == 1 ? lo : lo + (hi - lo) * k / (count - 1));
    }
    return grid;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!trim(tok).empty()) grid.push_back(to_double(trim(tok), "grid"));
  }
  if (grid.empty()) throw std::invalid_argument("config: empty grid '" + text + "'");
  return grid;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) out.push_back(static_cast<int>(v));
  return out;
}

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  if (key == "model") model = value;
  else if (key == "ensemble") ensemble = value;
  else if (key == "theta") theta = to_double(value, key);
  else if (key == "xi") xi = to_double(value, key);
  else if (key == "r") r = to_double(value, key);
  else if (key == "m_states") m_states = static_cast<int>(to_double(value, key));
  else if (key == "alpha") alpha = to_double(value, key);
  else if (key == "p") p_grid = parse_grid(value);
  else if (key == "tau") tau_grid = parse_grid(value);
  else if (key == "restarts") restarts = static_cast<int>(to_double(value, key));
  else if (key == "max_iters") max_iters = static_cast<int>(to_double(value, key));
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "threads") threads = static_cast<int>(to_double(value, key));
  else if (key == "runs") runs = static_cast<int>(to_double(value, key));
  else if (key == "error_pct") error_pct = to_double(value, key);
  else if (key == "error_grid") error_grid = parse_grid(value);
  else if (key == "study") study = value;
  else if (key == "depths") depths = parse_int_list(value);
  else if (key == "h") h = to_double(value, key);
  else if (key == "d1") d1 = to_double(value, key);
  else if (key == "d2") d2 = to_double(value, key);
  else if (key == "d3") d3 = to_double(value, key);
  else if (key == "d4") d4 = to_double(value, key);
  else if (key == "dr1") dr1 = to_double(value, key);
  else if (key == "dr2") dr2 = to_double(value, key);
  else if (key == "out") out = value;
  else if (key == "no_timing") no_timing = value == "1" || value == "true";
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    }
    cfg.apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::string ExperimentConfig::canonical() const {
  std::string s;
  s += "model=" + model;
  s += " ensemble=" + ensemble;
  s += " theta=" + fmt(theta);
  s += " xi=" + fmt(xi);
  s += " r=" + fmt(r);
  s += " m_states=" + std::to_string(m_states);
  s += " alpha=" + fmt(alpha);
  s += " p=" + fmt(p_grid);
  s += " tau=" + fmt(tau_grid);
  s += " restarts=" + std::to_string(restarts);
  s += " max_iters=" + std::to_string(max_iters);
  s += " seed=" + std::to_string(seed);
  s += " runs=" + std::to_string(runs);
  s += " error_pct=" + fmt(error_pct);
  s += " error_grid=" + fmt(error_grid);
  s += " study=" + study;
  s += " depths=";
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(depths[i]);
  }
  s += " h=" + fmt(h);
  s += " d=" + fmt({d1, d2, d3, d4});
  s += " dr=" + fmt({dr1, dr2});
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

qsd::StateEnsemble build_ensemble(const ExperimentConfig& config) {
  if (config.ensemble == "symmetric_pair") {
    return qsd::symmetric_pure_pair(config.theta, config.xi);
  }
  if (config.ensemble == "fig3_pair") {
    return qsd::binary_pair_fig3(config.theta, config.xi, config.r);
  }
  if (config.ensemble == "equiphase") {
    return qsd::equiphase_states(config.m_states);
  }
  if (config.ensemble == "mub_mixture") {
    return qsd::mub_mixture(config.alpha, config.m_states);
  }
  throw std::invalid_argument("config: unknown ensemble family '" +
                              config.ensemble + "'");
}

bool ensemble_is_binary(const ExperimentConfig& config) {
  return config.ensemble == "symmetric_pair" || config.ensemble == "fig3_pair";
}

}  // namespace qsdcli
