#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qsd/states.hpp"

namespace qsdcli {

// Flat key=value experiment description; command-line flags override file
// entries, later duplicates override earlier ones.
struct ExperimentConfig {
  std::string model = "2r-2r-2";
  std::string ensemble = "fig3_pair";  // symmetric_pair|fig3_pair|equiphase|mub_mixture
  double theta = M_PI / 8;
  double xi = M_PI / 4;
  double r = 0.5;
  int m_states = 4;
  double alpha = 0.3;
  std::vector<double> p_grid{0.0};
  std::vector<double> tau_grid{1.0, 10.0};
  int restarts = 16;
  int max_iters = 500;
  std::uint64_t seed = 0;
  int threads = 0;
  int runs = 1000;
  double error_pct = 0.05;
  std::vector<double> error_grid{};
  std::string study = "states";  // states|disorder
  std::vector<int> depths{1, 2, 4, 8};
  // analytic command inputs
  double h = 0.5;
  double d1 = 0.5, d2 = 0.5, d3 = 0.5, d4 = 0.5;
  double dr1 = -0.3536, dr2 = -0.1768;
  std::string out;      // empty: stdout
  bool no_timing = false;

  void apply(const std::string& key, const std::string& value);
  std::string canonical() const;    // stable serialization for hashing
  std::uint64_t hash() const;       // FNV-1a of canonical()
};

ExperimentConfig load_config_file(const std::string& path);

// "0.1,0.5,1" or "0:1:11" (inclusive linspace) or a single number
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

qsd::StateEnsemble build_ensemble(const ExperimentConfig& config);
bool ensemble_is_binary(const ExperimentConfig& config);

}  // namespace qsdcli
