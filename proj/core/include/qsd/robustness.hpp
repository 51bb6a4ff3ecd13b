#pragma once

#include <cstdint>
#include <vector>

#include "qsd/optimizer.hpp"
#include "qsd/rng.hpp"
#include "qsd/states.hpp"
#include "qsd/topology.hpp"

namespace qsd {

// Nominal preparation parameters of the pure-vs-mixed pair.
struct PairParams {
  double theta = M_PI / 8;
  double xi = M_PI / 4;
  double r = 0.5;
};

struct McConfig {
  int n_runs = 1000;
  double error_pct = 0.05;  // maximum relative error delta
  std::uint64_t seed = 0;
  std::vector<double> p_values{0.0};
  std::vector<double> tau_values{1.0, 10.0};
  std::vector<double> error_values{};  // empty: just {error_pct}
  bool shared_draw = false;            // one parameter draw for both states
  OptimizeConfig opt{};
};

struct CellStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;
};

struct McSummary {
  struct Cell {
    double p = 0.0;
    double tau = 0.0;
    double error_pct = 0.0;
    double nominal_pc = 0.0;  // optimized noiseless value of this (p, tau)
    CellStats stats;
  };
  std::vector<Cell> cells;
};

// Both states re-prepared with parameters drawn uniformly in
// nominal*(1 +- delta); r is clamped to [0, 1].
StateEnsemble sample_noisy_ensemble(const PairParams& nominal, double error_pct,
                                    Rng& rng, bool shared_draw = false);

// Static disorder: each free coefficient scaled by an independent
// uniform(1-delta, 1+delta) factor; symmetry and mask preserved.
Hamiltonian sample_noisy_hamiltonian(const Hamiltonian& h_star, const Topology& topo,
                                     double error_pct, Rng& rng);

// Noisy state preparation fed into the network optimized for the nominal
// pair; envelopes per (p, tau, delta) cell.
McSummary run_state_noise_study(const Topology& topo, const PairParams& nominal,
                                const McConfig& config);

// Perfect states, noisy Hamiltonian coefficients around the optimum.
McSummary run_disorder_study(const Topology& topo, const PairParams& nominal,
                             const McConfig& config);

struct DepthTable {
  struct Row {
    int depth = 0;
    double tau = 0.0;
    double pc = 0.0;
    double helstrom = 0.0;
  };
  std::vector<Row> rows;
};

// Optimized p=0 performance of 2r-2r-...-2 as intermediate layers are
// stacked; states are the primed pure-vs-mixed pair.
DepthTable run_depth_study(const std::vector<int>& depths,
                           const std::vector<double>& taus,
                           const OptimizeConfig& opt = {});

}  // namespace qsd
