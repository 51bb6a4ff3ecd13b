#include "qsd/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsd {

namespace {

CellStats summarize(const std::vector<double>& values) {
  CellStats s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = values.size() > 1
                 ? std::sqrt(var / static_cast<double>(values.size() - 1))
                 : 0.0;
  return s;
}

std::vector<double> error_grid(const McConfig& config) {
  return config.error_values.empty() ? std::vector<double>{config.error_pct}
                                     : config.error_values;
}

}  // namespace

StateEnsemble sample_noisy_ensemble(const PairParams& nominal, double error_pct,
                                    Rng& rng, bool shared_draw) {
  const auto draw = [&](double value) {
    return value * rng.uniform(1.0 - error_pct, 1.0 + error_pct);
  };
  const double theta1 = draw(nominal.theta);
  const double xi1 = draw(nominal.xi);
  const double r1 = draw(nominal.r);
  const double theta2 = shared_draw ? theta1 : draw(nominal.theta);
  const double xi2 = shared_draw ? xi1 : draw(nominal.xi);
  const double r2 = shared_draw ? r1 : draw(nominal.r);

  const auto state1 = binary_pair_fig3(theta1, xi1, std::clamp(r1, 0.0, 1.0));
  const auto state2 = binary_pair_fig3(theta2, xi2, std::clamp(r2, 0.0, 1.0));
  return make_ensemble({state1.states[0], state2.states[1]},
                       Eigen::Vector2d(0.5, 0.5), EnsembleFamily::Fig3Pair);
}

Hamiltonian sample_noisy_hamiltonian(const Hamiltonian& h_star, const Topology& topo,
                                     double error_pct, Rng& rng) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(topo.n_network, topo.n_network);
  for (int i = 0; i < topo.n_network; ++i) {
    for (int j = i + 1; j < topo.n_network; ++j) {
      if (!topo.mask(i, j)) continue;
      h(i, j) = h(j, i) =
          h_star.h(i, j) * rng.uniform(1.0 - error_pct, 1.0 + error_pct);
    }
  }
  return make_hamiltonian(topo, h);
}

namespace {

McSummary run_study(const Topology& topo, const PairParams& nominal,
                    const McConfig& config, bool perturb_states) {
  if (config.n_runs < 1) throw std::invalid_argument("mc study: n_runs >= 1");
  if (config.error_pct < 0) throw std::invalid_argument("mc study: delta >= 0");
  const StateEnsemble nominal_pair =
      binary_pair_fig3(nominal.theta, nominal.xi, nominal.r);
  const std::vector<double> deltas = error_grid(config);

  McSummary summary;
  std::uint64_t cell_index = 0;
  for (double p : config.p_values) {
    for (double tau : config.tau_values) {
      OptimizeConfig opt = config.opt;
      opt.seed = Rng::mix(config.seed, cell_index);
      const OptimizationResult star = maximize(topo, p, tau, nominal_pair, opt);
      const SinkResponse nominal_response =
          SinkResponse::build(topo, star.best_h, star.best_t, p, tau);

      for (double delta : deltas) {
        std::vector<double> values(config.n_runs);
        for (int run = 0; run < config.n_runs; ++run) {
          // one substream per run index: serial and parallel execution agree
          Rng rng = Rng::substream(Rng::mix(config.seed, 0x5743 + cell_index),
                                   static_cast<std::uint64_t>(run));
          if (perturb_states) {
            const StateEnsemble noisy =
                sample_noisy_ensemble(nominal, delta, rng, config.shared_draw);
            values[run] = nominal_response.pc(noisy);
          } else {
            const Hamiltonian noisy =
                sample_noisy_hamiltonian(star.best_h, topo, delta, rng);
            values[run] =
                SinkResponse::build(topo, noisy, star.best_t, p, tau).pc(nominal_pair);
          }
        }
        summary.cells.push_back(
            {p, tau, delta, star.best_pc, summarize(values)});
      }
      ++cell_index;
    }
  }
  return summary;
}

}  // namespace

McSummary run_state_noise_study(const Topology& topo, const PairParams& nominal,
                                const McConfig& config) {
  return run_study(topo, nominal, config, /*perturb_states=*/true);
}

McSummary run_disorder_study(const Topology& topo, const PairParams& nominal,
                             const McConfig& config) {
  return run_study(topo, nominal, config, /*perturb_states=*/false);
}

DepthTable run_depth_study(const std::vector<int>& depths,
                           const std::vector<double>& taus,
                           const OptimizeConfig& opt) {
  // primed pure-vs-mixed pair: xi = pi/2 puts the separation on sigma_y
  const StateEnsemble pair = binary_pair_fig3(M_PI / 8, M_PI / 2, 0.5);
  const double bound = helstrom_binary(pair.states[0], pair.states[1]);

  DepthTable table;
  for (int depth : depths) {
    if (depth < 1) throw std::invalid_argument("depth study: depth >= 1");
    ModelSpec spec;
    spec.layer_sizes.assign(static_cast<std::size_t>(depth) + 2, 2);
    spec.reduced.assign(static_cast<std::size_t>(depth) + 1, true);
    const Topology topo = build_topology(spec);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      OptimizeConfig cell_opt = opt;
      cell_opt.seed = Rng::mix(opt.seed, table.rows.size());
      const OptimizationResult res = maximize(topo, 0.0, taus[i], pair, cell_opt);
      table.rows.push_back({depth, taus[i], res.best_pc, bound});
    }
  }
  return table;
}

}  // namespace qsd
