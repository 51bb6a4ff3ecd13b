#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsd/qdynamics.hpp"
#include "qsd/states.hpp"
#include "qsd/topology.hpp"

namespace qsd {

// Free parameters of a network: one value per masked upper-triangle H
// entry, and one unconstrained logit per masked T entry (mapped column
// by column onto the probability simplex, so decoded matrices satisfy
// the stochasticity constraints exactly).
struct ParameterVector {
  Eigen::VectorXd h_free;
  Eigen::VectorXd t_logits;
};

struct ParameterLayout {
  std::vector<std::pair<int, int>> h_entries;  // (i, j), i < j, row-major
  std::vector<std::pair<int, int>> t_entries;  // (i, j) column-major
  int h_dim() const { return static_cast<int>(h_entries.size()); }
  int t_dim() const { return static_cast<int>(t_entries.size()); }
};
ParameterLayout make_layout(const Topology& topo);

std::pair<Hamiltonian, TransitionMatrix> decode(const ParameterVector& params,
                                                const Topology& topo);

// Flat view (h_free then t_logits) used by the quasi-Newton loop and the
// finite-difference helpers.
Eigen::VectorXd to_flat(const ParameterVector& params);
ParameterVector from_flat(const Eigen::VectorXd& x, const ParameterLayout& layout);

// Inverses used for seeding and tests; logits are clamped at log(1e-18).
Eigen::VectorXd encode_hamiltonian(const Topology& topo, const Hamiltonian& ham);
Eigen::VectorXd encode_transition_logits(const Topology& topo,
                                         const TransitionMatrix& trans);

// Linear map from an input-subspace state to its sink populations at
// time tau under a fixed network. At p = 0 it is built from the non-sink
// block alone (effective Hamiltonian H - i Gamma S and the observability
// Gramian of each sinker projector); otherwise from one dense propagator.
class SinkResponse {
 public:
  static SinkResponse build(const Topology& topo, const Hamiltonian& ham,
                            const TransitionMatrix& trans, double p, double tau,
                            double gamma = 1.0);

  double population(int m, const Eigen::MatrixXcd& input_state) const;
  double pc(const StateEnsemble& ensemble) const;
  int n_sinks() const { return static_cast<int>(weights_.size()); }

 private:
  std::vector<Eigen::MatrixXcd> weights_;  // input-block coefficient matrices
};

double objective(const ParameterVector& params, const Topology& topo, double p,
                 double tau, const StateEnsemble& ensemble);

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step, bool central);

struct OptimizeConfig {
  int restarts = 16;
  int max_iters = 500;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int threads = 0;        // 0 = hardware concurrency
  double fd_step = 1e-6;  // central-difference step
};

struct OptimizationResult {
  Hamiltonian best_h;
  TransitionMatrix best_t;
  double best_pc = 0.0;
  std::vector<double> history;  // per-iteration P_c of the winning restart
  int restarts_used = 0;
  bool converged = false;
};

// Multi-start quasi-Newton ascent over the unconstrained parameters.
// Deterministic for a fixed seed regardless of thread count.
OptimizationResult maximize(const Topology& topo, double p, double tau,
                            const StateEnsemble& ensemble,
                            const OptimizeConfig& config = {});

}  // namespace qsd
