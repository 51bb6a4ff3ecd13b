#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qsd/qdynamics.hpp"
#include "qsd/topology.hpp"

namespace qsd {

struct BlochVector {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;
  double norm() const;
};

// rho = (I + r . sigma)/2; requires |r| <= 1 (+1e-12).
Eigen::MatrixXcd qubit_density(const BlochVector& b);
BlochVector bloch_of(const Eigen::MatrixXcd& rho2);

enum class EnsembleFamily { Custom, SymmetricPair, Fig3Pair, Equiphase, MubMixture };

// Input states (dimension = number of occupied input nodes) with priors.
struct StateEnsemble {
  std::vector<Eigen::MatrixXcd> states;
  Eigen::VectorXd priors;
  EnsembleFamily family = EnsembleFamily::Custom;

  int size() const { return static_cast<int>(states.size()); }
  int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].rows()); }
};

StateEnsemble make_ensemble(std::vector<Eigen::MatrixXcd> states,
                            const Eigen::VectorXd& priors,
                            EnsembleFamily family = EnsembleFamily::Custom);

// |psi^(1,2)> = cos(theta)|1> +- e^{-i xi} sin(theta)|2>, equal priors.
// xi = 0 gives the real symmetric pair, xi = -pi/2 the +i "primed" pair.
StateEnsemble symmetric_pure_pair(double theta, double xi = 0.0);

// Same Bloch direction, radius rescaled to r.
Eigen::MatrixXcd bloch_shrink(const Eigen::MatrixXcd& rho2, double radius);

// Pure state at (theta, xi) versus the mirrored mixed state with radius r:
// Bloch (-r cos(xi) sin(2theta), r sin(xi) sin(2theta), r cos(2theta)).
StateEnsemble binary_pair_fig3(double theta = M_PI / 8, double xi = M_PI / 4,
                               double r = 0.5);

// |psi^(m)> = (|1> + e^{i 2 pi m / M}|2>)/sqrt(2), m = 1..M, equal priors.
StateEnsemble equiphase_states(int m_states);

// rho^(m) = alpha |phi_m><phi_m| + (1-alpha) I/M with the Fourier vectors
// |phi_m> = M^{-1/2} sum_k e^{-i 2 pi m k / M} |k>.
StateEnsemble mub_mixture(double alpha, int m_states);

// Sink projectors Pi_n = |sink_n><sink_n| plus the inconclusive remainder.
struct MeasurementSetup {
  std::vector<int> sink_nodes;
  int dim = 0;
  Eigen::MatrixXcd projector(int n) const;
  Eigen::MatrixXcd inconclusive() const;
};
MeasurementSetup measurement_setup(const Topology& topo);

// Minimum-error bound (1 + |p1 rho1 - p2 rho2|_1)/2.
double helstrom_binary(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2,
                       double p1 = 0.5, double p2 = 0.5);

// Helstrom bound of the dephased states (coherences zeroed).
double classical_helstrom(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2,
                          double p1 = 0.5, double p2 = 0.5);

// Optimal probability of correct detection for the symmetric families
// (equiphase, mub_mixture) via the square-root measurement, which is
// optimal for these geometrically uniform sets.
double symmetric_mary_bound(const StateEnsemble& ensemble);

// Qubit state with its sigma_y component removed (the 2r-2r-2 invariant
// subspace projection).
Eigen::MatrixXcd without_y_component(const Eigen::MatrixXcd& rho2);

// Ensemble states embedded on the first dim() input nodes of the network.
DensityMatrix embed_input_state(const Topology& topo, const Eigen::MatrixXcd& state);

// P_c = sum_m p_m rho^(m)_{sink_m, sink_m}(tau): each state evolved under
// the same generator and scored on its own sink.
double network_pc(const Topology& topo, const Hamiltonian& ham,
                  const TransitionMatrix& trans, double p, double tau,
                  const StateEnsemble& ensemble);

}  // namespace qsd
