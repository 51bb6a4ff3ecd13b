#include "qsd/states.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qsd {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

Eigen::MatrixXcd pure(const Eigen::VectorXcd& psi) {
  return psi * psi.adjoint();
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(rx * rx + ry * ry + rz * rz); }

Eigen::MatrixXcd qubit_density(const BlochVector& b) {
  if (b.norm() > 1.0 + 1e-12) {
    throw std::invalid_argument("bloch vector outside the unit ball");
  }
  Eigen::MatrixXcd rho(2, 2);
  rho(0, 0) = 0.5 * (1.0 + b.rz);
  rho(1, 1) = 0.5 * (1.0 - b.rz);
  rho(0, 1) = 0.5 * (b.rx - kI * b.ry);
  rho(1, 0) = 0.5 * (b.rx + kI * b.ry);
  return rho;
}

BlochVector bloch_of(const Eigen::MatrixXcd& rho2) {
  if (rho2.rows() != 2 || rho2.cols() != 2) {
    throw std::invalid_argument("bloch_of: expected a qubit state");
  }
  BlochVector b;
  b.rx = 2.0 * rho2(0, 1).real();
  b.ry = -2.0 * rho2(0, 1).imag();
  b.rz = (rho2(0, 0) - rho2(1, 1)).real();
  return b;
}

StateEnsemble make_ensemble(std::vector<Eigen::MatrixXcd> states,
                            const Eigen::VectorXd& priors, EnsembleFamily family) {
  if (states.empty() || priors.size() != static_cast<Eigen::Index>(states.size())) {
    throw std::invalid_argument("ensemble: states/priors size mismatch");
  }
  if (std::abs(priors.sum() - 1.0) > 1e-12 || priors.minCoeff() < 0.0) {
    throw std::invalid_argument("ensemble: priors must be a distribution");
  }
  for (const auto& s : states) validate_density(s);
  StateEnsemble e;
  e.states = std::move(states);
  e.priors = priors;
  e.family = family;
  return e;
}

StateEnsemble symmetric_pure_pair(double theta, double xi) {
  const std::complex<double> phase = std::exp(-kI * xi);
  Eigen::VectorXcd psi1(2), psi2(2);
  psi1 << std::cos(theta), phase * std::sin(theta);
  psi2 << std::cos(theta), -phase * std::sin(theta);
  return make_ensemble({pure(psi1), pure(psi2)}, Eigen::Vector2d(0.5, 0.5),
                       EnsembleFamily::SymmetricPair);
}

Eigen::MatrixXcd bloch_shrink(const Eigen::MatrixXcd& rho2, double radius) {
  if (radius < 0.0 || radius > 1.0 + 1e-12) {
    throw std::invalid_argument("bloch_shrink: radius outside [0, 1]");
  }
  BlochVector b = bloch_of(rho2);
  const double r0 = b.norm();
  if (radius == 0.0) return 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  if (r0 < 1e-14) {
    throw std::invalid_argument("bloch_shrink: direction undefined for r = 0 input");
  }
  const double s = radius / r0;
  return qubit_density({b.rx * s, b.ry * s, b.rz * s});
}

StateEnsemble binary_pair_fig3(double theta, double xi, double r) {
  const std::complex<double> phase = std::exp(-kI * xi);
  Eigen::VectorXcd psi1(2);
  psi1 << std::cos(theta), phase * std::sin(theta);
  const Eigen::MatrixXcd rho2 = qubit_density(
      {-r * std::cos(xi) * std::sin(2 * theta), r * std::sin(xi) * std::sin(2 * theta),
       r * std::cos(2 * theta)});
  return make_ensemble({pure(psi1), rho2}, Eigen::Vector2d(0.5, 0.5),
                       EnsembleFamily::Fig3Pair);
}

StateEnsemble equiphase_states(int m_states) {
  if (m_states < 2) throw std::invalid_argument("equiphase: need at least 2 states");
  std::vector<Eigen::MatrixXcd> states;
  for (int m = 1; m <= m_states; ++m) {
    Eigen::VectorXcd psi(2);
    psi << 1.0, std::exp(kI * (2.0 * M_PI * m / m_states));
    states.push_back(pure(psi / std::sqrt(2.0)));
  }
  return make_ensemble(std::move(states),
                       Eigen::VectorXd::Constant(m_states, 1.0 / m_states),
                       EnsembleFamily::Equiphase);
}

StateEnsemble mub_mixture(double alpha, int m_states) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("mub: alpha in [0,1]");
  if (m_states < 2) throw std::invalid_argument("mub: need at least 2 states");
  const double m = m_states;
  std::vector<Eigen::MatrixXcd> states;
  for (int s = 1; s <= m_states; ++s) {
    Eigen::VectorXcd phi(m_states);
    for (int k = 1; k <= m_states; ++k) {
      phi[k - 1] = std::exp(-kI * (2.0 * M_PI * s * k / m)) / std::sqrt(m);
    }
    states.push_back(alpha * pure(phi) +
                     (1.0 - alpha) / m * Eigen::MatrixXcd::Identity(m_states, m_states));
  }
  return make_ensemble(std::move(states), Eigen::VectorXd::Constant(m_states, 1.0 / m),
                       EnsembleFamily::MubMixture);
}

Eigen::MatrixXcd MeasurementSetup::projector(int n) const {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  p(sink_nodes.at(n), sink_nodes.at(n)) = 1.0;
  return p;
}

Eigen::MatrixXcd MeasurementSetup::inconclusive() const {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Identity(dim, dim);
  for (int s : sink_nodes) p(s, s) = 0.0;
  return p;
}

MeasurementSetup measurement_setup(const Topology& topo) {
  MeasurementSetup m;
  m.dim = topo.n_total;
  for (const auto& [sinker, sink] : topo.sink_pairs) m.sink_nodes.push_back(sink);
  return m;
}

double helstrom_binary(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2,
                       double p1, double p2) {
  if (std::abs(p1 + p2 - 1.0) > 1e-12 || p1 < 0.0 || p2 < 0.0) {
    throw std::invalid_argument("helstrom: priors must sum to 1");
  }
  validate_density(rho1);
  validate_density(rho2);
  if (rho1.rows() != rho2.rows()) {
    throw std::invalid_argument("helstrom: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p1 * rho1 - p2 * rho2);
  return 0.5 * (1.0 + es.eigenvalues().cwiseAbs().sum());
}

double classical_helstrom(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2,
                          double p1, double p2) {
  const Eigen::MatrixXcd d1 = rho1.diagonal().asDiagonal();
  const Eigen::MatrixXcd d2 = rho2.diagonal().asDiagonal();
  return helstrom_binary(d1, d2, p1, p2);
}

double symmetric_mary_bound(const StateEnsemble& ensemble) {
  if (ensemble.family != EnsembleFamily::Equiphase &&
      ensemble.family != EnsembleFamily::MubMixture) {
    throw std::invalid_argument(
        "symmetric_mary_bound: ensemble is not one of the symmetric families");
  }
  const int d = ensemble.dim();

  if (ensemble.family == EnsembleFamily::MubMixture) {
    // The mixtures commute (common Fourier eigenbasis), so minimum-error
    // discrimination reduces to classical hypothesis testing on that basis:
    // P_c = sum_k max_m p_m <k|rho_m|k>. A weighted sum splits the
    // degeneracies and recovers the shared eigenvectors.
    Eigen::MatrixXcd probe = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 0; m < ensemble.size(); ++m) {
      probe += static_cast<double>(m + 1) * ensemble.states[m];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> basis(probe);
    double pc = 0.0;
    for (int k = 0; k < d; ++k) {
      const Eigen::VectorXcd v = basis.eigenvectors().col(k);
      double best = 0.0;
      for (int m = 0; m < ensemble.size(); ++m) {
        best = std::max(best,
                        ensemble.priors[m] * (v.adjoint() * ensemble.states[m] * v)(0).real());
      }
      pc += best;
    }
    return pc;
  }

  // equiphase: square-root measurement, optimal for this geometrically
  // uniform pure family
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(d, d);
  for (int m = 0; m < ensemble.size(); ++m) {
    avg += ensemble.priors[m] * ensemble.states[m];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(avg);
  Eigen::VectorXd inv_sqrt = es.eigenvalues();
  for (int i = 0; i < d; ++i) {
    inv_sqrt[i] = inv_sqrt[i] > 1e-12 ? 1.0 / std::sqrt(inv_sqrt[i]) : 0.0;
  }
  const Eigen::MatrixXcd w =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  double pc = 0.0;
  for (int m = 0; m < ensemble.size(); ++m) {
    const Eigen::MatrixXcd pi_m = ensemble.priors[m] * w * ensemble.states[m] * w;
    pc += ensemble.priors[m] * (pi_m * ensemble.states[m]).trace().real();
  }
  return pc;
}

Eigen::MatrixXcd without_y_component(const Eigen::MatrixXcd& rho2) {
  BlochVector b = bloch_of(rho2);
  b.ry = 0.0;
  return qubit_density(b);
}

DensityMatrix embed_input_state(const Topology& topo, const Eigen::MatrixXcd& state) {
  const int d = static_cast<int>(state.rows());
  if (d > topo.input_size()) {
    throw std::invalid_argument("state dimension exceeds the input layer size");
  }
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(topo.n_total, topo.n_total);
  full.topLeftCorner(d, d) = state;
  return make_density_matrix(full);
}

double network_pc(const Topology& topo, const Hamiltonian& ham,
                  const TransitionMatrix& trans, double p, double tau,
                  const StateEnsemble& ensemble) {
  if (ensemble.size() > topo.n_sinks()) {
    throw std::invalid_argument("network_pc: more states than sinks");
  }
  const Liouvillian l = build_liouvillian(topo, ham, trans, p);
  const Propagator prop = make_propagator(l, tau);
  double pc = 0.0;
  for (int m = 0; m < ensemble.size(); ++m) {
    const DensityMatrix rho0 = embed_input_state(topo, ensemble.states[m]);
    const Eigen::MatrixXcd rt = prop.apply(rho0.rho);
    const int sink = topo.sink_pairs[m].second;
    pc += ensemble.priors[m] * rt(sink, sink).real();
  }
  return pc;
}

}  // namespace qsd
