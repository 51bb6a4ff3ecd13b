#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qsd/topology.hpp"

namespace qsd {

// Coherent hopping rates (hbar = 1). Real symmetric, zero diagonal,
// supported on the topology mask; indexed over non-sink nodes.
struct Hamiltonian {
  Eigen::MatrixXd h;
};
Hamiltonian make_hamiltonian(const Topology& topo, const Eigen::MatrixXd& h);

// Column-stochastic noise rates on the mask support.
struct TransitionMatrix {
  Eigen::MatrixXd t;
};
TransitionMatrix make_transition_matrix(const Topology& topo, const Eigen::MatrixXd& t);

struct DensityMatrix {
  Eigen::MatrixXcd rho;
};
// Checks Hermiticity (1e-10), positivity (eigenvalues >= -1e-9) and unit
// trace (1e-9); throws std::invalid_argument on violation.
DensityMatrix make_density_matrix(const Eigen::MatrixXcd& rho);
void validate_density(const Eigen::MatrixXcd& rho);

// Vectorized generator of the full master equation acting on vec(rho),
// sinks included in the state space.
struct Liouvillian {
  Eigen::MatrixXcd l_tilde;  // n_total^2 x n_total^2
  double p = 0.0;
  double gamma = 1.0;
  int n_total = 0;
  Topology topology;
};

// Commutator part -i(I (x) H - H^T (x) I) with H embedded in the full
// space; the coherent generator that survives at p=0, Gamma->0.
Eigen::MatrixXcd coherent_generator(const Topology& topo, const Hamiltonian& ham);

Liouvillian build_liouvillian(const Topology& topo, const Hamiltonian& ham,
                              const TransitionMatrix& trans, double p,
                              double gamma = 1.0);

// rho(tau) = unvec(expm(tau L) vec(rho0)), re-hermitized.
DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double tau);

// Linear propagation without density-matrix validation (any matrix seed).
Eigen::MatrixXcd propagate_matrix(const Liouvillian& l, const Eigen::MatrixXcd& m0,
                                  double tau);

// Cached propagator expm(tau L) for repeated application.
struct Propagator {
  Eigen::MatrixXcd e;
  int n_total = 0;
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& m0) const;
};
Propagator make_propagator(const Liouvillian& l, double tau);

// Diagonal entries at the sink indices.
Eigen::VectorXd sink_populations(const DensityMatrix& rho, const Topology& topo);

// Real coordinates r = P vec(rho): diagonals first, then the real parts
// a_{ij} and imaginary parts b_{ij} of the upper-triangle coherences.
struct RealBlockForm {
  enum class Kind { Diag, Re, Im };
  struct Coord {
    Kind kind;
    int i;
    int j;
  };
  Eigen::MatrixXd l;          // P L P^{-1}, real
  std::vector<Coord> coords;  // row/column labels of `l`
  int n = 0;

  int diag_index(int i) const;
  int re_index(int i, int j) const;  // i < j
  int im_index(int i, int j) const;  // i < j
};

RealBlockForm real_block_form(const Liouvillian& l);

// r = P vec(rho) and its inverse, consistent with RealBlockForm ordering.
Eigen::VectorXd to_real_coords(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd from_real_coords(const Eigen::VectorXd& r, int n);

}  // namespace qsd
