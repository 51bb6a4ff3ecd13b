#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qsd/qdynamics.hpp"
#include "qsd/topology.hpp"

namespace qsd {

// Closed-form results for the 2r-2r-2 model (4 network nodes + 2 sinks).

// The p=0 ansatz Hamiltonian: rows (h, h), (h, -h) on the input->sinker
// block, zero elsewhere.
struct P0Ansatz {
  double h = 0.0;
  double theta = 0.0;
  Eigen::MatrixXd hamiltonian() const;  // 4x4
};

// P_c(tau) = (1+sin 2theta)/2 [1 - e^{-tau}(f(z)+1)],
// f(z) = (z sinh(z tau) + cosh(z tau) - 1)/z^2, z = sqrt(1-8h^2).
// Branch-safe: hyperbolic for 8h^2 < 1, trigonometric for 8h^2 > 1 and a
// series through the z = 0 point.
double pc_p0_closed(double theta, double h, double tau);

// Hopping rate minimizing f at fixed tau (the first local minimum of
// f(xi) on the imaginary branch, which is also global).
double optimal_h_p0(double theta, double tau);

// Fundamental solution matrix W(t) of the (rho_33, s, p) subsystem;
// requires 8h^2 < 1 so that W is real.
Eigen::Matrix3d fundamental_matrix_p0(double h, double t);
// Wronskian det W(t) = -16 h^2 (1-8h^2)^{3/2} e^{-3t}.
double wronskian_p0(double h, double t);

// Classical-walk transition matrix of the 2r-2r-2 model, entries
// 1/2 +- d_k; |d_k| <= 1/2.
struct P1Params {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;
  Eigen::Matrix4d transition() const;
};
P1Params validated(const P1Params& params);

// Population imbalance of a two-node input state: (rho_22 - rho_11)/2.
// This is the convention under which d_k = sgn(delta_rho_2 - delta_rho_1)/2
// is the optimum and T* routes each state to its own sink.
double delta_rho_of(const Eigen::MatrixXcd& rho2);

// Sinker populations (rho_33, rho_44) at time t for an input state with
// imbalance delta_rho_x, at p = 1. Regular at s12*s34 = 1 (evaluated via a
// divided difference instead of the 1/(1-s12*s34) split).
std::pair<double, double> p1_populations(const P1Params& params, double delta_rho_x,
                                         double t);

// P_c(tau) for the p=1 walk with equal priors.
double pc_p1_closed(double delta_rho_1, double delta_rho_2, const P1Params& params,
                    double tau);

// d_k = sgn(delta_rho_2 - delta_rho_1)/2; throws on a degenerate tie.
TransitionMatrix optimal_t_p1(const Topology& topo_2r2r2, double delta_rho_1,
                              double delta_rho_2);

// Rotation mapping the pair (cos a, sin a), (cos b, sin b) onto the
// symmetric pair with theta = (a-b)/2.
Eigen::Matrix2d canonical_pair_rotation(double alpha, double beta);

// Coordinate directions of the real block form with no coupling path to
// any sink population.
struct InvariantSubspaceReport {
  std::vector<RealBlockForm::Coord> trapped_directions;
  std::vector<RealBlockForm::Coord> sink_reachable;
  RealBlockForm block;  // the analyzed generator

  bool is_trapped(RealBlockForm::Kind kind, int i, int j) const;
};
std::string coord_label(const RealBlockForm::Coord& c);

InvariantSubspaceReport invariant_subspace_report(const Topology& topo,
                                                  const Hamiltonian& ham,
                                                  const TransitionMatrix& trans,
                                                  double p);

}  // namespace qsd
