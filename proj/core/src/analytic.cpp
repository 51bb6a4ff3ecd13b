#include "qsd/analytic.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace qsd {

namespace {

// f(z) with w = z^2 = 1 - 8h^2, either sign. Evaluated pre-multiplied by
// e^{-tau} so no exponential ever overflows: returns e^{-tau} (f(z) + 1).
double exp_weighted_f_plus_one(double w, double tau) {
  if (std::abs(w) * tau * tau < 1e-3) {
    // f = sum_k w^k [tau^{2k+1}/(2k+1)! + tau^{2k+2}/(2k+2)!]
    double f = 0.0;
    double term = tau;  // w^k tau^{2k+1}/(2k+1)!
    for (int k = 0; k <= 12; ++k) {
      f += term * (1.0 + tau / (2.0 * k + 2.0));
      term *= w * tau * tau / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return std::exp(-tau) * (f + 1.0);
  }
  if (w > 0) {
    const double z = std::sqrt(w);
    // e^{-tau} z sinh(z tau) = z (e^{(z-1)tau} - e^{-(z+1)tau})/2, z <= 1
    const double ep = std::exp((z - 1.0) * tau);
    const double em = std::exp(-(z + 1.0) * tau);
    const double e0 = std::exp(-tau);
    return (z * (ep - em) / 2.0 + (ep + em) / 2.0 - e0) / w + e0;
  }
  const double xi = std::sqrt(-w);
  const double f = (xi * std::sin(xi * tau) + 1.0 - std::cos(xi * tau)) / (-w);
  return std::exp(-tau) * (f + 1.0);
}

// f(xi)/tau on the imaginary branch, z = i xi / tau.
double f_imag_branch(double xi, double tau) {
  return std::sin(xi) / xi + tau * (1.0 - std::cos(xi)) / (xi * xi);
}

}  // namespace

Eigen::MatrixXd P0Ansatz::hamiltonian() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 2) = m(2, 0) = h;
  m(0, 3) = m(3, 0) = h;
  m(1, 2) = m(2, 1) = h;
  m(1, 3) = m(3, 1) = -h;
  return m;
}

double pc_p0_closed(double theta, double h, double tau) {
  if (tau < 0) throw std::invalid_argument("pc_p0_closed: negative time");
  const double w = 1.0 - 8.0 * h * h;
  return 0.5 * (1.0 + std::sin(2.0 * theta)) *
         (1.0 - exp_weighted_f_plus_one(w, tau));
}

double optimal_h_p0(double /*theta*/, double tau) {
  if (tau <= 0) throw std::invalid_argument("optimal_h_p0: need tau > 0");
  // first local minimum of f(xi), bracketed by a coarse scan
  const double step = 1e-3;
  double xi_prev = step, f_prev = f_imag_branch(xi_prev, tau);
  double lo = xi_prev, hi = 0.0;
  bool descending = false;
  for (double xi = 2 * step; xi < 50.0; xi += step) {
    const double f = f_imag_branch(xi, tau);
    if (f < f_prev) {
      descending = true;
    } else if (descending) {
      lo = xi - 2 * step;
      hi = xi;
      break;
    }
    xi_prev = xi;
    f_prev = f;
  }
  if (hi == 0.0) throw std::runtime_error("optimal_h_p0: no bracket found");

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f_imag_branch(c, tau), fd = f_imag_branch(d, tau);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f_imag_branch(c, tau);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f_imag_branch(d, tau);
    }
  }
  const double xi_star = 0.5 * (a + b);
  // z = i xi/tau  =>  8h^2 = 1 + xi^2/tau^2
  return std::sqrt((1.0 + xi_star * xi_star / (tau * tau)) / 8.0);
}

Eigen::Matrix3d fundamental_matrix_p0(double h, double t) {
  const double w = 1.0 - 8.0 * h * h;
  if (w <= 0) {
    throw std::domain_error("fundamental_matrix_p0: requires 8h^2 < 1");
  }
  const double z = std::sqrt(w);
  const double em = std::exp(-z * t), ep = std::exp(z * t), e0 = std::exp(-t);
  Eigen::Matrix3d m;
  m << 2 * h, (1 - 4 * h * h + z) * em, (1 - 4 * h * h - z) * ep,
       1.0,   2 * h * (1 + z) * em,     2 * h * (1 - z) * ep,
       4 * h, 8 * h * h * em,           8 * h * h * ep;
  return e0 * m;
}

double wronskian_p0(double h, double t) {
  const double w = 1.0 - 8.0 * h * h;
  if (w <= 0) throw std::domain_error("wronskian_p0: requires 8h^2 < 1");
  return -16.0 * h * h * std::pow(w, 1.5) * std::exp(-3.0 * t);
}

P1Params validated(const P1Params& params) {
  for (double d : {params.d1, params.d2, params.d3, params.d4}) {
    if (std::abs(d) > 0.5 + 1e-12) {
      throw std::invalid_argument("p1 params: |d_k| must not exceed 1/2");
    }
  }
  return params;
}

Eigen::Matrix4d P1Params::transition() const {
  Eigen::Matrix4d t;
  t << 0, 0, 0.5 + d1, 0.5 - d2,
       0, 0, 0.5 - d1, 0.5 + d2,
       0.5 + d3, 0.5 - d4, 0, 0,
       0.5 - d3, 0.5 + d4, 0, 0;
  return t;
}

double delta_rho_of(const Eigen::MatrixXcd& rho2) {
  if (rho2.rows() != 2 || rho2.cols() != 2) {
    throw std::invalid_argument("delta_rho_of: expected a two-node state");
  }
  return 0.5 * (rho2(1, 1) - rho2(0, 0)).real();
}

namespace {

// eg(w, t) = e^{-2t} sinh(sqrt(w) t)/sqrt(w), entire in w; all exponents
// stay negative on the feasible box (w <= 2), so nothing overflows.
double exp2_g(double w, double t) {
  if (std::abs(w) * t * t < 1e-3) {
    double sum = 0.0, term = t;  // w^k t^{2k+1}/(2k+1)!
    for (int k = 0; k <= 12; ++k) {
      sum += term;
      term *= w * t * t / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return std::exp(-2.0 * t) * sum;
  }
  if (w > 0) {
    const double r = std::sqrt(w);
    return (std::exp((r - 2.0) * t) - std::exp(-(r + 2.0) * t)) / (2.0 * r);
  }
  const double r = std::sqrt(-w);
  return std::exp(-2.0 * t) * std::sin(r * t) / r;
}

// e^{-2t} cosh(sqrt(w) t), same domain
double exp2_cosh(double w, double t) {
  if (w >= 0) {
    const double r = std::sqrt(w);
    return 0.5 * (std::exp((r - 2.0) * t) + std::exp(-(r + 2.0) * t));
  }
  return std::exp(-2.0 * t) * std::cos(std::sqrt(-w) * t);
}

// divided difference (eg(a, t) - eg(b, t))/(a - b), stable as a -> b
double exp2_g_dd(double a, double b, double t) {
  if (std::abs(a - b) > 1e-7 * std::max(1.0, std::abs(a))) {
    return (exp2_g(a, t) - exp2_g(b, t)) / (a - b);
  }
  // d/dw [sinh(sqrt(w) t)/sqrt(w)] = sum_{k>=1} k w^{k-1} t^{2k+1}/(2k+1)!
  const double w = 0.5 * (a + b);
  double sum = 0.0, wpow = 1.0, fact = 6.0;  // 3! for k=1
  double tpow = t * t * t;
  for (int k = 1; k <= 24; ++k) {
    sum += k * wpow * tpow / fact;
    wpow *= w;
    tpow *= t * t;
    fact *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
  }
  return std::exp(-2.0 * t) * sum;
}

}  // namespace

std::pair<double, double> p1_populations(const P1Params& params, double delta_rho_x,
                                         double t) {
  validated(params);
  const double s12 = params.d1 + params.d2, s34 = params.d3 + params.d4;
  const double de12 = params.d1 - params.d2, de34 = params.d3 - params.d4;
  const double u2 = 1.0 + s12 * s34;
  // symmetric channel rho_33+rho_44 and antisymmetric channel rho_33-rho_44
  const double sum = exp2_g(2.0, t);
  const double diff = -2.0 * delta_rho_x * s34 * exp2_g(u2, t) +
                      (s34 * de12 + de34) * exp2_g_dd(2.0, u2, t) +
                      de34 * exp2_g(u2, t);
  return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

double pc_p1_closed(double delta_rho_1, double delta_rho_2, const P1Params& params,
                    double tau) {
  if (tau < 0) throw std::invalid_argument("pc_p1_closed: negative time");
  validated(params);
  const double s12 = params.d1 + params.d2, s34 = params.d3 + params.d4;
  const double w = 1.0 + s12 * s34;
  const double diff = delta_rho_2 - delta_rho_1;
  const double r2 = std::sqrt(2.0);
  // imbalance channel folded into one term regular on the whole box
  // (including w = 0): [1 - e^{-2tau}(2 sinh(u tau)/u + cosh(u tau))]/(4 - w)
  return 0.5 +
         ((r2 - 1.0) * std::exp(-(2.0 + r2) * tau) -
          (r2 + 1.0) * std::exp(-(2.0 - r2) * tau)) / 4.0 +
         s34 * diff * (1.0 - 2.0 * exp2_g(w, tau) - exp2_cosh(w, tau)) /
             (3.0 - s12 * s34);
}

TransitionMatrix optimal_t_p1(const Topology& topo, double delta_rho_1,
                              double delta_rho_2) {
  if (topo.n_network != 4 || topo.n_sinks() != 2) {
    throw std::invalid_argument("optimal_t_p1: expects the 2r-2r-2 topology");
  }
  if (std::abs(delta_rho_2 - delta_rho_1) < 1e-12) {
    throw std::invalid_argument(
        "optimal_t_p1: degenerate tie, any transition matrix is optimal");
  }
  const double d = delta_rho_2 > delta_rho_1 ? 0.5 : -0.5;
  return make_transition_matrix(topo, P1Params{d, d, d, d}.transition());
}

Eigen::Matrix2d canonical_pair_rotation(double alpha, double beta) {
  const double half = 0.5 * (alpha + beta);
  Eigen::Matrix2d u;
  u << std::cos(half), std::sin(half), -std::sin(half), std::cos(half);
  return u;
}

std::string coord_label(const RealBlockForm::Coord& c) {
  switch (c.kind) {
    case RealBlockForm::Kind::Diag:
      return "rho_" + std::to_string(c.i + 1) + std::to_string(c.i + 1);
    case RealBlockForm::Kind::Re:
      return "a_" + std::to_string(c.i + 1) + std::to_string(c.j + 1);
    default:
      return "b_" + std::to_string(c.i + 1) + std::to_string(c.j + 1);
  }
}

bool InvariantSubspaceReport::is_trapped(RealBlockForm::Kind kind, int i,
                                         int j) const {
  for (const auto& c : trapped_directions) {
    if (c.kind == kind && c.i == i && c.j == j) return true;
  }
  return false;
}

InvariantSubspaceReport invariant_subspace_report(const Topology& topo,
                                                  const Hamiltonian& ham,
                                                  const TransitionMatrix& trans,
                                                  double p) {
  const Liouvillian l = build_liouvillian(topo, ham, trans, p);
  InvariantSubspaceReport report;
  report.block = real_block_form(l);
  const Eigen::MatrixXd& m = report.block.l;
  const int dim = static_cast<int>(m.rows());

  // coordinate j reaches coordinate i when m(i, j) != 0; walk backwards
  // from the sink populations to find everything that can feed them
  std::vector<char> reaches(dim, 0);
  std::deque<int> frontier;
  for (const auto& [sinker, sink] : topo.sink_pairs) {
    const int idx = report.block.diag_index(sink);
    reaches[idx] = 1;
    frontier.push_back(idx);
  }
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop_front();
    for (int j = 0; j < dim; ++j) {
      if (!reaches[j] && j != i && std::abs(m(i, j)) > 1e-12) {
        reaches[j] = 1;
        frontier.push_back(j);
      }
    }
  }
  for (int k = 0; k < dim; ++k) {
    if (reaches[k]) {
      report.sink_reachable.push_back(report.block.coords[k]);
    } else {
      report.trapped_directions.push_back(report.block.coords[k]);
    }
  }
  return report;
}

}  // namespace qsd
