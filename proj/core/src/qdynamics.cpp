#include "qsd/qdynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Sparse>

#include "qsd/linalg.hpp"

namespace qsd {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_mask_support(const Topology& topo, const Eigen::MatrixXd& m,
                        const char* what) {
  if (m.rows() != topo.n_network || m.cols() != topo.n_network) {
    throw std::invalid_argument(std::string(what) + ": wrong dimension");
  }
  for (int i = 0; i < topo.n_network; ++i) {
    for (int j = 0; j < topo.n_network; ++j) {
      if (!topo.mask(i, j) && m(i, j) != 0.0) {
        throw std::invalid_argument(std::string(what) +
                                    ": nonzero entry outside the topology mask");
      }
    }
  }
}

}  // namespace

Hamiltonian make_hamiltonian(const Topology& topo, const Eigen::MatrixXd& h) {
  check_mask_support(topo, h, "hamiltonian");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("hamiltonian: not symmetric");
  }
  for (int i = 0; i < topo.n_network; ++i) {
    if (h(i, i) != 0.0) throw std::invalid_argument("hamiltonian: nonzero diagonal");
  }
  return Hamiltonian{h};
}

TransitionMatrix make_transition_matrix(const Topology& topo,
                                        const Eigen::MatrixXd& t) {
  check_mask_support(topo, t, "transition matrix");
  if (t.minCoeff() < -1e-12 || t.maxCoeff() > 1.0 + 1e-12) {
    throw std::invalid_argument("transition matrix: entries outside [0, 1]");
  }
  for (int j = 0; j < topo.n_network; ++j) {
    if (std::abs(t.col(j).sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("transition matrix: column " +
                                  std::to_string(j) + " does not sum to 1");
    }
  }
  return TransitionMatrix{t};
}

void validate_density(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("density matrix: not square");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("density matrix: not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-9 ||
      std::abs(rho.trace().imag()) > 1e-9) {
    throw std::invalid_argument("density matrix: trace != 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("density matrix: negative eigenvalue");
  }
}

DensityMatrix make_density_matrix(const Eigen::MatrixXcd& rho) {
  validate_density(rho);
  return DensityMatrix{rho};
}

Eigen::MatrixXcd coherent_generator(const Topology& topo, const Hamiltonian& ham) {
  const int n = topo.n_total;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  h.topLeftCorner(topo.n_network, topo.n_network) = ham.h;

  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n * n, n * n);
  // vec index of rho_{r,c} is r + n*c; kron(X, Y)[(a+n b),(a'+n b')] = X(b,b') Y(a,a')
  for (int b = 0; b < n; ++b) {
    l.block(n * b, n * b, n, n) -= kI * h;  // I (x) H
  }
  for (int b = 0; b < n; ++b) {
    for (int bp = 0; bp < n; ++bp) {
      const double v = h(bp, b).real();  // (H^T)(b,b') = H(b',b)
      if (v != 0.0) {
        for (int a = 0; a < n; ++a) l(a + n * b, a + n * bp) += kI * v;
      }
    }
  }
  return l;
}

Liouvillian build_liouvillian(const Topology& topo, const Hamiltonian& ham,
                              const TransitionMatrix& trans, double p,
                              double gamma) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0, 1]");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  check_mask_support(topo, ham.h, "hamiltonian");
  check_mask_support(topo, trans.t, "transition matrix");

  const int n = topo.n_total;
  Liouvillian l;
  l.p = p;
  l.gamma = gamma;
  l.n_total = n;
  l.topology = topo;
  l.l_tilde = (1.0 - p) * coherent_generator(topo, ham);

  // p * sum_{ij} T_ij [ |i><j| (x) |i><j| - 1/2 (I (x) |j><j| + |j><j| (x) I) ]
  if (p > 0.0) {
    for (int i = 0; i < topo.n_network; ++i) {
      for (int j = 0; j < topo.n_network; ++j) {
        const double t = trans.t(i, j);
        if (t == 0.0) continue;
        l.l_tilde(i + n * i, j + n * j) += p * t;
        for (int b = 0; b < n; ++b) {
          l.l_tilde(j + n * b, j + n * b) -= 0.5 * p * t;  // I (x) |j><j|
          l.l_tilde(b + n * j, b + n * j) -= 0.5 * p * t;  // |j><j| (x) I
        }
      }
    }
  }

  // Gamma * sum_n [ 2 |n><s_n| (x) |n><s_n| - I (x) |s_n><s_n| - |s_n><s_n| (x) I ]
  for (const auto& [sinker, sink] : topo.sink_pairs) {
    l.l_tilde(sink + n * sink, sinker + n * sinker) += 2.0 * gamma;
    for (int b = 0; b < n; ++b) {
      l.l_tilde(sinker + n * b, sinker + n * b) -= gamma;
      l.l_tilde(b + n * sinker, b + n * sinker) -= gamma;
    }
  }
  return l;
}

Eigen::MatrixXcd propagate_matrix(const Liouvillian& l, const Eigen::MatrixXcd& m0,
                                  double tau) {
  if (tau < 0) throw std::invalid_argument("evolve: negative time");
  if (m0.rows() != l.n_total || m0.cols() != l.n_total) {
    throw std::invalid_argument("evolve: state dimension mismatch");
  }
  if (tau == 0) return m0;
  const Eigen::MatrixXcd e = expm((tau * l.l_tilde).eval());
  return unvec(e * vec(m0), l.n_total);
}

Propagator make_propagator(const Liouvillian& l, double tau) {
  if (tau < 0) throw std::invalid_argument("propagator: negative time");
  return Propagator{expm((tau * l.l_tilde).eval()), l.n_total};
}

Eigen::MatrixXcd Propagator::apply(const Eigen::MatrixXcd& m0) const {
  return unvec(e * vec(m0), n_total);
}

DensityMatrix evolve(const Liouvillian& l, const DensityMatrix& rho0, double tau) {
  Eigen::MatrixXcd rt = propagate_matrix(l, rho0.rho, tau);
  if (!rt.allFinite()) {
    throw std::runtime_error("evolve: non-finite state, invalid generator");
  }
  rt = 0.5 * (rt + rt.adjoint()).eval();  // strip roundoff asymmetry
  return DensityMatrix{rt};
}

Eigen::VectorXd sink_populations(const DensityMatrix& rho, const Topology& topo) {
  Eigen::VectorXd pops(topo.n_sinks());
  for (int k = 0; k < topo.n_sinks(); ++k) {
    pops[k] = rho.rho(topo.sink_pairs[k].second, topo.sink_pairs[k].second).real();
  }
  return pops;
}

int RealBlockForm::diag_index(int i) const { return i; }

int RealBlockForm::re_index(int i, int j) const {
  // pairs (i<j) in lexicographic order, offset by the n diagonals
  return n + (i * (2 * n - i - 1)) / 2 + (j - i - 1);
}

int RealBlockForm::im_index(int i, int j) const {
  return re_index(i, j) + n * (n - 1) / 2;
}

Eigen::VectorXd to_real_coords(const Eigen::MatrixXcd& rho) {
  const int n = static_cast<int>(rho.rows());
  Eigen::VectorXd r(n * n);
  int k = 0;
  for (int i = 0; i < n; ++i) r[k++] = rho(i, i).real();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) r[k++] = 0.5 * (rho(i, j) + rho(j, i)).real();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      r[k++] = (0.5 * (rho(i, j) - rho(j, i)) / kI).real();
    }
  }
  return r;
}

Eigen::MatrixXcd from_real_coords(const Eigen::VectorXd& r, int n) {
  Eigen::MatrixXcd rho(n, n);
  const int pairs = n * (n - 1) / 2;
  int k = 0;
  for (int i = 0; i < n; ++i) rho(i, i) = r[i];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double a = r[n + k];
      const double b = r[n + pairs + k];
      rho(i, j) = std::complex<double>(a, b);
      rho(j, i) = std::complex<double>(a, -b);
      ++k;
    }
  }
  return rho;
}

RealBlockForm real_block_form(const Liouvillian& l) {
  const int n = l.n_total;
  const int dim = n * n;
  const int pairs = n * (n - 1) / 2;

  RealBlockForm out;
  out.n = n;
  out.coords.reserve(dim);
  for (int i = 0; i < n; ++i) out.coords.push_back({RealBlockForm::Kind::Diag, i, i});
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.coords.push_back({RealBlockForm::Kind::Re, i, j});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.coords.push_back({RealBlockForm::Kind::Im, i, j});
  }

  // P: r = P vec(rho); P^{-1}: rho_ij = a_ij + i b_ij, rho_ji = a_ij - i b_ij
  Eigen::SparseMatrix<std::complex<double>> pm(dim, dim), pinv(dim, dim);
  std::vector<Eigen::Triplet<std::complex<double>>> tp, ti;
  const auto vix = [n](int row, int col) { return row + n * col; };
  for (int i = 0; i < n; ++i) {
    tp.emplace_back(i, vix(i, i), 1.0);
    ti.emplace_back(vix(i, i), i, 1.0);
  }
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int a_row = n + k;
      const int b_row = n + pairs + k;
      tp.emplace_back(a_row, vix(i, j), 0.5);
      tp.emplace_back(a_row, vix(j, i), 0.5);
      tp.emplace_back(b_row, vix(i, j), -0.5 * kI);
      tp.emplace_back(b_row, vix(j, i), 0.5 * kI);
      ti.emplace_back(vix(i, j), a_row, 1.0);
      ti.emplace_back(vix(i, j), b_row, kI);
      ti.emplace_back(vix(j, i), a_row, 1.0);
      ti.emplace_back(vix(j, i), b_row, -kI);
      ++k;
    }
  }
  pm.setFromTriplets(tp.begin(), tp.end());
  pinv.setFromTriplets(ti.begin(), ti.end());

  const Eigen::MatrixXcd transformed = pm * (l.l_tilde * pinv).eval();
  const double scale = std::max(1.0, l.l_tilde.cwiseAbs().maxCoeff());
  if (transformed.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw std::runtime_error("real_block_form: generator is not GKSL-real");
  }
  out.l = transformed.real();
  return out;
}

}  // namespace qsd
