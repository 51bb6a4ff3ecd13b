#include "qsd/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qsd/linalg.hpp"
#include "qsd/rng.hpp"

namespace qsd {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

}  // namespace

Eigen::VectorXd to_flat(const ParameterVector& params) {
  Eigen::VectorXd x(params.h_free.size() + params.t_logits.size());
  x << params.h_free, params.t_logits;
  return x;
}

ParameterVector from_flat(const Eigen::VectorXd& x, const ParameterLayout& layout) {
  if (x.size() != layout.h_dim() + layout.t_dim()) {
    throw std::invalid_argument("from_flat: wrong parameter count");
  }
  ParameterVector p;
  p.h_free = x.head(layout.h_dim());
  p.t_logits = x.tail(layout.t_dim());
  return p;
}

ParameterLayout make_layout(const Topology& topo) {
  ParameterLayout layout;
  for (int i = 0; i < topo.n_network; ++i) {
    for (int j = i + 1; j < topo.n_network; ++j) {
      if (topo.mask(i, j)) layout.h_entries.emplace_back(i, j);
    }
  }
  for (int j = 0; j < topo.n_network; ++j) {
    for (int i = 0; i < topo.n_network; ++i) {
      if (topo.mask(i, j)) layout.t_entries.emplace_back(i, j);
    }
  }
  return layout;
}

std::pair<Hamiltonian, TransitionMatrix> decode(const ParameterVector& params,
                                                const Topology& topo) {
  const ParameterLayout layout = make_layout(topo);
  if (params.h_free.size() != layout.h_dim() ||
      params.t_logits.size() != layout.t_dim()) {
    throw std::invalid_argument("decode: parameter sizes do not match the mask");
  }
  const int n = topo.n_network;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < layout.h_dim(); ++k) {
    const auto [i, j] = layout.h_entries[k];
    h(i, j) = h(j, i) = params.h_free[k];
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    const int begin = k;
    double top = -std::numeric_limits<double>::infinity();
    while (k < layout.t_dim() && layout.t_entries[k].second == j) {
      top = std::max(top, params.t_logits[k]);
      ++k;
    }
    double norm = 0.0;
    for (int q = begin; q < k; ++q) {
      norm += std::exp(params.t_logits[q] - top);
    }
    for (int q = begin; q < k; ++q) {
      t(layout.t_entries[q].first, j) = std::exp(params.t_logits[q] - top) / norm;
    }
  }
  return {make_hamiltonian(topo, h), make_transition_matrix(topo, t)};
}

Eigen::VectorXd encode_hamiltonian(const Topology& topo, const Hamiltonian& ham) {
  const ParameterLayout layout = make_layout(topo);
  Eigen::VectorXd h(layout.h_dim());
  for (int k = 0; k < layout.h_dim(); ++k) {
    h[k] = ham.h(layout.h_entries[k].first, layout.h_entries[k].second);
  }
  return h;
}

Eigen::VectorXd encode_transition_logits(const Topology& topo,
                                         const TransitionMatrix& trans) {
  const ParameterLayout layout = make_layout(topo);
  Eigen::VectorXd l(layout.t_dim());
  for (int k = 0; k < layout.t_dim(); ++k) {
    const auto [i, j] = layout.t_entries[k];
    l[k] = std::log(std::max(trans.t(i, j), 1e-18));
  }
  return l;
}

SinkResponse SinkResponse::build(const Topology& topo, const Hamiltonian& ham,
                                 const TransitionMatrix& trans, double p, double tau,
                                 double gamma) {
  if (tau < 0) throw std::invalid_argument("sink response: negative time");
  SinkResponse r;
  const int d_in = topo.input_size();

  if (p == 0.0) {
    // non-sink block: rho' = -i(H_eff rho - rho H_eff^+), H_eff = H - i Gamma S
    const int nn = topo.n_network;
    Eigen::MatrixXcd a = -kI * ham.h;
    for (const auto& [sinker, sink] : topo.sink_pairs) {
      a(sinker, sinker) -= gamma;
    }
    for (const auto& [sinker, sink] : topo.sink_pairs) {
      Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(nn, nn);
      q(sinker, sinker) = 1.0;
      const Eigen::MatrixXcd g = evolution_gramian(a, q, tau);
      r.weights_.push_back(2.0 * gamma * g.topLeftCorner(d_in, d_in));
    }
    return r;
  }

  const Liouvillian l = build_liouvillian(topo, ham, trans, p, gamma);
  const int n = topo.n_total;
  const Eigen::MatrixXcd e = expm((tau * l.l_tilde).eval());
  for (const auto& [sinker, sink] : topo.sink_pairs) {
    const auto row = e.row(sink + n * sink);
    Eigen::MatrixXcd w(d_in, d_in);
    for (int c = 0; c < d_in; ++c) {
      for (int rr = 0; rr < d_in; ++rr) w(rr, c) = std::conj(row[rr + n * c]);
    }
    r.weights_.push_back(std::move(w));
  }
  return r;
}

double SinkResponse::population(int m, const Eigen::MatrixXcd& input_state) const {
  const auto& w = weights_.at(m);
  const Eigen::Index d = input_state.rows();
  if (d > w.rows()) {
    throw std::invalid_argument("sink response: state exceeds input layer");
  }
  return w.topLeftCorner(d, d)
      .conjugate()
      .cwiseProduct(input_state)
      .sum()
      .real();
}

double SinkResponse::pc(const StateEnsemble& ensemble) const {
  if (ensemble.size() > n_sinks()) {
    throw std::invalid_argument("sink response: more states than sinks");
  }
  double pc = 0.0;
  for (int m = 0; m < ensemble.size(); ++m) {
    pc += ensemble.priors[m] * population(m, ensemble.states[m]);
  }
  return pc;
}

double objective(const ParameterVector& params, const Topology& topo, double p,
                 double tau, const StateEnsemble& ensemble) {
  const auto [ham, trans] = decode(params, topo);
  return SinkResponse::build(topo, ham, trans, p, tau).pc(ensemble);
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step, bool central) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  const double f0 = central ? 0.0 : f(x);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    xp[k] = x[k] + step;
    const double fp = f(xp);
    if (central) {
      xp[k] = x[k] - step;
      g[k] = (fp - f(xp)) / (2.0 * step);
    } else {
      g[k] = (fp - f0) / step;
    }
    xp[k] = x[k];
  }
  return g;
}

namespace {

struct LocalResult {
  Eigen::VectorXd x;
  double pc = 0.0;
  std::vector<double> history;
  bool converged = false;
};

// L-BFGS with backtracking line search on f = -P_c. Gradients are central
// finite differences; coordinates whose block cannot influence the
// objective ((1-p) = 0 kills H, p = 0 kills T) are held fixed.
LocalResult lbfgs_ascent(const std::function<double(const Eigen::VectorXd&)>& pc_of,
                         Eigen::VectorXd x, int h_dim, double p, int max_iters,
                         double tol, double fd_step) {
  const Eigen::Index dim = x.size();
  const bool h_active = p < 1.0;
  const bool t_active = p > 0.0;

  const auto grad_of = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd probe = at;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const bool active = k < h_dim ? h_active : t_active;
      if (!active) continue;
      probe[k] = at[k] + fd_step;
      const double fp = pc_of(probe);
      probe[k] = at[k] - fd_step;
      const double fm = pc_of(probe);
      probe[k] = at[k];
      g[k] = -(fp - fm) / (2.0 * fd_step);  // gradient of -P_c
    }
    return g;
  };

  LocalResult out;
  double f = -pc_of(x);
  Eigen::VectorXd g = grad_of(x);
  out.history.push_back(-f);

  const int mem = 10;
  std::vector<Eigen::VectorXd> s_list, y_list;
  std::vector<double> rho_list;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (g.lpNorm<Eigen::Infinity>() < 1e-12) {
      out.converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd q = g;
    const int m = static_cast<int>(s_list.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho_list[i] * s_list[i].dot(q);
      q -= alpha[i] * y_list[i];
    }
    if (m > 0) {
      const double gamma = s_list.back().dot(y_list.back()) /
                           y_list.back().squaredNorm();
      q *= gamma;
    }
    for (int i = 0; i < m; ++i) {
      const double beta = rho_list[i] * y_list[i].dot(q);
      q += (alpha[i] - beta) * s_list[i];
    }
    Eigen::VectorXd dir = -q;
    if (dir.dot(g) >= 0) dir = -g;  // safeguard: fall back to steepest descent

    const double slope = dir.dot(g);
    double step = 1.0;
    double f_new = f;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = x + step * dir;
      f_new = -pc_of(x_new);
      if (f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no improving step along the model direction
      break;
    }

    Eigen::VectorXd g_new = grad_of(x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_list.push_back(s);
      y_list.push_back(y);
      rho_list.push_back(1.0 / sy);
      if (static_cast<int>(s_list.size()) > mem) {
        s_list.erase(s_list.begin());
        y_list.erase(y_list.begin());
        rho_list.erase(rho_list.begin());
      }
    }

    const double improvement = f - f_new;
    x = std::move(x_new);
    f = f_new;
    g = std::move(g_new);
    out.history.push_back(-f);
    if (improvement < tol * std::max(1.0, std::abs(f))) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.pc = -f;
  return out;
}

}  // namespace

OptimizationResult maximize(const Topology& topo, double p, double tau,
                            const StateEnsemble& ensemble,
                            const OptimizeConfig& config) {
  if (config.restarts < 1) throw std::invalid_argument("maximize: restarts >= 1");
  const ParameterLayout layout = make_layout(topo);
  const int h_dim = layout.h_dim();
  const int dim = h_dim + layout.t_dim();

  const auto pc_of = [&](const Eigen::VectorXd& x) {
    return objective(from_flat(x, layout), topo, p, tau, ensemble);
  };

  std::vector<LocalResult> results(config.restarts);
  const auto run_restart = [&](int r) {
    Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd x0(dim);
    for (int k = 0; k < h_dim; ++k) x0[k] = rng.uniform(-1.0, 1.0);
    for (int k = h_dim; k < dim; ++k) {
      // restart 0 starts from the classical walk T = A D^{-1} (flat logits)
      x0[k] = r == 0 ? 0.0 : rng.uniform(-1.0, 1.0);
    }
    results[r] = lbfgs_ascent(pc_of, std::move(x0), h_dim, p, config.max_iters,
                              config.tol, config.fd_step);
  };

  int threads = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, config.restarts));
  if (threads == 1) {
    for (int r = 0; r < config.restarts; ++r) run_restart(r);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < config.restarts; r = next.fetch_add(1)) {
          run_restart(r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  int best = 0;
  for (int r = 1; r < config.restarts; ++r) {
    if (results[r].pc > results[best].pc) best = r;  // first maximum wins ties
  }

  auto [ham, trans] = decode(from_flat(results[best].x, layout), topo);
  OptimizationResult out;
  out.best_h = std::move(ham);
  out.best_t = std::move(trans);
  out.best_pc = results[best].pc;
  out.history = std::move(results[best].history);
  out.restarts_used = config.restarts;
  out.converged = results[best].converged;
  return out;
}

}  // namespace qsd
