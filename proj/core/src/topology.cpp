#include "qsd/topology.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace qsd {

namespace {

int parse_layer_token(const std::string& tok, bool& reduced) {
  reduced = !tok.empty() && tok.back() == 'r';
  const std::string digits = reduced ? tok.substr(0, tok.size() - 1) : tok;
  if (digits.empty() ||
      digits.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("model spec: malformed token '" + tok + "'");
  }
  const long v = std::stol(digits);
  if (v <= 0 || v > 1'000'000) {
    throw std::invalid_argument("model spec: layer size out of range in '" + tok + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

ModelSpec parse_model_spec(const std::string& text) {
  ModelSpec spec;
  std::stringstream ss(text);
  std::string tok;
  std::vector<std::string> toks;
  while (std::getline(ss, tok, '-')) toks.push_back(tok);
  if (toks.size() < 3) {
    throw std::invalid_argument("model spec '" + text +
                                "': need input, intermediate and sink layers");
  }
  for (std::size_t i = 0; i < toks.size(); ++i) {
    bool reduced = false;
    const int size = parse_layer_token(toks[i], reduced);
    if (i + 1 == toks.size() && reduced) {
      throw std::invalid_argument("model spec '" + text +
                                  "': sink layer cannot be reduced");
    }
    spec.layer_sizes.push_back(size);
    if (i + 1 < toks.size()) spec.reduced.push_back(reduced);
  }
  return spec;
}

std::string format_model_spec(const ModelSpec& spec) {
  std::string out;
  for (std::size_t i = 0; i < spec.layer_sizes.size(); ++i) {
    if (i > 0) out += '-';
    out += std::to_string(spec.layer_sizes[i]);
    if (i + 1 < spec.layer_sizes.size() && spec.reduced[i]) out += 'r';
  }
  return out;
}

Topology build_topology(const ModelSpec& spec) {
  const std::size_t n_layers = spec.layer_sizes.size();
  if (n_layers < 3) {
    throw std::invalid_argument("topology: need at least 3 layers");
  }
  if (spec.reduced.size() != n_layers - 1) {
    throw std::invalid_argument("topology: one reduced flag per non-sink layer");
  }
  for (int s : spec.layer_sizes) {
    if (s <= 0) throw std::invalid_argument("topology: layer sizes must be positive");
  }
  const int n_sinks = spec.layer_sizes.back();
  const int last_inter = spec.layer_sizes[n_layers - 2];
  if (n_sinks > last_inter) {
    throw std::invalid_argument(
        "topology: more sinks than nodes in the last intermediate layer");
  }

  Topology topo;
  topo.spec = spec;
  topo.n_total = std::accumulate(spec.layer_sizes.begin(), spec.layer_sizes.end(), 0);
  topo.n_network = topo.n_total - n_sinks;
  topo.mask.setConstant(topo.n_network, topo.n_network, false);
  topo.layer_of.resize(topo.n_total);

  std::vector<int> layer_start(n_layers + 1, 0);
  for (std::size_t l = 0; l < n_layers; ++l) {
    layer_start[l + 1] = layer_start[l] + spec.layer_sizes[l];
    for (int k = layer_start[l]; k < layer_start[l + 1]; ++k) {
      topo.layer_of[k] = static_cast<int>(l);
    }
  }

  // default wiring: full intra-layer connectivity (unless reduced) plus
  // all-to-all links to the following layer; sinks only via sinker arcs
  for (std::size_t l = 0; l + 1 < n_layers; ++l) {
    if (!spec.reduced[l]) {
      for (int a = layer_start[l]; a < layer_start[l + 1]; ++a) {
        for (int b = a + 1; b < layer_start[l + 1]; ++b) {
          topo.mask(a, b) = topo.mask(b, a) = true;
        }
      }
    }
    if (l + 2 < n_layers) {
      for (int a = layer_start[l]; a < layer_start[l + 1]; ++a) {
        for (int b = layer_start[l + 1]; b < layer_start[l + 2]; ++b) {
          topo.mask(a, b) = topo.mask(b, a) = true;
        }
      }
    }
  }

  // i-th sink hangs off the i-th node of the last intermediate layer
  const int sinker_base = layer_start[n_layers - 2];
  const int sink_base = layer_start[n_layers - 1];
  for (int i = 0; i < n_sinks; ++i) {
    topo.sink_pairs.emplace_back(sinker_base + i, sink_base + i);
  }
  return topo;
}

Eigen::MatrixXd classical_transition_from_adjacency(
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  const Eigen::Index n = mask.rows();
  if (mask.cols() != n) throw std::invalid_argument("adjacency mask must be square");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::Index degree = 0;
    for (Eigen::Index i = 0; i < n; ++i) degree += mask(i, j) ? 1 : 0;
    if (degree == 0) {
      throw std::invalid_argument("isolated node: column " + std::to_string(j) +
                                  " of the mask is empty");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask(i, j)) t(i, j) = 1.0 / static_cast<double>(degree);
    }
  }
  return t;
}

}  // namespace qsd
