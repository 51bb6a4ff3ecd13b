#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qsd {

// Layered network description parsed from strings like "2r-2r-2".
// The last layer is the sink layer; an `r` suffix marks a layer whose
// intra-layer links are removed.
struct ModelSpec {
  std::vector<int> layer_sizes;
  std::vector<bool> reduced;  // one flag per non-sink layer

  bool operator==(const ModelSpec&) const = default;
};

ModelSpec parse_model_spec(const std::string& text);
std::string format_model_spec(const ModelSpec& spec);

// Node numbering is layer-major: input layer first, sinks last.
// `mask` covers the non-sink nodes only and is symmetric with a false
// diagonal; sinks connect to the network only through directed
// sinker->sink arcs listed in `sink_pairs`.
struct Topology {
  ModelSpec spec;
  int n_total = 0;
  int n_network = 0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::vector<std::pair<int, int>> sink_pairs;  // (sinker, sink), 0-based
  std::vector<int> layer_of;                    // node -> layer index

  int n_sinks() const { return static_cast<int>(sink_pairs.size()); }
  int input_size() const { return spec.layer_sizes.front(); }
};

Topology build_topology(const ModelSpec& spec);
inline Topology build_topology(const std::string& text) {
  return build_topology(parse_model_spec(text));
}

// T = A D^{-1}: column-stochastic walk matrix of the unweighted mask.
// Used as the optimizer's default transition-matrix initialization.
Eigen::MatrixXd classical_transition_from_adjacency(
    const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask);

}  // namespace qsd
