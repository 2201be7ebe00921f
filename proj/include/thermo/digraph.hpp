#pragma once

// Sparse weighted digraphs with log-domain edge weights: the transfer graphs
// on which pressures, Perron data and maximum cycle means are computed.

#include <vector>

namespace thermo {

struct WeightedEdge {
  int from = 0;
  int to = 0;
  double log_weight = 0.0;
};

class WeightedDigraph {
 public:
  WeightedDigraph() = default;
  WeightedDigraph(int nodes, std::vector<WeightedEdge> edges);

  int node_count() const { return n_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  /// Strongly connected components (Kosaraju), as sorted node lists, in
  /// order of their smallest node. Singletons without a self loop included.
  std::vector<std::vector<int>> components() const;

  /// Subgraph induced by `nodes` (renumbered in the given order).
  WeightedDigraph induced(const std::vector<int>& nodes) const;

  bool has_cycle_in(const std::vector<int>& component) const;

 private:
  int n_ = 0;
  std::vector<WeightedEdge> edges_;
};

struct PerronResult {
  double log_radius = 0.0;
  /// Collatz-Wielandt bounds on log_radius at termination.
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
  std::vector<double> right;  // positive, max entry 1
  std::vector<double> left;   // positive, max entry 1 (only if requested)
};

/// Log spectral radius of an irreducible graph's weight matrix
/// M_ij = exp(log_weight). Shifted power iteration, stopped when the
/// Collatz-Wielandt bracket is below `tol` in log scale.
/// Throws NumericalError if the graph is not strongly connected or the
/// iteration stalls.
PerronResult perron_irreducible(const WeightedDigraph& g, bool want_left = false,
                                double tol = 1e-13);

/// Max over cycle-carrying components of the log spectral radius; -inf if
/// the graph is acyclic.
double log_spectral_radius(const WeightedDigraph& g);

/// Maximum over cycles of mean edge weight (Karp per component).
/// -inf if the graph is acyclic.
double max_cycle_mean(const WeightedDigraph& g);

}  // namespace thermo
