#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thermo/digraph.hpp"
#include "thermo/potentials.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

struct EstimateParams {
  std::optional<int> n;
  std::optional<int> N;
  std::optional<int> eps_exp;  // epsilon = 2^-eps_exp
  std::optional<double> alpha;
  std::optional<double> rho;
  std::optional<int> depth;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

struct PressureEstimate {
  double value = 0.0;
  std::string method;
  EstimateParams params;
  std::optional<Bracket> bracket;
  /// (n, partial value), sorted by n.
  std::vector<std::pair<int, double>> diagnostics;
  std::vector<std::string> notes;
};

/// Smallest m >= 0 with 2^-m <= epsilon.
int snap_epsilon(double epsilon);

/// Weighted block digraph of phi restricted to `sft` (a subsystem of
/// phi's system): nodes are admissible b-words, b = max(range - 1, 1); the
/// edge of a (b+1)-word carries phi at its first `range` symbols.
struct TransferGraph {
  WeightedDigraph graph;
  int block = 1;
  std::vector<std::vector<Symbol>> nodes;  // lexicographic
};

TransferGraph transfer_graph(const Sft& sft, const Potential& phi, const Limits& limits = {});

/// log spectral radius of the transfer matrix; max over irreducible
/// components for reducible systems. Throws ValidationError on an empty
/// system.
double perron_pressure(const Potential& phi, const Limits& limits = {});
double perron_pressure(const Sft& sft, const Potential& phi, const Limits& limits = {});

/// Perron pressure with the Collatz-Wielandt bracket of the winning
/// component (exact for a single self-loop component).
PressureEstimate perron_estimate(const Potential& phi, const Limits& limits = {});

/// (1/n) log sum over (n+m)-cylinders of exp(phi_n) at the lexicographically
/// least point; diagnostics for n' = 1..n.
PressureEstimate spanning_pressure(const Sft& sft, const PotentialSequence& seq, int eps_exp, int n,
                                   const Limits& limits = {});
PressureEstimate spanning_pressure(const Potential& phi, int eps_exp, int n, const Limits& limits = {});

/// As spanning, with the representative maximizing phi_n over the cylinder
/// (exact: all extensions are enumerated).
PressureEstimate separated_pressure(const Sft& sft, const PotentialSequence& seq, int eps_exp, int n,
                                    const Limits& limits = {});
PressureEstimate separated_pressure(const Potential& phi, int eps_exp, int n, const Limits& limits = {});

/// Diagnostics (N, (1/N) log sum_{Per(N)} exp S_N phi); value = max over the
/// last ceil(N_max/3) available entries. Requires an irreducible system.
PressureEstimate periodic_orbit_pressure(const Potential& phi, int N_max, const Limits& limits = {});

/// Critical a of inf over prefix-free cylinder covers of Z (lengths
/// <= depth) of sum exp(-a m(U) + phi(U)), where phi(U) is the sup of
/// phi_m over ambient points of U. Diagnostics: critical a per depth.
PressureEstimate caratheodory_pressure(const Sft& z, const PotentialSequence& seq, int depth,
                                       const Limits& limits = {});

/// Diagnostics (n, P(phi_n / n)) on `sft` for n = 1..n_max. Subadditive:
/// running inf; superadditive: running sup; additive: last entry.
/// Bracket: subadditive [h - L, value], superadditive [value, h + L],
/// additive [min, max] of the diagnostics, h = topological entropy.
PressureEstimate sequence_pressure(const Sft& sft, const PotentialSequence& seq, int n_max,
                                   const Limits& limits = {});

/// Topological entropy (perron pressure of zero).
double topological_entropy(const Sft& sft);

}  // namespace thermo
