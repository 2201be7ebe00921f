#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "thermo/markov.hpp"
#include "thermo/potentials.hpp"
#include "thermo/pressure.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

/// -sum_ij pi_i P_ij log P_ij, with 0 log 0 = 0.
double entropy_rate(const MarkovMeasure& mu);

/// Exact sum over admissible range-words of cylinder mass times value.
/// mu must be supported on phi's system.
double integrate(const MarkovMeasure& mu, const Potential& phi, const Limits& limits = {});

/// h(mu) + integral of phi.
double free_energy(const MarkovMeasure& mu, const Potential& phi, const Limits& limits = {});

/// Gibbs chain of a locally constant potential, living on the block system
/// whose symbols are the b-words of the transfer graph (b = max(range-1, 1);
/// for range <= 2 this is the original system). The block potential is the
/// range-2 edge weight, so its integral equals that of phi.
struct EquilibriumResult {
  Sft block_system;
  int block_length = 1;
  std::vector<std::vector<Symbol>> blocks;
  MarkovMeasure measure;
  Potential block_potential;
  double free_energy = 0.0;
  double pressure = 0.0;
};

/// Requires an irreducible system (ValidationError otherwise).
EquilibriumResult equilibrium_measure(const Potential& phi, const Limits& limits = {});

/// Mass of an original-alphabet cylinder under the block-recoded measure.
double original_cylinder_mass(const EquilibriumResult& eq, std::span<const Symbol> word);

/// Maximum mean cycle of phi's transfer graph on `sft`. Throws
/// ValidationError if no cycle exists.
double max_mean_cycle(const Sft& sft, const Potential& phi, const Limits& limits = {});
double max_mean_cycle(const Potential& phi, const Limits& limits = {});

struct HyperbolicGap {
  PressureEstimate pressure;
  /// Subadditive/additive: min_n of max-mean-cycle(phi_n/n), an upper bound
  /// on sup_mu int Phi. Superadditive: max_n, a lower bound.
  double cycle_bound = 0.0;
  int cycle_bound_n = 0;
  std::string cycle_direction;
  /// Best average of phi_n/n along periodic orbits of period <= 8 at a long
  /// horizon: an estimate of sup_mu int Phi from ergodic cycle measures.
  double cycle_estimate = 0.0;
  double gap = 0.0;
  double tolerance = 1e-6;
  bool hyperbolic = false;
};

HyperbolicGap hyperbolic_gap(const Sft& sft, const PotentialSequence& seq, int n_max,
                             double tolerance = 1e-6, const Limits& limits = {});

/// (1/n) log of the least sum of exp S_n phi (at the least point of each
/// cylinder) over families of (n+m)-cylinders with mu-mass >= alpha.
/// Exact by branch and bound over classes of interchangeable cylinders when
/// the search finishes within budget; otherwise the greedy value is returned
/// with the LP lower bound as bracket and flagged as a heuristic upper bound.
PressureEstimate spanning_free_energy(const MarkovMeasure& mu, const Potential& phi, int eps_exp, int n,
                                      double alpha, const Limits& limits = {});

/// Cylinder indicator with target mass; a branch is generic when the cyclic
/// frequency of every test word in it is within rho of the target.
struct CylinderTest {
  Word word;
  double target = 0.0;
};

/// The first s words of length 1 then 2 (lexicographic) with their masses.
std::vector<CylinderTest> cylinder_tests(const EquilibriumResult& eq, int s = 4);

double cyclic_frequency(std::span<const Symbol> branch, std::span<const Symbol> word);

BranchSystem generic_branches(const BranchSystem& bs, const std::vector<CylinderTest>& tests, double rho);

/// Branch weights S_R phi along each branch orbit.
BranchSystem weigh_branches(BranchSystem bs, const Potential& phi);
BranchSystem weigh_branches(BranchSystem bs, const PotentialSequence& seq);

struct SandwichReport {
  std::size_t branches = 0;
  std::size_t generic = 0;
  double saturate = 0.0;
  double free_energy = 0.0;  // P_mu
  double L = 0.0;
  double rho = 0.0;
  /// 2 rho + 4 rho L
  double o = 0.0;
  /// |saturate - P_mu| <= o + rho |P_mu| / (1 + rho)
  double deviation = 0.0;
  double allowed = 0.0;
  bool holds = false;
  /// saturate in [(P_mu - o)/(1 + rho), P_mu + o]
  bool in_interval = false;
};

/// Builds the first-in-window horseshoe through `base` with window
/// [n, (1+rho) n], keeps the (rho, s)-generic branches for the equilibrium
/// measure of phi and compares the saturate pressure with P_mu(phi).
SandwichReport horseshoe_sandwich(const Potential& phi, const Word& base, int n, double rho, int s = 4,
                                  const Limits& limits = {});

struct BasicSetOptions {
  bool subsystems = true;
  int max_subsystems = -1;
  bool horseshoes = true;
  int horseshoe_n_lo = 2;
  int horseshoe_n_hi = 8;
  double rho = 1.0;
};

struct BasicSetResult {
  double value = 0.0;
  std::variant<Sft, BranchSystem> witness;
  std::string witness_label;
  /// Sequence pressure of the whole system.
  double full_pressure = 0.0;
  double gap = 0.0;
  std::vector<std::pair<std::string, double>> subsystem_values;
  /// (n, best saturate pressure over single-symbol bases)
  std::vector<std::pair<int, double>> horseshoe_values;
};

BasicSetResult sup_over_basic_sets(const Sft& sft, const PotentialSequence& seq, int n_max,
                                   const BasicSetOptions& options = {}, const Limits& limits = {});

}  // namespace thermo
