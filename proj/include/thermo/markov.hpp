#pragma once

#include <random>
#include <span>

#include <Eigen/Dense>

#include "thermo/symbolic.hpp"

namespace thermo {

/// Order-1 Markov measure: row-stochastic transition matrix and a stationary
/// vector. Higher-order measures are handled by block recoding.
///
/// Invariants: rows of states with positive stationary mass sum to 1 within
/// 1e-12, pi >= 0 sums to 1, and |pi P - pi|_inf <= 1e-12.
class MarkovMeasure {
 public:
  /// Stationary vector computed (LU, with a lazy-chain fallback for
  /// reducible chains) and verified.
  static MarkovMeasure from_transition(Eigen::MatrixXd transition);
  /// Given stationary vector verified against the invariants.
  static MarkovMeasure from_transition(Eigen::MatrixXd transition, Eigen::VectorXd stationary);
  static MarkovMeasure bernoulli(std::span<const double> probabilities);
  /// Uniformly random positive weights on the edges of `sft`, normalised.
  static MarkovMeasure random(const Sft& sft, std::mt19937_64& rng);

  int size() const { return static_cast<int>(stationary_.size()); }
  double transition(Symbol i, Symbol j) const { return transition_(i, j); }
  double stationary(Symbol i) const { return stationary_(i); }
  const Eigen::MatrixXd& transition_matrix() const { return transition_; }
  const Eigen::VectorXd& stationary_vector() const { return stationary_; }

  /// pi_{w0} * prod P_{w_i w_{i+1}}.
  double cylinder_mass(std::span<const Symbol> w) const;

  /// Positive transitions out of charged states are edges of `sft`.
  bool supported_on(const Sft& sft) const;

 private:
  MarkovMeasure(Eigen::MatrixXd transition, Eigen::VectorXd stationary);
  Eigen::MatrixXd transition_;
  Eigen::VectorXd stationary_;
};

}  // namespace thermo
