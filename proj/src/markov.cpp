#include "thermo/markov.hpp"

#include <cmath>
#include <string>

namespace thermo {

namespace {

constexpr double kTol = 1e-12;

void validate(const Eigen::MatrixXd& p, const Eigen::VectorXd& pi) {
  const auto k = p.rows();
  if (k == 0 || p.cols() != k) throw ValidationError("transition matrix must be square and non-empty");
  if (pi.size() != k) throw ValidationError("stationary vector length does not match transition matrix");
  if (!p.allFinite() || !pi.allFinite()) throw ValidationError("non-finite Markov data");
  if ((p.array() < 0.0).any()) throw ValidationError("negative transition probability");
  if ((pi.array() < 0.0).any()) throw ValidationError("negative stationary mass");
  if (std::abs(pi.sum() - 1.0) > kTol) throw ValidationError("stationary vector does not sum to 1");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (pi(i) > 0.0 && std::abs(p.row(i).sum() - 1.0) > kTol) {
      throw ValidationError("transition row " + std::to_string(i) + " does not sum to 1");
    }
  }
  const double defect = (pi.transpose() * p - pi.transpose()).cwiseAbs().maxCoeff();
  if (defect > kTol) {
    throw ValidationError("stationary vector is not invariant (|pi P - pi| = " +
                          std::to_string(defect) + ")");
  }
}

Eigen::VectorXd lazy_stationary(const Eigen::MatrixXd& p) {
  const auto k = p.rows();
  Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(k, 1.0 / static_cast<double>(k));
  for (int it = 0; it < 1'000'000; ++it) {
    Eigen::RowVectorXd next = 0.5 * (pi + pi * p);
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().maxCoeff();
    pi = next;
    if (delta < 1e-16) break;
  }
  return pi.transpose();
}

}  // namespace

MarkovMeasure::MarkovMeasure(Eigen::MatrixXd transition, Eigen::VectorXd stationary)
    : transition_(std::move(transition)), stationary_(std::move(stationary)) {}

MarkovMeasure MarkovMeasure::from_transition(Eigen::MatrixXd transition) {
  const auto k = transition.rows();
  if (k == 0 || transition.cols() != k) throw ValidationError("transition matrix must be square");
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd pi;
  if (lu.isInvertible()) {
    pi = lu.solve(rhs);
    pi = pi.cwiseMax(0.0);
    pi /= pi.sum();
  }
  auto invariant = [&](const Eigen::VectorXd& v) {
    return v.size() == k && v.allFinite() &&
           (v.transpose() * transition - v.transpose()).cwiseAbs().maxCoeff() <= kTol;
  };
  if (!invariant(pi)) pi = lazy_stationary(transition);
  // One refinement step absorbs LU rounding.
  Eigen::VectorXd refined = (pi.transpose() * transition).transpose();
  refined /= refined.sum();
  if (invariant(refined)) pi = refined;
  validate(transition, pi);
  return MarkovMeasure(std::move(transition), std::move(pi));
}

MarkovMeasure MarkovMeasure::from_transition(Eigen::MatrixXd transition, Eigen::VectorXd stationary) {
  validate(transition, stationary);
  return MarkovMeasure(std::move(transition), std::move(stationary));
}

MarkovMeasure MarkovMeasure::bernoulli(std::span<const double> probabilities) {
  const auto k = static_cast<Eigen::Index>(probabilities.size());
  Eigen::VectorXd pi(k);
  for (Eigen::Index i = 0; i < k; ++i) pi(i) = probabilities[static_cast<std::size_t>(i)];
  Eigen::MatrixXd p = pi.transpose().replicate(k, 1);
  return from_transition(std::move(p), std::move(pi));
}

MarkovMeasure MarkovMeasure::random(const Sft& sft, std::mt19937_64& rng) {
  const int k = sft.alphabet_size();
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    if (!sft.active(i)) {
      p(i, i) = 1.0;  // uncharged state; row only needs to be stochastic
      continue;
    }
    for (Symbol j : sft.successors(i)) p(i, j) = u(rng);
    p.row(i) /= p.row(i).sum();
  }
  // Inactive self-loops carry no stationary mass when sft is irreducible on
  // its active part, but a reducible chain may pick an arbitrary invariant
  // vector; that is still a valid invariant measure.
  return from_transition(std::move(p));
}

double MarkovMeasure::cylinder_mass(std::span<const Symbol> w) const {
  if (w.empty()) return 1.0;
  double m = stationary_(w[0]);
  for (std::size_t i = 0; i + 1 < w.size() && m > 0.0; ++i) m *= transition_(w[i], w[i + 1]);
  return m;
}

bool MarkovMeasure::supported_on(const Sft& sft) const {
  if (sft.alphabet_size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (stationary_(i) <= 0.0) continue;
    if (!sft.active(i)) return false;
    for (int j = 0; j < size(); ++j) {
      if (transition_(i, j) > 0.0 && !sft.allowed(i, j)) return false;
    }
  }
  return true;
}

}  // namespace thermo
