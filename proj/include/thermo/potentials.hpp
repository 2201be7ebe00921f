#pragma once

// Locally constant potentials, potential sequences (additive, subadditive,
// superadditive), matrix cocycles, Kingman averages and tempered-variation
// profiles.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thermo/markov.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

/// Potential depending on the first `range` symbols of a point. The table
/// covers exactly the admissible range-words of the owning subshift.
class Potential {
 public:
  using WordFunction = std::function<double(std::span<const Symbol>)>;

  static Potential constant(const Sft& sft, double c);
  /// Range-1 potential from per-symbol values (length = alphabet size).
  static Potential from_symbol_values(const Sft& sft, std::vector<double> values);
  static Potential tabulate(const Sft& sft, int range, const WordFunction& f,
                            const Limits& limits = {});
  /// Entries must cover every admissible word of length `range` exactly once
  /// and nothing else.
  static Potential from_entries(const Sft& sft, int range,
                                const std::vector<std::pair<Word, double>>& entries);
  /// Independent uniform values in [lo, hi] on admissible range-words.
  static Potential random(const Sft& sft, int range, std::mt19937_64& rng, double lo = -1.0,
                          double hi = 1.0);

  const Sft& system() const { return sft_; }
  int range() const { return range_; }

  /// Value at the first `range` symbols of `w`.
  double operator()(std::span<const Symbol> w) const;

  Potential shifted(double c) const;
  Potential scaled(double t) const;

  double max_value() const;
  double min_value() const;
  double sup_norm() const;

  /// Visits (word, value) for every admissible range-word, lexicographically.
  void for_each_entry(const std::function<void(std::span<const Symbol>, double)>& visit) const;

 private:
  Potential(Sft sft, int range, std::vector<double> values);
  std::size_t index(std::span<const Symbol> w) const;

  Sft sft_;
  int range_ = 1;
  std::vector<double> values_;  // k^range, NaN on inadmissible words
};

enum class Wrap {
  open,    // windows j = 0 .. |w| - range
  cyclic,  // |w| windows, wrapping around (w read as a periodic point)
};

/// Birkhoff sum of phi along w. Throws ValidationError when |w| < range.
double birkhoff_sum(const Potential& phi, std::span<const Symbol> w, Wrap wrap = Wrap::cyclic);

enum class SequenceKind { additive, subadditive, superadditive };

std::string to_string(SequenceKind kind);

struct SequenceAuditOptions {
  std::uint64_t seed = 0x5eedULL;
  int trials = 1000;
  int max_length = 12;  // n + m <= max_length
};

/// A sequence {phi_n}: phi_n reads the first n + lookahead symbols of a point.
/// The kind tag is declared by the caller and audited, never inferred.
class PotentialSequence {
 public:
  using Evaluator = std::function<double(std::span<const Symbol>, int)>;

  using AuditOptions = SequenceAuditOptions;

  /// Audited construction: throws ValidationError if a random (w, n, m)
  /// triple violates the declared inequality by more than 1e-12 (relative to
  /// magnitude) or |phi_n|/n exceeds the bound.
  static PotentialSequence make(const Sft& sft, SequenceKind kind, Evaluator evaluator,
                                double bound, int lookahead, std::string name,
                                const AuditOptions& audit = {});
  /// No audit; for diagnostics on sequences that carry no sub/superadditive
  /// structure.
  static PotentialSequence unchecked(const Sft& sft, SequenceKind kind, Evaluator evaluator,
                                     double bound, int lookahead, std::string name);
  /// phi_n = S_n phi, exact additive embedding.
  static PotentialSequence additive(const Potential& phi);

  /// phi_n(w); requires |w| >= n + lookahead.
  double operator()(std::span<const Symbol> w, int n) const;

  const Sft& system() const { return sft_; }
  SequenceKind kind() const { return kind_; }
  double bound() const { return bound_; }
  int lookahead() const { return lookahead_; }
  const std::string& name() const { return name_; }
  int symbols_needed(int n) const { return n + lookahead_; }

 private:
  PotentialSequence(Sft sft, SequenceKind kind, Evaluator evaluator, double bound, int lookahead,
                    std::string name);
  Sft sft_;
  SequenceKind kind_ = SequenceKind::additive;
  Evaluator evaluator_;
  double bound_ = 0.0;
  int lookahead_ = 0;
  std::string name_;
};

struct AuditReport {
  int triples = 0;
  /// Largest violation of the declared inequality (<= 0 means none).
  double worst_violation = 0.0;
  /// Largest |phi_n(w)| / (n L); must be <= 1.
  double worst_bound_ratio = 0.0;
};

/// Spot-checks the declared kind and the uniform bound on random admissible
/// triples. Never throws on violation; see PotentialSequence::make.
AuditReport audit(const PotentialSequence& seq, const PotentialSequence::AuditOptions& options = {});

/// Tabulates phi_n / n as a potential of range n + lookahead on `sft`
/// (which must be a subsystem of the sequence's system).
Potential tabulate_average(const Sft& sft, const PotentialSequence& seq, int n,
                           const Limits& limits = {});

// ---------------------------------------------------------------------------

/// Per-symbol square matrices of common dimension.
struct MatrixCocycle {
  std::vector<Eigen::MatrixXd> matrices;

  int dimension() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }
  /// A_{w_{n-1}} ... A_{w_0}.
  Eigen::MatrixXd product(std::span<const Symbol> w) const;
};

/// Largest singular value: cyclic Jacobi on B^T B, converged to 1e-15.
double spectral_norm(const Eigen::MatrixXd& b);

enum class NormSign { plus, minus };

/// phi_n(w) = +/- log ||A_{w_{n-1}} ... A_{w_0}||. Plus is subadditive, minus
/// superadditive; 1x1 cocycles are tagged additive. The bound is
/// max_i |log ||A_i||| + |log ||A_i^-1|||. Throws ValidationError on a
/// singular matrix (the bound needs every inverse) or a size mismatch.
PotentialSequence cocycle_norm_sequence(const Sft& sft, const MatrixCocycle& cocycle, NormSign sign);

// ---------------------------------------------------------------------------

struct KingmanProfile {
  /// a_n = (1/n) sum_w mu[w] phi_n(w), n = 1..n_max.
  std::vector<double> averages;
  /// Running inf (subadditive: upper bounds on the Kingman integral) or
  /// running sup (superadditive: lower bounds). Additive: the averages.
  std::vector<double> running;
};

KingmanProfile kingman_rate_integral(const PotentialSequence& seq, const MarkovMeasure& mu,
                                     int n_max, const Limits& limits = {});

struct TemperedRow {
  int n = 0;
  double gamma = 0.0;
  double gamma_over_n = 0.0;
  bool sampled = false;
};

struct TemperedProfile {
  std::vector<TemperedRow> rows;
  /// Largest gamma_n / n over the final third of rows.
  double tail_max = 0.0;
  bool tempered = false;
  /// Any row used sampling; then gamma_n is a lower bound.
  bool sampled = false;
};

/// gamma_n = max over n-cylinders of the oscillation of phi_n across the
/// cylinder's extensions to length max(depth, n + lookahead). Full
/// enumeration under the cap, otherwise 10^4 seeded random extensions per
/// cylinder (lexicographically least extension always included).
TemperedProfile tempered_variation_profile(const PotentialSequence& seq, int n_max, int depth,
                                           double tolerance = 0.05, std::uint64_t seed = 1,
                                           const Limits& limits = {});

}  // namespace thermo
