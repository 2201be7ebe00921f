#include "thermo/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double int_pow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

Potential::Potential(Sft sft, int range, std::vector<double> values)
    : sft_(std::move(sft)), range_(range), values_(std::move(values)) {}

std::size_t Potential::index(std::span<const Symbol> w) const {
  std::size_t idx = 0;
  const auto k = static_cast<std::size_t>(sft_.alphabet_size());
  for (int i = 0; i < range_; ++i) idx = idx * k + static_cast<std::size_t>(w[i]);
  return idx;
}

Potential Potential::tabulate(const Sft& sft, int range, const WordFunction& f, const Limits& limits) {
  if (range < 1) throw ValidationError("potential range must be >= 1");
  require_within_cap(int_pow(sft.alphabet_size(), range), limits,
                     "potential table of range " + std::to_string(range));
  Potential p(sft, range,
              std::vector<double>(static_cast<std::size_t>(int_pow(sft.alphabet_size(), range)), kNaN));
  for_each_word(
      sft, range,
      [&](std::span<const Symbol> w) {
        const double v = f(w);
        if (!std::isfinite(v)) throw ValidationError("potential value is not finite at " + to_string(w));
        p.values_[p.index(w)] = v;
      },
      limits);
  return p;
}

Potential Potential::constant(const Sft& sft, double c) {
  return tabulate(sft, 1, [c](std::span<const Symbol>) { return c; });
}

Potential Potential::from_symbol_values(const Sft& sft, std::vector<double> values) {
  if (static_cast<int>(values.size()) != sft.alphabet_size()) {
    throw ValidationError("need one value per symbol");
  }
  return tabulate(sft, 1, [&](std::span<const Symbol> w) { return values[w[0]]; });
}

Potential Potential::from_entries(const Sft& sft, int range,
                                  const std::vector<std::pair<Word, double>>& entries) {
  if (range < 1) throw ValidationError("potential range must be >= 1");
  require_within_cap(int_pow(sft.alphabet_size(), range), Limits{}, "potential table");
  Potential p(sft, range,
              std::vector<double>(static_cast<std::size_t>(int_pow(sft.alphabet_size(), range)), kNaN));
  for (const auto& [word, value] : entries) {
    if (static_cast<int>(word.size()) != range) {
      throw ValidationError("potential entry '" + word.str() + "' does not have length " +
                            std::to_string(range));
    }
    if (!sft.admissible(word.symbols())) {
      throw ValidationError("potential entry '" + word.str() + "' is not admissible");
    }
    if (!std::isfinite(value)) throw ValidationError("potential entry '" + word.str() + "' is not finite");
    auto& slot = p.values_[p.index(word.symbols())];
    if (!std::isnan(slot)) throw ValidationError("duplicate potential entry '" + word.str() + "'");
    slot = value;
  }
  for_each_word(sft, range, [&](std::span<const Symbol> w) {
    if (std::isnan(p.values_[p.index(w)])) {
      throw ValidationError("potential table misses admissible word '" + to_string(w) + "'");
    }
  });
  return p;
}

Potential Potential::random(const Sft& sft, int range, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return tabulate(sft, range, [&](std::span<const Symbol>) { return u(rng); });
}

double Potential::operator()(std::span<const Symbol> w) const {
  if (static_cast<int>(w.size()) < range_) {
    throw ValidationError("word shorter than potential range");
  }
  const double v = values_[index(w)];
  if (std::isnan(v)) throw ValidationError("potential evaluated on inadmissible word " + to_string(w.first(range_)));
  return v;
}

Potential Potential::shifted(double c) const {
  Potential p = *this;
  for (auto& v : p.values_) v += c;  // NaN stays NaN
  return p;
}

Potential Potential::scaled(double t) const {
  Potential p = *this;
  for (auto& v : p.values_) v *= t;
  return p;
}

double Potential::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) {
    if (!std::isnan(v)) m = std::max(m, v);
  }
  return m;
}

double Potential::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) {
    if (!std::isnan(v)) m = std::min(m, v);
  }
  return m;
}

double Potential::sup_norm() const { return std::max(std::abs(max_value()), std::abs(min_value())); }

void Potential::for_each_entry(const std::function<void(std::span<const Symbol>, double)>& visit) const {
  for_each_word(sft_, range_, [&](std::span<const Symbol> w) { visit(w, values_[index(w)]); });
}

double birkhoff_sum(const Potential& phi, std::span<const Symbol> w, Wrap wrap) {
  const int r = phi.range();
  const int len = static_cast<int>(w.size());
  if (len < r) throw ValidationError("word shorter than potential range");
  double sum = 0.0;
  if (wrap == Wrap::open) {
    for (int j = 0; j + r <= len; ++j) sum += phi(w.subspan(static_cast<std::size_t>(j)));
    return sum;
  }
  std::vector<Symbol> window(static_cast<std::size_t>(r));
  for (int j = 0; j < len; ++j) {
    for (int i = 0; i < r; ++i) window[i] = w[(j + i) % len];
    sum += phi(window);
  }
  return sum;
}

// ---------------------------------------------------------------------------

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::additive: return "additive";
    case SequenceKind::subadditive: return "subadditive";
    case SequenceKind::superadditive: return "superadditive";
  }
  return "?";
}

PotentialSequence::PotentialSequence(Sft sft, SequenceKind kind, Evaluator evaluator, double bound,
                                     int lookahead, std::string name)
    : sft_(std::move(sft)),
      kind_(kind),
      evaluator_(std::move(evaluator)),
      bound_(bound),
      lookahead_(lookahead),
      name_(std::move(name)) {
  if (!evaluator_) throw ValidationError("potential sequence needs an evaluator");
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) throw ValidationError("sequence bound L must be finite and >= 0");
  if (lookahead_ < 0) throw ValidationError("lookahead must be >= 0");
}

PotentialSequence PotentialSequence::unchecked(const Sft& sft, SequenceKind kind, Evaluator evaluator,
                                               double bound, int lookahead, std::string name) {
  return PotentialSequence(sft, kind, std::move(evaluator), bound, lookahead, std::move(name));
}

PotentialSequence PotentialSequence::make(const Sft& sft, SequenceKind kind, Evaluator evaluator,
                                          double bound, int lookahead, std::string name,
                                          const AuditOptions& options) {
  PotentialSequence seq(sft, kind, std::move(evaluator), bound, lookahead, std::move(name));
  const auto report = audit(seq, options);
  if (report.worst_violation > 1e-12) {
    throw ValidationError("sequence '" + seq.name_ + "' fails its " + to_string(kind) +
                          " audit (violation " + std::to_string(report.worst_violation) + ")");
  }
  if (report.worst_bound_ratio > 1.0 + 1e-12) {
    throw ValidationError("sequence '" + seq.name_ + "' exceeds its declared bound L (|phi_n|/(nL) = " +
                          std::to_string(report.worst_bound_ratio) + ")");
  }
  return seq;
}

PotentialSequence PotentialSequence::additive(const Potential& phi) {
  const int la = phi.range() - 1;
  return PotentialSequence(
      phi.system(), SequenceKind::additive,
      [phi, la](std::span<const Symbol> w, int n) {
        return birkhoff_sum(phi, w.first(static_cast<std::size_t>(n + la)), Wrap::open);
      },
      phi.sup_norm(), la, "additive");
}

double PotentialSequence::operator()(std::span<const Symbol> w, int n) const {
  if (n < 1) throw ValidationError("sequence index n must be >= 1");
  if (static_cast<int>(w.size()) < n + lookahead_) {
    throw ValidationError("word too short for phi_" + std::to_string(n));
  }
  return evaluator_(w, n);
}

AuditReport audit(const PotentialSequence& seq, const PotentialSequence::AuditOptions& options) {
  AuditReport report;
  if (seq.system().empty()) return report;
  std::mt19937_64 rng(options.seed);
  const int half = std::max(1, options.max_length / 2);
  std::uniform_int_distribution<int> len(1, half);
  const double L = seq.bound();
  auto bound_ratio = [&](double v, int n) {
    if (L == 0.0) return std::abs(v) > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::abs(v) / (n * L);
  };
  for (int t = 0; t < options.trials; ++t) {
    const int n = len(rng), m = len(rng);
    const auto w = random_extension(seq.system(), {}, n + m + seq.lookahead(), rng);
    std::span<const Symbol> ws(w);
    const double whole = seq(ws, n + m);
    const double head = seq(ws, n);
    const double tail = seq(ws.subspan(static_cast<std::size_t>(n)), m);
    const double scale = std::max({1.0, std::abs(whole), std::abs(head) + std::abs(tail)});
    double violation = 0.0;
    switch (seq.kind()) {
      case SequenceKind::subadditive: violation = whole - (head + tail); break;
      case SequenceKind::superadditive: violation = (head + tail) - whole; break;
      case SequenceKind::additive: violation = std::abs(whole - (head + tail)); break;
    }
    report.worst_violation = std::max(report.worst_violation, violation / scale);
    report.worst_bound_ratio =
        std::max({report.worst_bound_ratio, bound_ratio(whole, n + m), bound_ratio(head, n), bound_ratio(tail, m)});
    ++report.triples;
  }
  return report;
}

Potential tabulate_average(const Sft& sft, const PotentialSequence& seq, int n, const Limits& limits) {
  if (!seq.system().contains(sft)) {
    throw ValidationError("subsystem is not contained in the sequence's system");
  }
  return Potential::tabulate(
      sft, seq.symbols_needed(n), [&](std::span<const Symbol> w) { return seq(w, n) / n; }, limits);
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd MatrixCocycle::product(std::span<const Symbol> w) const {
  const int d = dimension();
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(d, d);
  for (Symbol s : w) p = matrices.at(static_cast<std::size_t>(s)) * p;
  return p;
}

double spectral_norm(const Eigen::MatrixXd& b) {
  if (b.size() == 0) return 0.0;
  if (b.size() == 1) return std::abs(b(0, 0));
  const double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const Eigen::MatrixXd c = b / scale;
  Eigen::MatrixXd s = c.transpose() * c;
  const auto d = s.rows();
  // Cyclic Jacobi rotations until the off-diagonal part is negligible.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        total += s(i, j) * s(i, j);
        if (i != j) off += s(i, j) * s(i, j);
      }
    }
    if (off <= 1e-30 * total) break;
    for (Eigen::Index p = 0; p < d - 1; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        if (s(p, q) == 0.0) continue;
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cs = 1.0 / std::sqrt(t * t + 1.0), sn = t * cs;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double skp = s(k, p), skq = s(k, q);
          s(k, p) = cs * skp - sn * skq;
          s(k, q) = sn * skp + cs * skq;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const double spk = s(p, k), sqk = s(q, k);
          s(p, k) = cs * spk - sn * sqk;
          s(q, k) = sn * spk + cs * sqk;
        }
      }
    }
  }
  return scale * std::sqrt(std::max(0.0, s.diagonal().maxCoeff()));
}

PotentialSequence cocycle_norm_sequence(const Sft& sft, const MatrixCocycle& cocycle, NormSign sign) {
  const int k = sft.alphabet_size();
  if (static_cast<int>(cocycle.matrices.size()) != k) {
    throw ValidationError("cocycle needs one matrix per symbol (" + std::to_string(k) + ")");
  }
  const int d = cocycle.dimension();
  if (d < 1) throw ValidationError("cocycle dimension must be positive");
  double bound = 0.0;
  for (int s = 0; s < k; ++s) {
    const auto& a = cocycle.matrices[static_cast<std::size_t>(s)];
    if (a.rows() != d || a.cols() != d) throw ValidationError("cocycle matrices must share one square shape");
    if (!a.allFinite()) throw ValidationError("cocycle matrix has non-finite entries");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
      throw ValidationError("cocycle matrix for symbol " + std::to_string(s) + " is singular");
    }
    const double n_a = spectral_norm(a), n_inv = spectral_norm(lu.inverse());
    bound = std::max(bound, std::abs(std::log(n_a)) + std::abs(std::log(n_inv)));
  }
  const double sgn = sign == NormSign::plus ? 1.0 : -1.0;
  SequenceKind kind = sign == NormSign::plus ? SequenceKind::subadditive : SequenceKind::superadditive;
  if (d == 1) kind = SequenceKind::additive;
  auto eval = [cocycle, sgn](std::span<const Symbol> w, int n) {
    return sgn * std::log(spectral_norm(cocycle.product(w.first(static_cast<std::size_t>(n)))));
  };
  return PotentialSequence::make(sft, kind, eval, bound, 0,
                                 std::string(sign == NormSign::plus ? "+" : "-") + "log-norm cocycle");
}

// ---------------------------------------------------------------------------

KingmanProfile kingman_rate_integral(const PotentialSequence& seq, const MarkovMeasure& mu, int n_max,
                                     const Limits& limits) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (!mu.supported_on(seq.system())) {
    throw ValidationError("Markov measure is not supported on the sequence's subshift");
  }
  KingmanProfile out;
  for (int n = 1; n <= n_max; ++n) {
    double acc = 0.0;
    for_each_word(
        seq.system(), seq.symbols_needed(n),
        [&](std::span<const Symbol> w) {
          const double mass = mu.cylinder_mass(w);
          if (mass > 0.0) acc += mass * seq(w, n);
        },
        limits);
    const double a = acc / n;
    out.averages.push_back(a);
    if (out.running.empty()) {
      out.running.push_back(a);
    } else if (seq.kind() == SequenceKind::subadditive) {
      out.running.push_back(std::min(out.running.back(), a));
    } else if (seq.kind() == SequenceKind::superadditive) {
      out.running.push_back(std::max(out.running.back(), a));
    } else {
      out.running.push_back(a);
    }
  }
  return out;
}

TemperedProfile tempered_variation_profile(const PotentialSequence& seq, int n_max, int depth,
                                           double tolerance, std::uint64_t seed, const Limits& limits) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (depth < n_max) throw ValidationError("depth must be >= n_max");
  const Sft& sft = seq.system();
  const int k = sft.alphabet_size();
  std::mt19937_64 rng(seed);
  TemperedProfile out;
  for (int n = 1; n <= n_max; ++n) {
    const int ext = std::max(depth, seq.symbols_needed(n));
    TemperedRow row{n, 0.0, 0.0, false};
    const double full = int_pow(sft.active_count(), ext);
    if (full <= static_cast<double>(limits.enumeration_cap)) {
      require_within_cap(int_pow(k, n), limits, "cylinder index");
      const std::size_t cells = static_cast<std::size_t>(int_pow(k, n));
      std::vector<double> lo(cells, std::numeric_limits<double>::infinity());
      std::vector<double> hi(cells, -std::numeric_limits<double>::infinity());
      for_each_word(
          sft, ext,
          [&](std::span<const Symbol> w) {
            std::size_t idx = 0;
            for (int i = 0; i < n; ++i) idx = idx * static_cast<std::size_t>(k) + static_cast<std::size_t>(w[i]);
            const double v = seq(w, n);
            lo[idx] = std::min(lo[idx], v);
            hi[idx] = std::max(hi[idx], v);
          },
          limits);
      for (std::size_t i = 0; i < cells; ++i) {
        if (hi[i] >= lo[i]) row.gamma = std::max(row.gamma, hi[i] - lo[i]);
      }
    } else {
      row.sampled = true;
      constexpr int kSamples = 10'000;
      for_each_word(
          sft, n,
          [&](std::span<const Symbol> c) {
            const auto first = lexmin_extension(sft, c, ext);
            double lo = seq(first, n), hi = lo;
            for (int s = 0; s < kSamples; ++s) {
              const double v = seq(random_extension(sft, c, ext, rng), n);
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
            row.gamma = std::max(row.gamma, hi - lo);
          },
          limits);
    }
    row.gamma_over_n = row.gamma / n;
    out.sampled = out.sampled || row.sampled;
    out.rows.push_back(row);
  }
  const int tail = (n_max + 2) / 3;
  for (int i = n_max - tail; i < n_max; ++i) out.tail_max = std::max(out.tail_max, out.rows[i].gamma_over_n);
  out.tempered = out.tail_max <= tolerance;
  return out;
}

}  // namespace thermo
