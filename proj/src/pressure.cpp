#include "thermo/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log(sum exp(v)).
class LogSumExp {
 public:
  void add(double v) {
    if (v == kNegInf) return;
    if (v > top_) {
      sum_ = sum_ * std::exp(top_ - v) + 1.0;
      top_ = v;
    } else {
      sum_ += std::exp(v - top_);
    }
  }
  double value() const { return top_ == kNegInf ? kNegInf : top_ + std::log(sum_); }

 private:
  double top_ = kNegInf;
  double sum_ = 0.0;
};

double int_pow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::size_t word_index(std::span<const Symbol> w, int k) {
  std::size_t idx = 0;
  for (Symbol s : w) idx = idx * static_cast<std::size_t>(k) + static_cast<std::size_t>(s);
  return idx;
}

void require_subsystem(const Sft& sub, const Sft& ambient) {
  if (sub.alphabet_size() != ambient.alphabet_size() || !ambient.contains(sub)) {
    throw ValidationError("system is not a subsystem of the potential's system");
  }
}

void require_nonempty(const Sft& sft) {
  if (sft.empty()) throw ValidationError("pressure of an empty system");
}

struct CylinderSums {
  std::vector<std::pair<int, double>> spanning;
  std::vector<std::pair<int, double>> separated;
};

// One lexicographic pass per n': the first word carrying a given (n'+m)-prefix
// is that cylinder's least point, and the pass sees every extension.
CylinderSums cylinder_sums(const Sft& sft, const PotentialSequence& seq, int m, int n, const Limits& limits) {
  require_subsystem(sft, seq.system());
  require_nonempty(sft);
  if (n < 1) throw ValidationError("n must be >= 1");
  if (m < 0) throw ValidationError("epsilon exponent must be >= 0");
  CylinderSums out;
  for (int np = 1; np <= n; ++np) {
    const int prefix = np + m;
    const int length = np + std::max(m, seq.lookahead());
    LogSumExp span_acc, sep_acc;
    std::vector<Symbol> current;
    double best = kNegInf;
    bool open = false;
    for_each_word(
        sft, length,
        [&](std::span<const Symbol> w) {
          const auto head = w.first(static_cast<std::size_t>(prefix));
          const double v = seq(w, np);
          if (!open || !std::equal(head.begin(), head.end(), current.begin())) {
            if (open) sep_acc.add(best);
            current.assign(head.begin(), head.end());
            span_acc.add(v);
            best = v;
            open = true;
          } else {
            best = std::max(best, v);
          }
        },
        limits);
    if (open) sep_acc.add(best);
    out.spanning.emplace_back(np, span_acc.value() / np);
    out.separated.emplace_back(np, sep_acc.value() / np);
  }
  return out;
}

PressureEstimate cylinder_estimate(const Sft& sft, const PotentialSequence& seq, int m, int n,
                                   const Limits& limits, bool separated) {
  const auto sums = cylinder_sums(sft, seq, m, n, limits);
  PressureEstimate est;
  est.method = separated ? "separated" : "spanning";
  est.params.n = n;
  est.params.eps_exp = m;
  est.diagnostics = separated ? sums.separated : sums.spanning;
  est.value = est.diagnostics.back().second;
  est.bracket = Bracket{sums.spanning.back().second, sums.separated.back().second};
  return est;
}

}  // namespace

int snap_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
  int m = 0;
  while (std::ldexp(1.0, -m) > epsilon) ++m;
  return m;
}

TransferGraph transfer_graph(const Sft& sft, const Potential& phi, const Limits& limits) {
  require_subsystem(sft, phi.system());
  const int k = sft.alphabet_size();
  TransferGraph tg;
  tg.block = std::max(phi.range() - 1, 1);
  require_within_cap(int_pow(k, tg.block), limits, "transfer graph nodes");
  std::vector<int> id(static_cast<std::size_t>(int_pow(k, tg.block)), -1);
  for_each_word(
      sft, tg.block,
      [&](std::span<const Symbol> w) {
        id[word_index(w, k)] = static_cast<int>(tg.nodes.size());
        tg.nodes.emplace_back(w.begin(), w.end());
      },
      limits);
  std::vector<WeightedEdge> edges;
  const auto b = static_cast<std::size_t>(tg.block);
  for_each_word(
      sft, tg.block + 1,
      [&](std::span<const Symbol> w) {
        edges.push_back({id[word_index(w.first(b), k)], id[word_index(w.subspan(1), k)], phi(w)});
      },
      limits);
  tg.graph = WeightedDigraph(static_cast<int>(tg.nodes.size()), std::move(edges));
  return tg;
}

double perron_pressure(const Sft& sft, const Potential& phi, const Limits& limits) {
  require_nonempty(sft);
  const double p = log_spectral_radius(transfer_graph(sft, phi, limits).graph);
  if (p == kNegInf) throw ValidationError("system carries no cycle");
  return p;
}

double perron_pressure(const Potential& phi, const Limits& limits) {
  return perron_pressure(phi.system(), phi, limits);
}

PressureEstimate perron_estimate(const Potential& phi, const Limits& limits) {
  require_nonempty(phi.system());
  const auto g = transfer_graph(phi.system(), phi, limits).graph;
  PressureEstimate est;
  est.method = "perron";
  est.value = kNegInf;
  Bracket br{kNegInf, kNegInf};
  for (const auto& comp : g.components()) {
    if (!g.has_cycle_in(comp)) continue;
    double v = kNegInf, lo = kNegInf, hi = kNegInf;
    if (comp.size() == 1) {
      for (const auto& e : g.edges()) {
        if (e.from == comp.front() && e.to == comp.front()) v = lo = hi = e.log_weight;
      }
    } else {
      const auto r = perron_irreducible(g.induced(comp));
      v = r.log_radius;
      lo = r.lower;
      hi = r.upper;
    }
    if (v > est.value) est.value = v;
    br.lower = std::max(br.lower, lo);
    br.upper = std::max(br.upper, hi);
  }
  if (est.value == kNegInf) throw ValidationError("system carries no cycle");
  est.bracket = br;
  return est;
}

double topological_entropy(const Sft& sft) { return perron_pressure(Potential::constant(sft, 0.0)); }

PressureEstimate spanning_pressure(const Sft& sft, const PotentialSequence& seq, int eps_exp, int n,
                                   const Limits& limits) {
  return cylinder_estimate(sft, seq, eps_exp, n, limits, false);
}

PressureEstimate spanning_pressure(const Potential& phi, int eps_exp, int n, const Limits& limits) {
  return spanning_pressure(phi.system(), PotentialSequence::additive(phi), eps_exp, n, limits);
}

PressureEstimate separated_pressure(const Sft& sft, const PotentialSequence& seq, int eps_exp, int n,
                                    const Limits& limits) {
  return cylinder_estimate(sft, seq, eps_exp, n, limits, true);
}

PressureEstimate separated_pressure(const Potential& phi, int eps_exp, int n, const Limits& limits) {
  return separated_pressure(phi.system(), PotentialSequence::additive(phi), eps_exp, n, limits);
}

PressureEstimate periodic_orbit_pressure(const Potential& phi, int N_max, const Limits& limits) {
  const Sft& sft = phi.system();
  require_nonempty(sft);
  if (N_max < 1) throw ValidationError("N_max must be >= 1");
  if (!sft.is_irreducible()) throw ValidationError("periodic-orbit pressure needs an irreducible system");
  const int r = phi.range();
  PressureEstimate est;
  est.method = "periodic";
  est.params.N = N_max;
  std::vector<Symbol> window(static_cast<std::size_t>(r));
  for (int N = 1; N <= N_max; ++N) {
    LogSumExp acc;
    for_each_periodic(
        sft, N,
        [&](std::span<const Symbol> w) {
          double s = 0.0;
          for (int j = 0; j < N; ++j) {
            for (int i = 0; i < r; ++i) window[i] = w[(j + i) % N];
            s += phi(window);
          }
          acc.add(s);
        },
        limits);
    if (acc.value() != kNegInf) est.diagnostics.emplace_back(N, acc.value() / N);
  }
  if (est.diagnostics.empty()) throw ValidationError("no periodic points up to N_max");
  const int tail_start = N_max - (N_max + 2) / 3 + 1;
  est.value = kNegInf;
  for (const auto& [N, v] : est.diagnostics) {
    if (N >= tail_start) est.value = std::max(est.value, v);
  }
  if (est.value == kNegInf) {
    est.value = est.diagnostics.back().second;
    est.notes.push_back("no periods in the final third; last available entry used");
  }
  if (sft.period() > 1) {
    est.notes.push_back("period " + std::to_string(sft.period()) + ": only multiples carry points");
  }
  return est;
}

PressureEstimate caratheodory_pressure(const Sft& z, const PotentialSequence& seq, int depth,
                                       const Limits& limits) {
  const Sft& ambient = seq.system();
  require_subsystem(z, ambient);
  require_nonempty(z);
  if (depth < 1) throw ValidationError("depth must be >= 1");
  const int la = seq.lookahead();

  // Level m (index m-1): Z-words of length m, lexicographic; phi(U) is the
  // sup of phi_m over ambient points of U; parent[j] indexes level m-1.
  struct Level {
    std::vector<double> phi;
    std::vector<int> child_begin, child_end;
  };
  std::vector<Level> levels(static_cast<std::size_t>(depth));
  std::vector<std::vector<Symbol>> prev_words;
  for (int m = 1; m <= depth; ++m) {
    auto& lvl = levels[m - 1];
    std::vector<std::vector<Symbol>> words;
    for_each_word(
        z, m,
        [&](std::span<const Symbol> u) {
          words.emplace_back(u.begin(), u.end());
          double sup = kNegInf;
          if (la == 0) {
            sup = seq(u, m);
          } else {
            for_each_extension(ambient, u, m + la,
                               [&](std::span<const Symbol> w) { sup = std::max(sup, seq(w, m)); });
          }
          lvl.phi.push_back(sup);
        },
        limits);
    if (m > 1) {
      auto& up = levels[m - 2];
      up.child_begin.assign(prev_words.size(), 0);
      up.child_end.assign(prev_words.size(), 0);
      std::size_t p = 0;
      for (std::size_t j = 0; j < words.size(); ++j) {
        while (!std::equal(prev_words[p].begin(), prev_words[p].end(), words[j].begin())) ++p;
        if (up.child_end[p] == 0) up.child_begin[p] = static_cast<int>(j);
        up.child_end[p] = static_cast<int>(j) + 1;
      }
    }
    prev_words = std::move(words);
  }

  // log of the cheapest prefix-free cover using lengths <= d.
  auto log_cover = [&](double a, int d) {
    std::vector<double> below;
    for (int m = d; m >= 1; --m) {
      const auto& lvl = levels[m - 1];
      std::vector<double> cost(lvl.phi.size());
      for (std::size_t i = 0; i < lvl.phi.size(); ++i) {
        double c = -a * m + lvl.phi[i];
        if (m < d) {
          LogSumExp acc;
          for (int j = lvl.child_begin[i]; j < lvl.child_end[i]; ++j) acc.add(below[j]);
          c = std::min(c, acc.value());
        }
        cost[i] = c;
      }
      below = std::move(cost);
    }
    LogSumExp total;
    for (double c : below) total.add(c);
    return total.value();
  };

  PressureEstimate est;
  est.method = "caratheodory";
  est.params.depth = depth;
  double lo = -1.0, hi = 1.0;
  for (int d = 1; d <= depth; ++d) {
    lo = -1.0;
    hi = 1.0;
    int guard = 0;
    while (log_cover(lo, d) <= 0.0) {
      lo -= 2.0 * (hi - lo);
      if (++guard > 200) throw NumericalError("cannot bracket the critical value from below");
    }
    while (log_cover(hi, d) >= 0.0) {
      hi += 2.0 * (hi - lo);
      if (++guard > 400) throw NumericalError("cannot bracket the critical value from above");
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (log_cover(mid, d) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    est.diagnostics.emplace_back(d, 0.5 * (lo + hi));
  }
  est.value = est.diagnostics.back().second;
  est.bracket = Bracket{lo, hi};
  if (!(z == ambient)) {
    double z_count = static_cast<double>(levels.back().phi.size());
    double amb_count = 0.0;
    for_each_word(ambient, depth, [&](std::span<const Symbol>) { amb_count += 1.0; }, limits);
    if (z_count == amb_count) est.notes.push_back("depth too small to separate Z from the ambient system");
  }
  return est;
}

PressureEstimate sequence_pressure(const Sft& sft, const PotentialSequence& seq, int n_max,
                                   const Limits& limits) {
  require_subsystem(sft, seq.system());
  require_nonempty(sft);
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  PressureEstimate est;
  est.method = "sequence";
  est.params.n = n_max;
  for (int n = 1; n <= n_max; ++n) {
    est.diagnostics.emplace_back(n, perron_pressure(tabulate_average(sft, seq, n, limits), limits));
  }
  const double h = topological_entropy(sft);
  const double L = seq.bound();
  double lo = est.diagnostics.front().second, hi = lo;
  for (const auto& d : est.diagnostics) {
    lo = std::min(lo, d.second);
    hi = std::max(hi, d.second);
  }
  switch (seq.kind()) {
    case SequenceKind::subadditive:
      est.value = lo;
      est.bracket = Bracket{std::min(h - L, lo), lo};
      break;
    case SequenceKind::superadditive:
      est.value = hi;
      est.bracket = Bracket{hi, std::max(h + L, hi)};
      break;
    case SequenceKind::additive:
      est.value = est.diagnostics.back().second;
      est.bracket = Bracket{lo, hi};
      break;
  }
  return est;
}

}  // namespace thermo
