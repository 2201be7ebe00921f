#include "thermo/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double entropy_rate(const MarkovMeasure& mu) {
  double h = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    const double pi = mu.stationary(i);
    if (pi <= 0.0) continue;
    for (int j = 0; j < mu.size(); ++j) {
      const double p = mu.transition(i, j);
      if (p > 0.0) h -= pi * p * std::log(p);
    }
  }
  return h;
}

double integrate(const MarkovMeasure& mu, const Potential& phi, const Limits& limits) {
  if (!mu.supported_on(phi.system())) {
    throw ValidationError("Markov measure is not supported on the potential's system");
  }
  double acc = 0.0;
  for_each_word(
      phi.system(), phi.range(),
      [&](std::span<const Symbol> w) {
        const double m = mu.cylinder_mass(w);
        if (m > 0.0) acc += m * phi(w);
      },
      limits);
  return acc;
}

double free_energy(const MarkovMeasure& mu, const Potential& phi, const Limits& limits) {
  return entropy_rate(mu) + integrate(mu, phi, limits);
}

EquilibriumResult equilibrium_measure(const Potential& phi, const Limits& limits) {
  const Sft& sft = phi.system();
  if (sft.empty() || !sft.is_irreducible()) {
    throw ValidationError("equilibrium measure needs an irreducible system");
  }
  auto tg = transfer_graph(sft, phi, limits);
  const int v = tg.graph.node_count();
  require_within_cap(static_cast<double>(v) * v, limits, "block transition matrix");
  const auto perron = perron_irreducible(tg.graph, true);

  std::vector<std::uint8_t> trans(static_cast<std::size_t>(v) * v, 0);
  std::vector<double> weight(static_cast<std::size_t>(v) * v, 0.0);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(v, v);
  for (const auto& e : tg.graph.edges()) {
    trans[static_cast<std::size_t>(e.from) * v + e.to] = 1;
    weight[static_cast<std::size_t>(e.from) * v + e.to] = e.log_weight;
    p(e.from, e.to) = std::exp(e.log_weight - perron.log_radius) * perron.right[e.to] / perron.right[e.from];
  }
  for (int i = 0; i < v; ++i) p.row(i) /= p.row(i).sum();

  Sft block(v, std::move(trans));
  auto block_phi = Potential::tabulate(block, 2, [&](std::span<const Symbol> w) {
    return weight[static_cast<std::size_t>(w[0]) * v + w[1]];
  });
  auto mu = MarkovMeasure::from_transition(std::move(p));
  const double fe = free_energy(mu, block_phi, limits);
  return EquilibriumResult{std::move(block), tg.block, std::move(tg.nodes), std::move(mu), std::move(block_phi),
                           fe, perron.log_radius};
}

double original_cylinder_mass(const EquilibriumResult& eq, std::span<const Symbol> word) {
  const auto b = static_cast<std::size_t>(eq.block_length);
  if (word.size() <= b) {
    double m = 0.0;
    for (std::size_t i = 0; i < eq.blocks.size(); ++i) {
      if (std::equal(word.begin(), word.end(), eq.blocks[i].begin())) m += eq.measure.stationary(static_cast<Symbol>(i));
    }
    return m;
  }
  auto find = [&](std::size_t at) -> int {
    const auto piece = word.subspan(at, b);
    auto it = std::lower_bound(eq.blocks.begin(), eq.blocks.end(), piece, [](const auto& blk, const auto& key) {
      return std::lexicographical_compare(blk.begin(), blk.end(), key.begin(), key.end());
    });
    if (it == eq.blocks.end() || !std::equal(piece.begin(), piece.end(), it->begin())) return -1;
    return static_cast<int>(it - eq.blocks.begin());
  };
  int cur = find(0);
  if (cur < 0) return 0.0;
  double m = eq.measure.stationary(cur);
  for (std::size_t i = 1; i + b <= word.size() && m > 0.0; ++i) {
    const int next = find(i);
    if (next < 0) return 0.0;
    m *= eq.measure.transition(cur, next);
    cur = next;
  }
  return m;
}

double max_mean_cycle(const Sft& sft, const Potential& phi, const Limits& limits) {
  if (sft.empty()) throw ValidationError("maximum mean cycle of an empty system");
  const double v = max_cycle_mean(transfer_graph(sft, phi, limits).graph);
  if (v == kNegInf) throw ValidationError("block digraph is acyclic");
  return v;
}

double max_mean_cycle(const Potential& phi, const Limits& limits) {
  return max_mean_cycle(phi.system(), phi, limits);
}

HyperbolicGap hyperbolic_gap(const Sft& sft, const PotentialSequence& seq, int n_max, double tolerance,
                             const Limits& limits) {
  HyperbolicGap out;
  out.tolerance = tolerance;
  out.pressure = sequence_pressure(sft, seq, n_max, limits);
  const bool super = seq.kind() == SequenceKind::superadditive;
  out.cycle_direction = super ? "lower bound on sup_mu int Phi" : "upper bound on sup_mu int Phi";
  for (int n = 1; n <= n_max; ++n) {
    const double m = max_mean_cycle(sft, tabulate_average(sft, seq, n, limits), limits);
    const bool better = n == 1 || (super ? m > out.cycle_bound : m < out.cycle_bound);
    if (better) {
      out.cycle_bound = m;
      out.cycle_bound_n = n;
    }
  }
  // Ergodic averages along short periodic orbits, read at a long horizon.
  out.cycle_estimate = kNegInf;
  const int la = seq.lookahead();
  for (int p = 1; p <= 8; ++p) {
    const int horizon = p * ((96 + p - 1) / p);
    for_each_periodic(
        sft, p,
        [&](std::span<const Symbol> w) {
          std::vector<Symbol> x(static_cast<std::size_t>(horizon + la));
          for (std::size_t i = 0; i < x.size(); ++i) x[i] = w[i % static_cast<std::size_t>(p)];
          out.cycle_estimate = std::max(out.cycle_estimate, seq(x, horizon) / horizon);
        },
        limits);
  }
  out.gap = out.pressure.value - out.cycle_bound;
  out.hyperbolic = out.gap > tolerance;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct CoverClass {
  double mass;
  double cost;
  std::int64_t count;
};

struct CoverSolution {
  double best = 0.0;      // least cost found
  double lp_bound = 0.0;  // fractional relaxation
  bool exact = false;
};

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Minimum-cost selection with total mass >= need over classes of
// interchangeable items.
CoverSolution solve_cover(std::vector<std::pair<double, double>> items, double need) {
  constexpr double kSlack = 1e-12;
  std::sort(items.begin(), items.end());
  std::vector<CoverClass> classes;
  for (const auto& [m, c] : items) {
    if (!classes.empty() && close(classes.back().mass, m) && close(classes.back().cost, c)) {
      ++classes.back().count;
    } else {
      classes.push_back({m, c, 1});
    }
  }
  std::sort(classes.begin(), classes.end(), [](const CoverClass& a, const CoverClass& b) {
    const double ra = a.cost / a.mass, rb = b.cost / b.mass;
    if (ra != rb) return ra < rb;
    return a.mass > b.mass;
  });
  const std::size_t k = classes.size();
  std::vector<double> pm(k + 1, 0.0), pc(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    pm[i + 1] = pm[i] + classes[i].mass * static_cast<double>(classes[i].count);
    pc[i + 1] = pc[i] + classes[i].cost * static_cast<double>(classes[i].count);
  }
  if (pm[k] < need - kSlack) throw ValidationError("total mass is below alpha");

  auto lp = [&](std::size_t i, double rest) {
    if (rest <= kSlack) return 0.0;
    const double target = pm[i] + rest;
    auto it = std::lower_bound(pm.begin() + static_cast<std::ptrdiff_t>(i) + 1, pm.end(), target - kSlack);
    if (it == pm.end()) return std::numeric_limits<double>::infinity();
    const auto j = static_cast<std::size_t>(it - pm.begin()) - 1;  // class j is split
    const double before = pm[j] - pm[i];
    return (pc[j] - pc[i]) + std::max(0.0, rest - before) * classes[j].cost / classes[j].mass;
  };

  CoverSolution sol;
  sol.lp_bound = lp(0, need);

  // Greedy in ratio order, then drop anything the cover no longer needs.
  {
    std::vector<std::int64_t> take(k, 0);
    double rest = need;
    for (std::size_t i = 0; i < k && rest > kSlack; ++i) {
      const auto want = static_cast<std::int64_t>(std::ceil(rest / classes[i].mass - 1e-9));
      take[i] = std::min(classes[i].count, std::max<std::int64_t>(want, 1));
      rest -= static_cast<double>(take[i]) * classes[i].mass;
    }
    double surplus = -rest;
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return classes[a].cost > classes[b].cost; });
    for (std::size_t i : order) {
      while (take[i] > 0 && surplus - classes[i].mass >= -kSlack) {
        --take[i];
        surplus -= classes[i].mass;
      }
    }
    sol.best = 0.0;
    for (std::size_t i = 0; i < k; ++i) sol.best += static_cast<double>(take[i]) * classes[i].cost;
  }

  if (k > 4096) return sol;
  long budget = 2'000'000;
  bool exhausted = false;
  auto dfs = [&](auto&& self, std::size_t i, double rest, double cost) -> void {
    if (exhausted) return;
    if (--budget < 0) {
      exhausted = true;
      return;
    }
    if (rest <= kSlack) {
      sol.best = std::min(sol.best, cost);
      return;
    }
    if (i == k || pm[k] - pm[i] < rest - kSlack) return;
    if (cost + lp(i, rest) >= sol.best * (1.0 - 1e-12)) return;
    const auto& c = classes[i];
    const auto top = std::min(c.count, static_cast<std::int64_t>(std::ceil(rest / c.mass - 1e-9)));
    // Fewer items of the cheapest ratio never lowers the bound, so the first
    // pruned count ends the loop.
    for (std::int64_t x = top; x >= 0 && !exhausted; --x) {
      const double nrest = rest - static_cast<double>(x) * c.mass;
      const double ncost = cost + static_cast<double>(x) * c.cost;
      if (nrest > kSlack && ncost + lp(i + 1, nrest) >= sol.best * (1.0 - 1e-12)) break;
      self(self, i + 1, nrest, ncost);
    }
  };
  dfs(dfs, 0, need, 0.0);
  sol.exact = !exhausted;
  if (sol.exact) sol.lp_bound = std::min(sol.lp_bound, sol.best);
  return sol;
}

}  // namespace

PressureEstimate spanning_free_energy(const MarkovMeasure& mu, const Potential& phi, int eps_exp, int n,
                                      double alpha, const Limits& limits) {
  const Sft& sft = phi.system();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in (0, 1]");
  if (n < 1) throw ValidationError("n must be >= 1");
  if (eps_exp < 0) throw ValidationError("epsilon exponent must be >= 0");
  if (!mu.supported_on(sft)) throw ValidationError("Markov measure is not supported on the potential's system");
  const auto seq = PotentialSequence::additive(phi);
  PressureEstimate est;
  est.method = "spanning-free-energy";
  est.params.n = n;
  est.params.eps_exp = eps_exp;
  est.params.alpha = alpha;
  CoverSolution last;
  double last_shift = 0.0;
  for (int np = 1; np <= n; ++np) {
    const int prefix = np + eps_exp;
    const int length = np + std::max(eps_exp, seq.lookahead());
    std::vector<std::pair<double, double>> items;  // (mass, log cost)
    std::vector<Symbol> current;
    for_each_word(
        sft, length,
        [&](std::span<const Symbol> w) {
          const auto head = w.first(static_cast<std::size_t>(prefix));
          if (!current.empty() && std::equal(head.begin(), head.end(), current.begin())) return;
          current.assign(head.begin(), head.end());
          const double m = mu.cylinder_mass(head);
          if (m > 0.0) items.emplace_back(m, seq(w, np));
        },
        limits);
    double shift = std::numeric_limits<double>::infinity();
    for (const auto& it : items) shift = std::min(shift, it.second);
    for (auto& it : items) it.second = std::exp(it.second - shift);
    last = solve_cover(std::move(items), alpha);
    last_shift = shift;
    est.diagnostics.emplace_back(np, (std::log(last.best) + shift) / np);
  }
  est.value = est.diagnostics.back().second;
  est.bracket = Bracket{std::min(est.value, (std::log(last.lp_bound) + last_shift) / n), est.value};
  est.notes.push_back(last.exact ? "exact (branch and bound)" : "heuristic upper bound");
  return est;
}

// ---------------------------------------------------------------------------

std::vector<CylinderTest> cylinder_tests(const EquilibriumResult& eq, int s) {
  const int k = [&] {
    int m = 0;
    for (const auto& blk : eq.blocks) m = std::max(m, blk.front() + 1);
    return m;
  }();
  std::vector<CylinderTest> out;
  for (int len = 1; len <= 2 && static_cast<int>(out.size()) < s; ++len) {
    std::vector<Symbol> w(static_cast<std::size_t>(len), 0);
    while (static_cast<int>(out.size()) < s) {
      out.push_back({Word(w), original_cylinder_mass(eq, w)});
      int pos = len - 1;
      while (pos >= 0 && ++w[pos] == k) w[pos--] = 0;
      if (pos < 0) break;
    }
  }
  return out;
}

double cyclic_frequency(std::span<const Symbol> branch, std::span<const Symbol> word) {
  const std::size_t n = branch.size();
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < n; ++j) {
    bool match = true;
    for (std::size_t i = 0; i < word.size() && match; ++i) match = branch[(j + i) % n] == word[i];
    hits += match ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

BranchSystem generic_branches(const BranchSystem& bs, const std::vector<CylinderTest>& tests, double rho) {
  BranchSystem out = bs;
  out.branches.clear();
  for (const auto& b : bs.branches) {
    const bool generic = std::all_of(tests.begin(), tests.end(), [&](const CylinderTest& t) {
      return std::abs(cyclic_frequency(b.word.symbols(), t.word.symbols()) - t.target) <= rho;
    });
    if (generic) out.branches.push_back(b);
  }
  return out;
}

BranchSystem weigh_branches(BranchSystem bs, const Potential& phi) {
  for (auto& b : bs.branches) {
    const auto orbit = branch_orbit(bs, b, phi.range() - 1);
    b.weight = birkhoff_sum(phi, orbit, Wrap::open);
  }
  return bs;
}

BranchSystem weigh_branches(BranchSystem bs, const PotentialSequence& seq) {
  for (auto& b : bs.branches) {
    const auto orbit = branch_orbit(bs, b, seq.lookahead());
    b.weight = seq(orbit, b.return_time);
  }
  return bs;
}

SandwichReport horseshoe_sandwich(const Potential& phi, const Word& base, int n, double rho, int s,
                                  const Limits& limits) {
  const auto eq = equilibrium_measure(phi, limits);
  const auto tests = cylinder_tests(eq, s);
  HorseshoeOptions opt;
  opt.rule = ReturnRule::first_in_window;
  opt.limits = limits;
  const auto bs = first_return_horseshoe(phi.system(), base, n, rho, opt);
  auto generic = generic_branches(bs, tests, rho);
  if (generic.branches.empty()) throw EmptyBranchSet("no generic branch in the window");
  generic = weigh_branches(std::move(generic), phi);

  SandwichReport r;
  r.branches = bs.size();
  r.generic = generic.size();
  r.saturate = saturate_pressure(generic);
  r.free_energy = eq.free_energy;
  r.L = phi.sup_norm();
  r.rho = rho;
  r.o = 2.0 * rho + 4.0 * rho * r.L;
  r.deviation = std::abs(r.saturate - r.free_energy);
  r.allowed = r.o + rho * std::abs(r.free_energy) / (1.0 + rho);
  r.holds = r.deviation <= r.allowed;
  r.in_interval = r.saturate >= (r.free_energy - r.o) / (1.0 + rho) && r.saturate <= r.free_energy + r.o;
  return r;
}

// ---------------------------------------------------------------------------

BasicSetResult sup_over_basic_sets(const Sft& sft, const PotentialSequence& seq, int n_max,
                                   const BasicSetOptions& options, const Limits& limits) {
  if (sft.empty()) throw ValidationError("empty system");
  BasicSetResult out;
  out.full_pressure = sequence_pressure(sft, seq, n_max, limits).value;
  out.value = kNegInf;
  auto offer = [&](double v, const std::string& label, auto witness) {
    if (v > out.value) {
      out.value = v;
      out.witness = std::move(witness);
      out.witness_label = label;
    }
  };
  if (options.subsystems) {
    for (const auto& sub : transitive_subsystems(sft, options.max_subsystems, limits)) {
      const double v = sub == sft ? out.full_pressure : sequence_pressure(sub, seq, n_max, limits).value;
      const std::string label = "subsystem " + sub.rows_string();
      out.subsystem_values.emplace_back(label, v);
      offer(v, label, sub);
    }
  }
  if (options.horseshoes) {
    HorseshoeOptions opt;
    opt.rule = ReturnRule::first_in_window;
    opt.limits = limits;
    for (int n = options.horseshoe_n_lo; n <= options.horseshoe_n_hi; ++n) {
      double best = kNegInf;
      for (Symbol s : sft.active_symbols()) {
        const Word base(std::vector<Symbol>{s});
        BranchSystem bs;
        try {
          bs = weigh_branches(first_return_horseshoe(sft, base, n, options.rho, opt), seq);
        } catch (const EmptyBranchSet&) {
          continue;
        }
        const double v = saturate_pressure(bs);
        best = std::max(best, v);
        offer(v,
              "horseshoe base=" + base.str() + " window=[" + std::to_string(bs.window_lo) + "," +
                  std::to_string(bs.window_hi) + "] branches=" + std::to_string(bs.size()),
              bs);
      }
      if (best != kNegInf) out.horseshoe_values.emplace_back(n, best);
    }
  }
  if (out.value == kNegInf) throw ValidationError("no basic set candidate");
  out.gap = out.full_pressure - out.value;
  return out;
}

}  // namespace thermo
