#include "thermo/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "thermo/geometry.hpp"
#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"

namespace thermo {

namespace {

using Counts = std::vector<std::uint64_t>;

Counts int_matmul(const Counts& a, const Counts& b, int k) {
  Counts c(static_cast<std::size_t>(k) * k, 0);
  for (int i = 0; i < k; ++i)
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < k; ++j) c[i * k + j] += a[i * k + l] * b[l * k + j];
  return c;
}

Counts int_matrix(const Sft& s) {
  Counts m(s.transitions().begin(), s.transitions().end());
  return m;
}

// Floyd-Warshall reachability among the symbols that carry an edge.
bool strongly_connected(const Sft& s) {
  const int k = s.alphabet_size();
  std::vector<char> r(static_cast<std::size_t>(k) * k, 0);
  std::vector<int> used;
  for (int i = 0; i < k; ++i) {
    bool any = false;
    for (int j = 0; j < k; ++j) {
      r[i * k + j] = s.allowed(i, j) ? 1 : 0;
      any = any || s.allowed(i, j) || s.allowed(j, i);
    }
    if (any) used.push_back(i);
  }
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (r[i * k + m] && r[m * k + j]) r[i * k + j] = 1;
  if (used.empty()) return false;
  for (int i : used)
    for (int j : used)
      if (!r[i * k + j]) return false;
  return true;
}

// Best mean over simple cycles of the symbol graph, edge weight phi(ab).
double brute_cycle_mean(const Potential& phi) {
  const Sft& s = phi.system();
  const int k = s.alphabet_size();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<Symbol> path;
  std::vector<char> on(static_cast<std::size_t>(k), 0);
  std::function<void(Symbol, double)> dfs = [&](Symbol v, double sum) {
    for (Symbol w : s.successors(v)) {
      const std::vector<Symbol> edge{v, w};
      const double ws = sum + phi(edge);
      if (w == path.front()) {
        best = std::max(best, ws / static_cast<double>(path.size()));
      } else if (w > path.front() && !on[w]) {
        on[w] = 1;
        path.push_back(w);
        dfs(w, ws);
        path.pop_back();
        on[w] = 0;
      }
    }
  };
  for (Symbol start : s.active_symbols()) {
    path = {start};
    on.assign(static_cast<std::size_t>(k), 0);
    on[start] = 1;
    dfs(start, 0.0);
  }
  return best;
}

Sft random_primitive(int k, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.6);
  for (;;) {
    std::vector<std::uint8_t> t(static_cast<std::size_t>(k) * k);
    for (auto& x : t) x = coin(rng) ? 1 : 0;
    Sft s(k, t);
    if (!s.pruned() && s.is_primitive()) return s;
  }
}

MatrixCocycle random_cocycle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixCocycle c;
  for (int s = 0; s < 2; ++s) {
    Eigen::MatrixXd m(2, 2);
    do {
      for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = u(rng);
    } while (std::abs(m.determinant()) < 0.2);
    c.matrices.push_back(m);
  }
  return c;
}

class Suite {
 public:
  void record(std::string name, double measured, double tol, std::string detail = {}) {
    const bool ok = std::isfinite(measured) && measured <= tol;
    results.push_back({std::move(name), measured, tol, ok, std::move(detail)});
  }
  std::vector<CheckResult> results;
};

}  // namespace

std::vector<CheckResult> run_invariant_suite(std::uint64_t seed) {
  Suite suite;
  std::mt19937_64 rng(seed);
  const Sft golden = Sft::golden_mean(), full2 = Sft::full_shift(2), full3 = Sft::full_shift(3);
  const Sft rand3 = random_primitive(3, rng);
  const std::vector<Sft> systems{golden, full2, full3, rand3};

  // Word and periodic-point counts against integer matrix powers.
  {
    double worst_words = 0, worst_periodic = 0;
    for (const auto& s : systems) {
      const int k = s.alphabet_size();
      const Counts a = int_matrix(s);
      Counts power(static_cast<std::size_t>(k) * k, 0);
      for (int i = 0; i < k; ++i) power[i * k + i] = 1;
      for (int n = 1; n <= 14; ++n) {
        // power = A^(n-1) here.
        std::uint64_t words = 0;
        for (auto x : power) words += x;
        const Counts next = int_matmul(power, a, k);
        std::uint64_t trace = 0;
        for (int i = 0; i < k; ++i) trace += next[i * k + i];
        std::uint64_t got_words = 0, got_periodic = 0;
        for_each_word(s, n, [&](std::span<const Symbol>) { ++got_words; });
        for_each_periodic(s, n, [&](std::span<const Symbol>) { ++got_periodic; });
        worst_words = std::max(worst_words, std::abs(double(got_words) - double(words)));
        worst_periodic = std::max(worst_periodic, std::abs(double(got_periodic) - double(trace)));
        power = next;
      }
    }
    suite.record("word-counts-vs-matrix-powers", worst_words, 0.0, "n <= 14");
    suite.record("periodic-counts-vs-trace", worst_periodic, 0.0, "N <= 14");
  }

  {
    double bad = 0;
    for (const auto& s : systems) {
      for (const auto& sub : transitive_subsystems(s)) bad += strongly_connected(sub) ? 0 : 1;
    }
    suite.record("transitive-subsystems-strongly-connected", bad, 0.0);
  }

  {
    HorseshoeOptions opt;
    opt.max_return = 40;
    const double inf = std::numeric_limits<double>::infinity();
    const auto bs = first_return_horseshoe(full2, Word{0}, 1, inf, opt);
    const double e2 = std::abs(saturate_pressure(bs) - std::log(2.0));
    const auto bg = first_return_horseshoe(golden, Word{0}, 1, inf, opt);
    const double eg = std::abs(saturate_pressure(bg) - topological_entropy(golden));
    suite.record("saturate-pressure-equals-entropy", std::max(e2, eg), 1e-6, "first returns to [0], R <= 40");
  }

  {
    double worst = 0;
    for (int t = 0; t < 3; ++t) {
      const auto phi = Potential::random(full2, 2, rng);
      const auto seq = PotentialSequence::additive(phi);
      for (int n = 1; n <= 10; ++n) {
        const auto w = random_extension(full2, {}, n + 1, rng);
        worst = std::max(worst, std::abs(seq(w, n) - birkhoff_sum(phi, w, Wrap::open)));
      }
    }
    suite.record("additive-embedding-round-trip", worst, 0.0);
  }

  std::vector<PotentialSequence> cocycles;
  for (int t = 0; t < 4; ++t) {
    cocycles.push_back(cocycle_norm_sequence(full2, random_cocycle(rng), t % 2 ? NormSign::minus : NormSign::plus));
  }
  {
    double worst = 0, ratio = 0;
    for (const auto& seq : cocycles) {
      const auto rep = audit(seq, {seed, 1000, 12});
      worst = std::max(worst, rep.worst_violation);
      ratio = std::max(ratio, rep.worst_bound_ratio);
    }
    suite.record("sub-superadditivity-audit", std::max(0.0, worst), 1e-12, "1000 triples per cocycle");
    suite.record("uniform-bound-audit", std::max(0.0, ratio - 1.0), 0.0);
  }

  {
    double worst = 0;
    const auto mu = MarkovMeasure::random(full2, rng);
    for (const auto& seq : cocycles) {
      const auto prof = kingman_rate_integral(seq, mu, 10);
      for (std::size_t i = 1; i < prof.running.size(); ++i) {
        const double step = prof.running[i] - prof.running[i - 1];
        worst = std::max(worst, seq.kind() == SequenceKind::subadditive ? step : -step);
      }
    }
    suite.record("kingman-running-bounds-monotone", worst, 0.0);
  }

  {
    double span = 0, per = 0, bracket = 0, shift = 0;
    for (const auto& s : systems) {
      for (int r = 1; r <= 2; ++r) {
        const auto phi = Potential::random(s, r, rng);
        const double p = perron_pressure(phi);
        for (int n = 12; n <= 14; ++n) span = std::max(span, std::abs(spanning_pressure(phi, 0, n).value - p));
        per = std::max(per, std::abs(periodic_orbit_pressure(phi, 12).value - p));
        const auto sp = spanning_pressure(phi, 1, 8), se = separated_pressure(phi, 1, 8);
        bracket = std::max(bracket, sp.value - se.value);
        const double c = 0.75;
        const auto psi = phi.shifted(c);
        shift = std::max({shift, std::abs(perron_pressure(psi) - p - c),
                          std::abs(spanning_pressure(psi, 1, 8).value - sp.value - c),
                          std::abs(separated_pressure(psi, 1, 8).value - se.value - c),
                          std::abs(periodic_orbit_pressure(psi, 10).value - periodic_orbit_pressure(phi, 10).value - c)});
      }
    }
    suite.record("spanning-vs-perron", span, 0.05, "eps = 1, n = 12..14, range 1 and 2 tables in [-1, 1]");
    suite.record("periodic-vs-perron", per, 0.02, "N = 12");
    suite.record("spanning-below-separated", std::max(0.0, bracket), 0.0);
    suite.record("translation-covariance", shift, 1e-12, "c = 0.75");
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& seq : cocycles) {
      if (seq.kind() != SequenceKind::subadditive) continue;
      const auto est = sequence_pressure(full2, seq, 10);
      for (const auto& [n, pn] : est.diagnostics) {
        for (const auto& [m, pm] : est.diagnostics) {
          if (m <= n) continue;
          worst = std::max(worst, pm - (pn + n * seq.bound() / m));
        }
      }
    }
    suite.record("monotone-defect", std::max(0.0, worst), 1e-9, "P(phi_m/m) <= P(phi_n/n) + nL/m");
  }

  {
    const auto phi = Potential::random(full2, 1, rng);
    const auto est = caratheodory_pressure(full2, PotentialSequence::additive(phi), 14);
    suite.record("caratheodory-vs-perron", std::abs(est.value - perron_pressure(phi)), 1e-3, "depth 14");
  }

  {
    double excess = -std::numeric_limits<double>::infinity(), attain = 0;
    for (const auto& s : {golden, full2, rand3}) {
      const auto phi = Potential::random(s, 2, rng);
      const double p = perron_pressure(phi);
      for (int t = 0; t < 30; ++t) excess = std::max(excess, free_energy(MarkovMeasure::random(s, rng), phi) - p);
      attain = std::max(attain, std::abs(equilibrium_measure(phi).free_energy - p));
    }
    suite.record("variational-inequality", std::max(0.0, excess), 1e-9, "30 random Markov measures per system");
    suite.record("equilibrium-attains-pressure", attain, 1e-9);
  }

  {
    double worst = 0;
    for (const auto& s : {golden, full3, rand3}) {
      const auto phi = Potential::random(s, 2, rng);
      worst = std::max(worst, std::abs(max_mean_cycle(phi) - brute_cycle_mean(phi)));
    }
    suite.record("max-mean-cycle-vs-simple-cycles", worst, 1e-12);
  }

  {
    const auto zero = PotentialSequence::additive(Potential::constant(golden, 0.0));
    const auto g = hyperbolic_gap(golden, zero, 6);
    suite.record("hyperbolic-gap-of-zero", std::abs(g.gap - topological_entropy(golden)), 1e-12);
  }

  {
    const auto phi = Potential::random(full2, 1, rng);
    const auto seq = PotentialSequence::additive(phi);
    BasicSetOptions opt;
    opt.horseshoes = false;
    double prev = -std::numeric_limits<double>::infinity(), drop = 0;
    for (const auto& s : {Sft(2, {1, 0, 0, 0}), golden, full2}) {
      const double v = sup_over_basic_sets(s, seq, 6, opt).value;
      drop = std::max(drop, prev - v);
      prev = v;
    }
    suite.record("basic-sets-nested-monotone", std::max(0.0, drop), 1e-12, "{0} < golden < full shift");
  }

  {
    const auto mt = ConformalIFS::make({{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}});
    const auto q = ConformalIFS::make({{0.5, 0.0}, {0.25, 0.75}});
    std::uniform_real_distribution<double> u(0.05, 0.2);
    std::vector<IfsBranch> many;
    double at = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double r = u(rng);
      many.push_back({r, at});
      at += r + 0.01;
    }
    const auto m5 = ConformalIFS::make(many);
    double agree = 0, residual = 0, convex = 0;
    for (const auto* ifs : {&mt, &q, &m5}) {
      const auto root = ifs_dimension(*ifs);
      agree = std::max(agree, std::abs(root.t_star - moran_root(ifs->ratios())));
      residual = std::max(residual, root.residual);
      convex += convex_on_probes(root) ? 0 : 1;
    }
    suite.record("bowen-vs-moran", agree, 1e-9);
    suite.record("bowen-residual", residual, 1e-9);
    suite.record("pressure-convex-on-probes", convex, 0.0);
    suite.record("box-vs-bowen", std::abs(box_dimension(mt, 14).estimate - ifs_dimension(mt).t_star), 0.03,
                 "middle third, depth 14");

    const auto gm = ConformalIFS::make({{1.0 / 3, 0.0}, {1.0 / 3, 2.0 / 3}}, golden);
    std::vector<BranchSystem> chain;
    HorseshoeOptions opt;
    for (int m = 2; m <= 8; ++m) {
      opt.max_return = m;
      chain.push_back(first_return_horseshoe(golden, Word{1}, 1, std::numeric_limits<double>::infinity(), opt));
    }
    const auto lb = dimension_lower_bound(gm, chain);
    suite.record("dimension-chain-monotone", (lb.monotone && lb.bounded) ? 0.0 : 1.0, 0.0);
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 2; ++t) {
      const auto r = horseshoe_sandwich(Potential::random(full2, 2, rng), Word{0}, 20, 0.05);
      worst = std::max(worst, r.deviation - r.allowed);
    }
    suite.record("horseshoe-sandwich", std::max(0.0, worst), 0.0, "rho = 0.05, n = 20");
  }

  {
    HorseshoeOptions opt;
    opt.rule = ReturnRule::first_in_window;
    const int n = 4;
    const double rho = 0.5;
    const auto bs = first_return_horseshoe(full2, Word{0}, n, rho, opt);
    double bad = 0;
    for (int p = 1; p <= 4; ++p) {
      std::set<int> sums;
      std::uniform_int_distribution<std::size_t> pick(0, bs.size() - 1);
      for (int t = 0; t < 200; ++t) {
        int total = 0;
        for (int i = 0; i < p; ++i) total += bs.branches[pick(rng)].return_time;
        sums.insert(total);
        if (total < n * p || total > (1.0 + rho) * n * p + 1e-9) bad += 1;
      }
    }
    suite.record("concatenated-periods-in-window", bad, 0.0, "p <= 4");
  }

  return suite.results;
}

}  // namespace thermo
