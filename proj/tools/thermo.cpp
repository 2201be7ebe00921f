// thermo: batch front end for the pressure, variational and dimension
// estimators. Every subcommand emits one report (CSV or JSON).

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "thermo/checks.hpp"
#include "thermo/geometry.hpp"
#include "thermo/io.hpp"
#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"

namespace {

using namespace thermo;

constexpr std::uint64_t kDefaultSeed = 1;

struct Config {
  std::string system, potential, cocycle, measure, ifs;
  std::string sign = "plus";
  std::string base = "0";
  std::string format = "csv";
  std::string out;
  int n_max = 12;
  int N_max = 12;
  int eps_exp = 0;
  int depth = 14;
  int n = 20;
  int samples = 100;
  double alpha = 0.5;
  double rho = 0.05;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::uint64_t> enum_cap;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

void validate(const Config& c) {
  require(c.n_max >= 1 && c.n_max <= 40, "--n-max must lie in [1, 40]");
  require(c.N_max >= 1 && c.N_max <= 40, "--N-max must lie in [1, 40]");
  require(c.eps_exp >= 0 && c.eps_exp <= 20, "--eps-exp must lie in [0, 20]");
  require(c.depth >= 1 && c.depth <= 40, "--depth must lie in [1, 40]");
  require(c.n >= 1 && c.n <= 200, "--n must lie in [1, 200]");
  require(c.samples >= 1 && c.samples <= 100000, "--samples must lie in [1, 100000]");
  require(c.alpha > 0.0 && c.alpha <= 1.0, "--alpha must lie in (0, 1]");
  require(c.rho > 0.0 && c.rho <= 10.0, "--rho must lie in (0, 10]");
  require(c.format == "csv" || c.format == "json", "--format must be csv or json");
  require(c.sign == "plus" || c.sign == "minus", "--sign must be plus or minus");
}

EstimateParams knobs(std::optional<int> n, std::optional<double> rho = {}, std::optional<int> depth = {}) {
  EstimateParams p;
  p.n = n;
  p.rho = rho;
  p.depth = depth;
  return p;
}

PressureEstimate row(std::string method, double value, EstimateParams params = {}) {
  PressureEstimate e;
  e.method = std::move(method);
  e.value = value;
  e.params = params;
  return e;
}

struct Inputs {
  Sft sft;
  Potential phi;
};

Inputs system_and_potential(const Config& c) {
  require(!c.system.empty(), "--system is required");
  Sft sft = load_system(c.system).sft;
  Potential phi = c.potential.empty() ? Potential::constant(sft, 0.0) : load_potential(c.potential, sft);
  return {std::move(sft), std::move(phi)};
}

void cmd_pressure(const Config& c, const Limits& lim, Report& rep) {
  const auto [sft, phi] = system_and_potential(c);
  rep.add(perron_estimate(phi, lim));
  rep.add(spanning_pressure(phi, c.eps_exp, c.n_max, lim));
  rep.add(separated_pressure(phi, c.eps_exp, c.n_max, lim));
  rep.add(periodic_orbit_pressure(phi, c.N_max, lim));
  rep.add(caratheodory_pressure(sft, PotentialSequence::additive(phi), c.depth, lim));
}

PotentialSequence input_sequence(const Config& c, const Sft& sft, const Potential& phi) {
  if (!c.cocycle.empty()) {
    return cocycle_norm_sequence(sft, load_cocycle(c.cocycle), c.sign == "plus" ? NormSign::plus : NormSign::minus);
  }
  return PotentialSequence::additive(phi);
}

void cmd_sequence_pressure(const Config& c, const Limits& lim, Report& rep) {
  const auto [sft, phi] = system_and_potential(c);
  const auto seq = input_sequence(c, sft, phi);
  auto est = sequence_pressure(sft, seq, c.n_max, lim);
  est.notes.push_back("kind " + to_string(seq.kind()));
  rep.add(std::move(est));

  const int depth = std::max(c.depth, c.n_max);
  const auto prof = tempered_variation_profile(seq, c.n_max, depth, 0.05, c.seed, lim);
  auto t = row("tempered-variation", prof.tail_max, knobs(c.n_max, {}, depth));
  for (const auto& r : prof.rows) t.diagnostics.emplace_back(r.n, r.gamma_over_n);
  t.bracket = Bracket{prof.sampled ? prof.tail_max : 0.0, prof.tail_max};
  t.notes.push_back(prof.tempered ? "tempered" : "not tempered");
  if (prof.sampled) t.notes.push_back("sampled: lower bounds on gamma_n");
  rep.add(std::move(t));
}

PressureEstimate root_row(const std::string& method, const BowenRoot& r) {
  auto e = row(method, r.t_star);
  e.bracket = Bracket{r.lo, r.hi};
  std::ostringstream probes;
  probes << "probes";
  for (const auto& [t, p] : r.probes) probes << ' ' << format_double(t) << ':' << format_double(p);
  e.notes.push_back("residual " + format_double(r.residual));
  e.notes.push_back(probes.str());
  e.notes.push_back(convex_on_probes(r) ? "convex on probes" : "not convex on probes");
  return e;
}

bool full_coding(const ConformalIFS& ifs) {
  return ifs.coding == Sft::full_shift(static_cast<int>(ifs.branches.size()));
}

void cmd_bowen(const Config& c, const Limits&, Report& rep) {
  require(!c.ifs.empty(), "--ifs is required");
  const auto ifs = load_ifs(c.ifs);
  const auto root = ifs_dimension(ifs);
  rep.add(root_row("bowen-root", root));
  auto d = row("hausdorff-dimension", root.t_star * ifs.unstable_dim);
  d.bracket = Bracket{root.lo * ifs.unstable_dim, root.hi * ifs.unstable_dim};
  d.notes.push_back("t* x unstable_dim " + std::to_string(ifs.unstable_dim));
  rep.add(std::move(d));
}

void cmd_dimension(const Config& c, const Limits& lim, Report& rep) {
  require(!c.ifs.empty(), "--ifs is required");
  const auto ifs = load_ifs(c.ifs);
  if (ifs.separated) rep.add(root_row("bowen-root", ifs_dimension(ifs)));
  if (full_coding(ifs)) {
    auto m = row("moran-root", moran_root(ifs.ratios()));
    m.notes.push_back("sum r_i^s = 1");
    rep.add(std::move(m));
  }
  const auto box = box_dimension(ifs, c.depth, lim);
  auto b = row("box-counting", box.estimate, knobs({}, {}, c.depth));
  for (const auto& [j, count] : box.counts) b.diagnostics.emplace_back(j, count);
  b.notes.push_back("slope fit over j >= " + std::to_string(box.fit_from));
  b.notes.push_back("diagnostics are box counts N(j)");
  rep.add(std::move(b));
}

void cmd_variational(const Config& c, const Limits& lim, Report& rep) {
  const auto [sft, phi] = system_and_potential(c);
  const double p = perron_pressure(phi, lim);
  rep.add(perron_estimate(phi, lim));

  const auto eq = equilibrium_measure(phi, lim);
  auto e = row("equilibrium", eq.free_energy);
  e.bracket = Bracket{std::min(eq.free_energy, p), std::max(eq.free_energy, p)};
  e.notes.push_back("free energy of the Gibbs chain");
  e.notes.push_back("block length " + std::to_string(eq.block_length));
  rep.add(std::move(e));

  std::mt19937_64 rng(c.seed);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.samples; ++i) best = std::max(best, free_energy(MarkovMeasure::random(sft, rng), phi, lim));
  auto vi = row("variational-inequality", best);
  vi.bracket = Bracket{best, p};
  vi.notes.push_back("max free energy over " + std::to_string(c.samples) + " seeded random Markov measures");
  vi.notes.push_back(best <= p + 1e-9 ? "holds" : "VIOLATED");
  rep.add(std::move(vi));

  auto mmc = row("max-mean-cycle", max_mean_cycle(phi, lim));
  mmc.notes.push_back("sup of integrals over invariant measures");
  rep.add(std::move(mmc));

  const auto seq = PotentialSequence::additive(phi);
  const auto gap = hyperbolic_gap(sft, seq, c.n_max, 1e-6, lim);
  auto g = row("hyperbolic-gap", gap.gap, knobs(c.n_max));
  g.bracket = Bracket{gap.gap, gap.gap};
  g.notes.push_back("pressure " + format_double(gap.pressure.value));
  g.notes.push_back("cycle bound " + format_double(gap.cycle_bound) + " (" + gap.cycle_direction + ", n = " +
                    std::to_string(gap.cycle_bound_n) + ")");
  g.notes.push_back(gap.hyperbolic ? "hyperbolic" : "not hyperbolic");
  rep.add(std::move(g));

  if (!c.measure.empty()) {
    rep.add(spanning_free_energy(load_markov(c.measure), phi, c.eps_exp, c.n_max, c.alpha, lim));
  }

  BasicSetOptions opt;
  opt.rho = c.rho;
  const auto bs = sup_over_basic_sets(sft, seq, std::min(c.n_max, 10), opt, lim);
  auto b = row("basic-sets", bs.value, knobs(std::min(c.n_max, 10), c.rho));
  b.bracket = Bracket{bs.value, bs.full_pressure};
  for (const auto& [n, v] : bs.horseshoe_values) b.diagnostics.emplace_back(n, v);
  b.notes.push_back("witness " + bs.witness_label);
  b.notes.push_back("gap " + format_double(bs.gap));
  rep.add(std::move(b));
}

void cmd_horseshoe(const Config& c, const Limits& lim, Report& rep) {
  const auto [sft, phi] = system_and_potential(c);
  const Word base = Word::parse(c.base);
  HorseshoeOptions opt;
  opt.rule = ReturnRule::first_in_window;
  opt.limits = lim;
  const auto bs = weigh_branches(first_return_horseshoe(sft, base, c.n, c.rho, opt), phi);
  auto s = row("saturate-pressure", saturate_pressure(bs), knobs(c.n, c.rho));
  s.bracket = Bracket{s.value, perron_pressure(phi, lim)};
  s.notes.push_back(std::to_string(bs.size()) + " branches through [" + base.str() + "], window [" +
                    std::to_string(bs.window_lo) + ", " + std::to_string(bs.window_hi) + "]");
  rep.add(std::move(s));

  const auto r = horseshoe_sandwich(phi, base, c.n, c.rho, 4, lim);
  auto w = row("sandwich", r.saturate, knobs(c.n, c.rho));
  w.bracket = Bracket{(r.free_energy - r.o) / (1.0 + r.rho), r.free_energy + r.o};
  w.notes.push_back(std::to_string(r.generic) + " of " + std::to_string(r.branches) + " branches generic");
  w.notes.push_back("P_mu " + format_double(r.free_energy) + ", L " + format_double(r.L));
  w.notes.push_back("deviation " + format_double(r.deviation) + " allowed " + format_double(r.allowed));
  w.notes.push_back(r.holds ? "holds" : "VIOLATED");
  rep.add(std::move(w));
}

bool cmd_check(const Config& c, Report& rep) {
  bool all = true;
  for (const auto& r : run_invariant_suite(c.seed)) {
    auto e = row("check:" + r.name, r.measured);
    e.bracket = Bracket{0.0, r.tolerance};
    e.notes.push_back(r.passed ? "pass" : "FAIL");
    if (!r.detail.empty()) e.notes.push_back(r.detail);
    all = all && r.passed;
    rep.add(std::move(e));
  }
  return all;
}

void emit(const Config& c, const Report& rep) {
  const std::string text = c.format == "json" ? rep.json() : rep.csv();
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + c.out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism estimators on subshifts of finite type"};
  app.require_subcommand(1);
  Config c;

  app.add_option("--system", c.system, "system file");
  app.add_option("--potential", c.potential, "potential table (default: zero)");
  app.add_option("--cocycle", c.cocycle, "matrix cocycle file");
  app.add_option("--sign", c.sign, "cocycle log-norm sign: plus or minus");
  app.add_option("--measure", c.measure, "Markov measure file");
  app.add_option("--ifs", c.ifs, "IFS file");
  app.add_option("--base", c.base, "base word of the horseshoe");
  app.add_option("--n-max", c.n_max, "largest n for word-based estimators");
  app.add_option("--N-max", c.N_max, "largest period for periodic sums");
  app.add_option("--eps-exp", c.eps_exp, "epsilon = 2^-eps_exp");
  app.add_option("--alpha", c.alpha, "mass threshold for free energy covers");
  app.add_option("--rho", c.rho, "window slack / genericity radius");
  app.add_option("--depth", c.depth, "cover or box-counting depth");
  app.add_option("--n", c.n, "horseshoe window start");
  app.add_option("--samples", c.samples, "random measures for the variational inequality");
  app.add_option("--seed", c.seed, "seed of the single random generator");
  app.add_option("--format", c.format, "csv or json");
  app.add_option("--out", c.out, "output path (default stdout)");
  app.add_option("--enum-cap", c.enum_cap, "enumeration cap (overrides THERMO_ENUM_CAP)");

  const char* names[] = {"pressure", "sequence-pressure", "bowen", "dimension", "variational", "horseshoe", "check"};
  const char* help[] = {"all four pressure estimators side by side",
                        "sequence pressure and tempered variation of a potential or cocycle",
                        "Bowen root of an IFS",
                        "Bowen, Moran and box-counting dimension of an IFS",
                        "equilibrium, variational inequality, gap, free energy, basic sets",
                        "first-return horseshoe, saturate pressure and sandwich check",
                        "full invariant suite"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 7; ++i) subs.push_back(app.add_subcommand(names[i], help[i])->fallthrough());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "thermo: " << e.what() << '\n';
    return 2;
  }

  std::string command;
  for (auto* s : subs)
    if (s->parsed()) command = s->get_name();

  try {
    validate(c);
    Limits lim = Limits::from_env();
    if (c.enum_cap) lim.enumeration_cap = *c.enum_cap;
    Report rep(command, c.seed);
    bool ok = true;
    if (command == "pressure") cmd_pressure(c, lim, rep);
    else if (command == "sequence-pressure") cmd_sequence_pressure(c, lim, rep);
    else if (command == "bowen") cmd_bowen(c, lim, rep);
    else if (command == "dimension") cmd_dimension(c, lim, rep);
    else if (command == "variational") cmd_variational(c, lim, rep);
    else if (command == "horseshoe") cmd_horseshoe(c, lim, rep);
    else ok = cmd_check(c, rep);
    emit(c, rep);
    if (!ok) {
      std::cerr << "thermo: invariant suite has failures\n";
      return 1;
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "thermo: " << e.what() << '\n';
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "thermo: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "thermo: " << e.what() << '\n';
    return 1;
  }
}
