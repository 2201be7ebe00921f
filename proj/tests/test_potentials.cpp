#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "thermo/markov.hpp"
#include "thermo/potentials.hpp"

using namespace thermo;

TEST_CASE("cyclic Birkhoff sums recount wrapped windows") {
  std::mt19937_64 rng(11);
  const auto s = Sft::full_shift(2);
  const auto phi = Potential::random(s, 2, rng);
  for (int t = 0; t < 20; ++t) {
    const auto w = random_extension(s, {}, 10, rng);
    double direct = 0;
    for (int i = 0; i < 10; ++i) {
      const std::vector<Symbol> win{w[i], w[(i + 1) % 10]};
      direct += phi(win);
    }
    CHECK(birkhoff_sum(phi, w, Wrap::cyclic) == doctest::Approx(direct).epsilon(1e-14));
    double open = 0;
    for (int i = 0; i + 1 < 10; ++i) open += phi(std::span<const Symbol>(w).subspan(i, 2));
    CHECK(birkhoff_sum(phi, w, Wrap::open) == doctest::Approx(open).epsilon(1e-14));
  }
  CHECK_THROWS_AS(birkhoff_sum(phi, std::vector<Symbol>{0}, Wrap::open), ValidationError);
}

TEST_CASE("table construction validates coverage") {
  const auto g = Sft::golden_mean();
  CHECK_NOTHROW(Potential::from_entries(g, 2, {{Word{0, 0}, 1.0}, {Word{0, 1}, 2.0}, {Word{1, 0}, 3.0}}));
  CHECK_THROWS_AS(Potential::from_entries(g, 2, {{Word{0, 0}, 1.0}, {Word{0, 1}, 2.0}}), ValidationError);
  CHECK_THROWS_AS(Potential::from_entries(g, 2, {{Word{0, 0}, 1.0}, {Word{0, 1}, 2.0}, {Word{1, 0}, 3.0}, {Word{1, 1}, 0.0}}),
                  ValidationError);
  const auto phi = Potential::from_symbol_values(Sft::full_shift(2), {0.5, -2.0});
  CHECK(phi.max_value() == 0.5);
  CHECK(phi.min_value() == -2.0);
  CHECK(phi.sup_norm() == 2.0);
  CHECK(phi.shifted(1.0)(std::vector<Symbol>{1}) == -1.0);
  CHECK(phi.scaled(-2.0)(std::vector<Symbol>{0}) == -1.0);
}

TEST_CASE("additive embedding is the open Birkhoff sum") {
  std::mt19937_64 rng(5);
  const auto s = Sft::golden_mean();
  const auto phi = Potential::random(s, 3, rng);
  const auto seq = PotentialSequence::additive(phi);
  CHECK(seq.kind() == SequenceKind::additive);
  CHECK(seq.lookahead() == 2);
  for (int n = 1; n <= 8; ++n) {
    const auto w = random_extension(s, {}, n + 2, rng);
    CHECK(seq(w, n) == birkhoff_sum(phi, w, Wrap::open));
  }
}

TEST_CASE("spectral norm agrees with the SVD") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd m(4, 3);
    for (int i = 0; i < 12; ++i) m(i / 3, i % 3) = g(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    CHECK(spectral_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  }
}

TEST_CASE("cocycle products and log norms") {
  MatrixCocycle c;
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 1.2, 0.3, -0.4, 0.9;
  b << 0.5, 1.1, 0.2, -0.7;
  c.matrices = {a, b};
  const std::vector<Symbol> w{0, 1, 1, 0, 1, 0, 0, 1};
  Eigen::MatrixXd direct = Eigen::MatrixXd::Identity(2, 2);
  for (Symbol x : w) direct = c.matrices[x] * direct;
  CHECK((c.product(w) - direct).norm() < 1e-14);

  const auto plus = cocycle_norm_sequence(Sft::full_shift(2), c, NormSign::plus);
  const auto minus = cocycle_norm_sequence(Sft::full_shift(2), c, NormSign::minus);
  CHECK(plus.kind() == SequenceKind::subadditive);
  CHECK(minus.kind() == SequenceKind::superadditive);
  const double expected = std::log(Eigen::JacobiSVD<Eigen::MatrixXd>(direct).singularValues()(0));
  CHECK(plus(w, 8) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(minus(w, 8) == doctest::Approx(-expected).epsilon(1e-12));

  const auto rep = audit(plus);
  CHECK(rep.triples == 1000);
  CHECK(rep.worst_violation <= 1e-12);
  CHECK(rep.worst_bound_ratio <= 1.0);
}

TEST_CASE("cocycle validation") {
  MatrixCocycle singular;
  singular.matrices = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2)};
  CHECK_THROWS_AS(cocycle_norm_sequence(Sft::full_shift(2), singular, NormSign::plus), ValidationError);
  CHECK_THROWS_AS(cocycle_norm_sequence(Sft::full_shift(2), singular, NormSign::minus), ValidationError);
  MatrixCocycle mixed;
  mixed.matrices = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)};
  CHECK_THROWS_AS(cocycle_norm_sequence(Sft::full_shift(2), mixed, NormSign::plus), ValidationError);
  MatrixCocycle scalar;
  scalar.matrices = {Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Constant(1, 1, 0.5)};
  CHECK(cocycle_norm_sequence(Sft::full_shift(2), scalar, NormSign::plus).kind() == SequenceKind::additive);
}

TEST_CASE("audited construction rejects a mislabelled sequence") {
  const auto s = Sft::full_shift(2);
  auto square = [](std::span<const Symbol>, int n) { return 0.01 * n * n; };
  CHECK_THROWS_AS(PotentialSequence::make(s, SequenceKind::subadditive, square, 1.0, 0, "square"), ValidationError);
  CHECK_NOTHROW(PotentialSequence::make(s, SequenceKind::superadditive, square, 1.0, 0, "square",
                                        {1, 200, 12}));
  auto linear = [](std::span<const Symbol>, int n) { return 2.0 * n; };
  CHECK_THROWS_AS(PotentialSequence::make(s, SequenceKind::additive, linear, 1.0, 0, "linear"), ValidationError);
}

TEST_CASE("Kingman rate of a constant matrix cocycle") {
  Eigen::MatrixXd a(2, 2);
  a << 2.0, 1.0, 0.0, 1.0;
  MatrixCocycle c;
  c.matrices = {a, a};
  const auto seq = cocycle_norm_sequence(Sft::full_shift(2), c, NormSign::plus);
  const std::vector<double> p{0.5, 0.5};
  const auto prof = kingman_rate_integral(seq, MarkovMeasure::bernoulli(p), 12);
  REQUIRE(prof.averages.size() == 12);
  const double rate = std::log(oracle::spectral_radius(a));
  for (std::size_t n = 0; n < prof.averages.size(); ++n) {
    // a_n = (1/n) log ||A^n||, computed directly.
    Eigen::MatrixXd pw = Eigen::MatrixXd::Identity(2, 2);
    for (std::size_t i = 0; i <= n; ++i) pw = a * pw;
    const double direct = std::log(Eigen::JacobiSVD<Eigen::MatrixXd>(pw).singularValues()(0)) / double(n + 1);
    CHECK(prof.averages[n] == doctest::Approx(direct).epsilon(1e-12));
    CHECK(prof.running[n] >= rate - 1e-12);
    if (n) CHECK(prof.running[n] <= prof.running[n - 1]);
  }
  CHECK(prof.running.back() - rate < 0.1);
}

TEST_CASE("tempered variation of an additive potential stays bounded") {
  std::mt19937_64 rng(2);
  const auto phi = Potential::random(Sft::full_shift(2), 2, rng);
  const auto seq = PotentialSequence::additive(phi);
  const auto prof = tempered_variation_profile(seq, 8, 10);
  REQUIRE(prof.rows.size() == 8);
  // Only the last window reads past the cylinder.
  double osc = 0;
  for (Symbol a : {0, 1}) {
    const std::vector<Symbol> w0{a, 0}, w1{a, 1};
    osc = std::max(osc, std::abs(phi(w0) - phi(w1)));
  }
  for (const auto& r : prof.rows) CHECK(r.gamma <= osc + 1e-12);
  CHECK_FALSE(prof.sampled);
  CHECK_THROWS_AS(tempered_variation_profile(seq, 8, 6), ValidationError);

  const auto flat = tempered_variation_profile(PotentialSequence::additive(Potential::random(Sft::full_shift(2), 1, rng)), 8, 10);
  CHECK(flat.tail_max == 0.0);
  CHECK(flat.tempered);
}

TEST_CASE("tabulated averages") {
  std::mt19937_64 rng(4);
  const auto s = Sft::golden_mean();
  const auto phi = Potential::random(s, 2, rng);
  const auto seq = PotentialSequence::additive(phi);
  const auto avg = tabulate_average(s, seq, 4);
  CHECK(avg.range() == 5);
  const auto w = lexmin_extension(s, std::vector<Symbol>{0, 1, 0}, 5);
  CHECK(avg(w) == doctest::Approx(seq(w, 4) / 4.0).epsilon(1e-15));
}
