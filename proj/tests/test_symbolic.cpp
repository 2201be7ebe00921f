#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "thermo/symbolic.hpp"

using namespace thermo;

TEST_CASE("word counts match matrix powers") {
  std::mt19937_64 rng(3);
  std::vector<Sft> systems{Sft::golden_mean(), Sft::full_shift(3), Sft::from_rows({"110", "011", "101"})};
  for (const auto& s : systems) {
    const Eigen::MatrixXd a = oracle::adjacency(s);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    for (int n = 1; n <= 12; ++n) {
      CHECK(enumerate_words(s, n).size() == static_cast<std::size_t>(p.sum()));
      p = p * a;
      CHECK(enumerate_periodic(s, n).size() == static_cast<std::size_t>(p.trace()));
    }
  }
}

TEST_CASE("golden mean periodic points follow the Lucas numbers") {
  CHECK(enumerate_periodic(Sft::golden_mean(), 12).size() == 322);
  CHECK(enumerate_words(Sft::golden_mean(), 12).size() == 377);
}

TEST_CASE("words are lexicographic and admissible") {
  const auto s = Sft::golden_mean();
  const auto w = enumerate_words(s, 6);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(s.admissible(w[i].symbols()));
    if (i) CHECK(w[i - 1] < w[i]);
  }
  CHECK(lexmin_extension(s, std::vector<Symbol>{1}, 4) == std::vector<Symbol>{1, 0, 0, 0});
}

TEST_CASE("word parsing") {
  CHECK(Word::parse("0110").str() == "0110");
  CHECK(Word::parse("a") == Word{10});
  CHECK_THROWS_AS(Word::parse("01-"), ValidationError);
}

TEST_CASE("stranded symbols are pruned") {
  const auto s = Sft::from_rows({"11", "00"});  // 1 has no successor
  CHECK(s.pruned());
  CHECK(s.active_count() == 1);
  CHECK_FALSE(s.allowed(0, 1));
  CHECK(enumerate_words(s, 5).size() == 1);
  CHECK_THROWS_AS(Sft::from_rows({"12", "01"}), ValidationError);
  CHECK_THROWS_AS(Sft::from_rows({"11", "1"}), ValidationError);
}

TEST_CASE("irreducibility and period") {
  CHECK(Sft::golden_mean().is_primitive());
  const auto flip = Sft::from_rows({"01", "10"});
  CHECK(flip.is_irreducible());
  CHECK_FALSE(flip.is_primitive());
  CHECK(flip.period() == 2);
  CHECK_FALSE(Sft::from_rows({"10", "01"}).is_irreducible());
}

TEST_CASE("transitive subsystems equal the strongly connected edge subsets") {
  for (const auto& s : {Sft::full_shift(2), Sft::golden_mean(), Sft::from_rows({"110", "011", "101"})}) {
    // Oracle: every edge subset, filtered by Floyd-Warshall.
    std::vector<std::pair<int, int>> edges;
    const int k = s.alphabet_size();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (s.allowed(i, j)) edges.emplace_back(i, j);
    std::size_t expected = 0;
    for (unsigned mask = 1; mask < (1u << edges.size()); ++mask) {
      std::vector<std::uint8_t> t(static_cast<std::size_t>(k) * k, 0);
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (mask >> e & 1u) t[edges[e].first * k + edges[e].second] = 1;
      Sft sub(k, t);
      if (!sub.pruned() && oracle::strongly_connected(sub)) ++expected;
    }
    const auto subs = transitive_subsystems(s);
    CHECK(subs.size() == expected);
    for (const auto& sub : subs) {
      CHECK(oracle::strongly_connected(sub));
      CHECK(s.contains(sub));
    }
  }
  CHECK(transitive_subsystems(Sft::full_shift(2)).size() == 6);
}

TEST_CASE("enumeration cap") {
  Limits tight;
  tight.enumeration_cap = 1000;
  CHECK_THROWS_AS(enumerate_words(Sft::full_shift(2), 12, tight), CapExceeded);
  CHECK_NOTHROW(enumerate_words(Sft::full_shift(2), 9, tight));
}

TEST_CASE("strict first returns to [0] in the full shift") {
  HorseshoeOptions opt;
  opt.max_return = 5;
  const auto bs = first_return_horseshoe(Sft::full_shift(2), Word{0}, 1, std::numeric_limits<double>::infinity(), opt);
  REQUIRE(bs.size() == 5);
  CHECK(bs.branches[0].word == Word{0});
  CHECK(bs.branches[1].word == Word{0, 1});
  CHECK(bs.branches[4].word == Word{0, 1, 1, 1, 1});
  // sum_{R=1}^5 e^{-sR} = 1
  const double s = oracle::bisect(
      [](double x) {
        double t = 0;
        for (int r = 1; r <= 5; ++r) t += std::exp(-x * r);
        return t - 1.0;
      },
      0.0, 2.0);
  CHECK(saturate_pressure(bs) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("golden mean returns to [0] give log of the golden ratio") {
  HorseshoeOptions opt;
  opt.max_return = 30;
  const auto bs = first_return_horseshoe(Sft::golden_mean(), Word{0}, 1, std::numeric_limits<double>::infinity(), opt);
  CHECK(bs.size() == 2);
  CHECK(std::abs(saturate_pressure(bs) - oracle::golden_log()) < 1e-12);
}

TEST_CASE("first-in-window returns ignore early visits") {
  HorseshoeOptions opt;
  opt.rule = ReturnRule::first_in_window;
  const auto bs = first_return_horseshoe(Sft::full_shift(2), Word{0}, 3, 0.2, opt);
  CHECK(bs.size() == 4);
  for (const auto& b : bs.branches) CHECK(b.return_time == 3);
  opt.rule = ReturnRule::strict;
  const auto strict = first_return_horseshoe(Sft::full_shift(2), Word{0}, 3, 0.2, opt);
  CHECK(strict.size() == 1);
  CHECK(nested_in(strict, bs));
}

TEST_CASE("branch concatenations are admissible") {
  HorseshoeOptions opt;
  opt.rule = ReturnRule::first_in_window;
  const auto s = Sft::golden_mean();
  const auto bs = first_return_horseshoe(s, Word{0}, 4, 0.5, opt);
  REQUIRE(bs.size() > 1);
  std::vector<Symbol> w;
  for (const auto& b : bs.branches)
    for (auto x : b.word.symbols()) w.push_back(x);
  w.push_back(0);
  CHECK(s.admissible(w));
  CHECK_THROWS_AS(first_return_horseshoe(s, Word{1, 1}, 2, 1.0, opt), ValidationError);
}
