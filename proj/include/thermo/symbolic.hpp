#pragma once

// Subshifts of finite type on a finite alphabet, their words and periodic
// points, irreducible subsystems and induced (return-time) horseshoes.
//
// Metric convention: d(x, y) = 2^-j with j the first index where x and y
// differ. Under it the Bowen ball B(x, 2^-m, n) is the (n+m)-cylinder of x.

#include <compare>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thermo/errors.hpp"

namespace thermo {

using Symbol = int;

/// Finite sequence of symbols. Admissibility is checked against an Sft, never
/// assumed by the Word itself.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
  Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}

  /// Parses "0110" style text; symbols 0-9 then a-z (alphabet <= 36).
  static Word parse(std::string_view text);

  std::span<const Symbol> symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::string str() const;

  auto operator<=>(const Word&) const = default;
  bool operator==(const Word&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

char symbol_char(Symbol s);
std::string to_string(std::span<const Symbol> symbols);

/// One-sided subshift of finite type given by a 0/1 transition matrix.
///
/// Construction prunes stranded symbols: edges touching a symbol with no
/// successor or no predecessor are removed until none remain. Pruned symbols
/// stay in the alphabet (so subsystems share the ambient labelling) but are
/// inactive and never appear in words.
class Sft {
 public:
  Sft() = default;
  /// `transitions` is row-major k*k with entries 0 or 1.
  Sft(int alphabet_size, std::vector<std::uint8_t> transitions);

  static Sft full_shift(int k);
  static Sft golden_mean();
  /// Rows given as 0/1 strings, e.g. {"11", "10"}.
  static Sft from_rows(const std::vector<std::string>& rows);

  int alphabet_size() const { return k_; }
  bool allowed(Symbol a, Symbol b) const { return transitions_[a * k_ + b] != 0; }
  bool active(Symbol s) const { return !successors_[s].empty(); }
  std::span<const Symbol> successors(Symbol s) const { return successors_[s]; }
  std::span<const Symbol> active_symbols() const { return active_; }
  int active_count() const { return static_cast<int>(active_.size()); }
  int edge_count() const;
  bool empty() const { return active_.empty(); }
  bool pruned() const { return pruned_; }
  const std::vector<std::uint8_t>& transitions() const { return transitions_; }

  bool admissible(std::span<const Symbol> w) const;
  /// Admissible and last -> first also allowed.
  bool cyclically_admissible(std::span<const Symbol> w) const;

  /// Brute-force reachability over active symbols.
  bool is_irreducible() const;
  /// Irreducible with period one.
  bool is_primitive() const;
  /// Greatest common divisor of cycle lengths; 0 for an empty system.
  int period() const;

  /// Every edge of `other` is an edge of this system (same alphabet).
  bool contains(const Sft& other) const;

  std::string rows_string() const;

  bool operator==(const Sft& o) const { return k_ == o.k_ && transitions_ == o.transitions_; }

 private:
  int k_ = 0;
  std::vector<std::uint8_t> transitions_;
  std::vector<std::vector<Symbol>> successors_;
  std::vector<Symbol> active_;
  bool pruned_ = false;
};

/// Visits every admissible word of length n in lexicographic order.
/// Throws CapExceeded when active_count^n exceeds the cap.
template <class Visit>
void for_each_word(const Sft& sft, int n, Visit&& visit, const Limits& limits = {});

/// Visits every admissible word of length `length` starting with `prefix`.
template <class Visit>
void for_each_extension(const Sft& sft, std::span<const Symbol> prefix, int length, Visit&& visit);

/// Lexicographically least admissible word of `length` extending `prefix`.
std::vector<Symbol> lexmin_extension(const Sft& sft, std::span<const Symbol> prefix, int length);

/// Uniform random successor walk of `length` extending `prefix`.
std::vector<Symbol> random_extension(const Sft& sft, std::span<const Symbol> prefix, int length,
                                     std::mt19937_64& rng);

/// Admissible words of length n, lexicographic, no duplicates.
std::vector<Word> enumerate_words(const Sft& sft, int n, const Limits& limits = {});

/// Cyclic words of length N: fixed points of sigma^N, lower periods included.
std::vector<Word> enumerate_periodic(const Sft& sft, int N, const Limits& limits = {});

template <class Visit>
void for_each_periodic(const Sft& sft, int N, Visit&& visit, const Limits& limits = {}) {
  for_each_word(
      sft, N,
      [&](std::span<const Symbol> w) {
        if (sft.allowed(w.back(), w.front())) visit(w);
      },
      limits);
}

/// Irreducible subsystems (edge subsets inducing a strongly connected graph),
/// sorted by edge count descending then by transition pattern. Edge subsets
/// are enumerated exhaustively when 2^edges fits the cap; otherwise symbol-
/// induced subsystems are used, and failing that only the strongly connected
/// components. `max_count < 0` means unlimited.
std::vector<Sft> transitive_subsystems(const Sft& sft, int max_count = -1,
                                       const Limits& limits = {});

/// Strongly connected components of the active transition graph that carry
/// at least one cycle, each returned as its own Sft.
std::vector<Sft> irreducible_components(const Sft& sft);

// ---------------------------------------------------------------------------
// Induced horseshoes

enum class ReturnRule {
  /// Branch = first return to the base cylinder; kept only if its time lies
  /// in the window.
  strict,
  /// Branch = first return at a time >= the window start. Earlier visits to
  /// the base are ignored. Still a stopping time, so domains stay disjoint.
  first_in_window,
};

struct Branch {
  Word word;
  int return_time = 0;
  double weight = 0.0;
};

struct BranchSystem {
  Sft system;
  Word base;
  int window_lo = 0;
  int window_hi = 0;
  ReturnRule rule = ReturnRule::strict;
  std::vector<Branch> branches;  // sorted by word

  std::size_t size() const { return branches.size(); }
};

struct HorseshoeOptions {
  ReturnRule rule = ReturnRule::strict;
  /// Hard upper bound on return times; required when rho is infinite.
  int max_return = 0;
  Limits limits{};
};

/// Return words through `base` with times in [n, floor((1+rho) n)].
/// Each branch word starts with `base` and w.base is admissible, so any
/// concatenation of branches is admissible. Throws EmptyBranchSet.
BranchSystem first_return_horseshoe(const Sft& sft, const Word& base, int n, double rho,
                                    const HorseshoeOptions& options = {});

/// The word that a branch's point reads over its first R + extra symbols:
/// w . base . (lexicographically least continuation).
std::vector<Symbol> branch_orbit(const BranchSystem& bs, const Branch& b, int extra);

/// Unique s with sum_i exp(weight_i - s R_i) = 1.
double saturate_pressure(const BranchSystem& bs);

/// Branch-set inclusion (by word) with equal base.
bool nested_in(const BranchSystem& inner, const BranchSystem& outer);

// ---------------------------------------------------------------------------

template <class Visit>
void for_each_word(const Sft& sft, int n, Visit&& visit, const Limits& limits) {
  if (n < 1) throw ValidationError("word length must be >= 1");
  if (sft.empty()) return;
  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= sft.active_count();
  require_within_cap(count, limits, "words of length " + std::to_string(n));

  std::vector<Symbol> buf(static_cast<std::size_t>(n));
  std::vector<std::size_t> next(static_cast<std::size_t>(n), 0);
  // Iterative DFS: next[d] is the index of the next candidate at depth d.
  int depth = 0;
  while (depth >= 0) {
    std::span<const Symbol> cands =
        depth == 0 ? sft.active_symbols() : sft.successors(buf[depth - 1]);
    if (next[depth] >= cands.size()) {
      next[depth] = 0;
      --depth;
      continue;
    }
    buf[depth] = cands[next[depth]++];
    if (depth + 1 == n) {
      visit(std::span<const Symbol>(buf));
    } else {
      ++depth;
    }
  }
}

template <class Visit>
void for_each_extension(const Sft& sft, std::span<const Symbol> prefix, int length, Visit&& visit) {
  const int p = static_cast<int>(prefix.size());
  if (p == 0) {
    for_each_word(sft, length, visit);
    return;
  }
  std::vector<Symbol> buf(prefix.begin(), prefix.end());
  if (length <= p) {
    visit(std::span<const Symbol>(buf.data(), static_cast<std::size_t>(length)));
    return;
  }
  buf.resize(static_cast<std::size_t>(length));
  std::vector<std::size_t> next(static_cast<std::size_t>(length), 0);
  int depth = p;
  while (depth >= p) {
    std::span<const Symbol> cands = sft.successors(buf[depth - 1]);
    if (next[depth] >= cands.size()) {
      next[depth] = 0;
      --depth;
      continue;
    }
    buf[depth] = cands[next[depth]++];
    if (depth + 1 == length) {
      visit(std::span<const Symbol>(buf));
    } else {
      ++depth;
    }
  }
}

}  // namespace thermo
