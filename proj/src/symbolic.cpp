#include "thermo/symbolic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace thermo {

Limits Limits::from_env() {
  Limits limits;
  if (const char* env = std::getenv("THERMO_ENUM_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      throw ValidationError(std::string("THERMO_ENUM_CAP is not a positive integer: ") + env);
    }
    limits.enumeration_cap = v;
  }
  return limits;
}

void require_within_cap(double count, const Limits& limits, const std::string& what) {
  if (count > static_cast<double>(limits.enumeration_cap)) {
    throw CapExceeded("enumeration cap exceeded: " + what + " needs " +
                      std::to_string(static_cast<long double>(count)) + " items (cap " +
                      std::to_string(limits.enumeration_cap) + ")");
  }
}

// ---------------------------------------------------------------------------

char symbol_char(Symbol s) {
  if (s >= 0 && s < 10) return static_cast<char>('0' + s);
  if (s >= 10 && s < 36) return static_cast<char>('a' + (s - 10));
  return '?';
}

std::string to_string(std::span<const Symbol> symbols) {
  std::string out;
  out.reserve(symbols.size());
  for (Symbol s : symbols) out.push_back(symbol_char(s));
  return out;
}

Word Word::parse(std::string_view text) {
  std::vector<Symbol> symbols;
  symbols.reserve(text.size());
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      symbols.push_back(c - '0');
    } else if (c >= 'a' && c <= 'z') {
      symbols.push_back(10 + (c - 'a'));
    } else {
      throw ValidationError("invalid symbol character '" + std::string(1, c) + "' in word");
    }
  }
  return Word(std::move(symbols));
}

std::string Word::str() const { return to_string(symbols_); }

// ---------------------------------------------------------------------------

Sft::Sft(int alphabet_size, std::vector<std::uint8_t> transitions)
    : k_(alphabet_size), transitions_(std::move(transitions)) {
  if (k_ < 1) throw ValidationError("alphabet size must be positive");
  if (transitions_.size() != static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_)) {
    throw ValidationError("transition matrix must be " + std::to_string(k_) + "x" +
                          std::to_string(k_));
  }
  for (auto t : transitions_) {
    if (t > 1) throw ValidationError("transition matrix entries must be 0 or 1");
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < k_; ++s) {
      bool out = false, in = false, touched = false;
      for (int t = 0; t < k_; ++t) {
        out = out || allowed(s, t);
        in = in || allowed(t, s);
      }
      touched = out || in;
      if (touched && !(out && in)) {
        for (int t = 0; t < k_; ++t) {
          transitions_[s * k_ + t] = 0;
          transitions_[t * k_ + s] = 0;
        }
        changed = true;
        pruned_ = true;
      }
    }
  }

  successors_.assign(static_cast<std::size_t>(k_), {});
  for (int s = 0; s < k_; ++s) {
    for (int t = 0; t < k_; ++t) {
      if (allowed(s, t)) successors_[s].push_back(t);
    }
    if (!successors_[s].empty()) active_.push_back(s);
  }
}

Sft Sft::full_shift(int k) {
  return Sft(k, std::vector<std::uint8_t>(static_cast<std::size_t>(k) * k, 1));
}

Sft Sft::golden_mean() { return Sft(2, {1, 1, 1, 0}); }

Sft Sft::from_rows(const std::vector<std::string>& rows) {
  const int k = static_cast<int>(rows.size());
  std::vector<std::uint8_t> t;
  t.reserve(static_cast<std::size_t>(k) * k);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != k) {
      throw ValidationError("transition matrix is not square: row '" + row + "' has length " +
                            std::to_string(row.size()) + ", expected " + std::to_string(k));
    }
    for (char c : row) {
      if (c != '0' && c != '1') {
        throw ValidationError("transition matrix entries must be 0 or 1, got '" +
                              std::string(1, c) + "'");
      }
      t.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  }
  return Sft(k, std::move(t));
}

int Sft::edge_count() const {
  return static_cast<int>(std::count(transitions_.begin(), transitions_.end(), 1));
}

bool Sft::admissible(std::span<const Symbol> w) const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0 || w[i] >= k_ || !active(w[i])) return false;
    if (i + 1 < w.size() && (w[i + 1] < 0 || w[i + 1] >= k_ || !allowed(w[i], w[i + 1]))) {
      return false;
    }
  }
  return true;
}

bool Sft::cyclically_admissible(std::span<const Symbol> w) const {
  return !w.empty() && admissible(w) && allowed(w.back(), w.front());
}

namespace {

std::vector<char> reach(const Sft& sft, Symbol from, bool forward) {
  const int k = sft.alphabet_size();
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  std::vector<Symbol> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    Symbol s = stack.back();
    stack.pop_back();
    for (Symbol t = 0; t < k; ++t) {
      const bool edge = forward ? sft.allowed(s, t) : sft.allowed(t, s);
      if (edge && !seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

}  // namespace

bool Sft::is_irreducible() const {
  if (active_.empty()) return false;
  auto fwd = reach(*this, active_.front(), true);
  auto bwd = reach(*this, active_.front(), false);
  for (Symbol s : active_) {
    if (!fwd[s] || !bwd[s]) return false;
  }
  return true;
}

int Sft::period() const {
  if (active_.empty()) return 0;
  std::vector<int> level(static_cast<std::size_t>(k_), -1);
  int g = 0;
  for (Symbol root : active_) {
    if (level[root] >= 0) continue;
    level[root] = 0;
    std::vector<Symbol> queue{root};
    for (std::size_t h = 0; h < queue.size(); ++h) {
      Symbol s = queue[h];
      for (Symbol t : successors_[s]) {
        if (level[t] < 0) {
          level[t] = level[s] + 1;
          queue.push_back(t);
        }
      }
    }
  }
  for (Symbol s : active_) {
    for (Symbol t : successors_[s]) g = std::gcd(g, std::abs(level[s] + 1 - level[t]));
  }
  return g;
}

bool Sft::is_primitive() const { return is_irreducible() && period() == 1; }

bool Sft::contains(const Sft& other) const {
  if (other.k_ != k_) return false;
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    if (other.transitions_[i] && !transitions_[i]) return false;
  }
  return true;
}

std::string Sft::rows_string() const {
  std::string out;
  for (int s = 0; s < k_; ++s) {
    if (s) out.push_back('/');
    for (int t = 0; t < k_; ++t) out.push_back(allowed(s, t) ? '1' : '0');
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Symbol> lexmin_extension(const Sft& sft, std::span<const Symbol> prefix, int length) {
  std::vector<Symbol> out(prefix.begin(), prefix.end());
  if (out.empty()) {
    if (sft.empty()) throw ValidationError("empty subshift has no words");
    out.push_back(sft.active_symbols().front());
  }
  while (static_cast<int>(out.size()) < length) {
    auto next = sft.successors(out.back());
    if (next.empty()) throw ValidationError("word cannot be extended: " + to_string(out));
    out.push_back(next.front());
  }
  out.resize(static_cast<std::size_t>(std::max<int>(length, 0)));
  return out;
}

std::vector<Symbol> random_extension(const Sft& sft, std::span<const Symbol> prefix, int length,
                                     std::mt19937_64& rng) {
  std::vector<Symbol> out(prefix.begin(), prefix.end());
  if (out.empty()) {
    if (sft.empty()) throw ValidationError("empty subshift has no words");
    auto act = sft.active_symbols();
    std::uniform_int_distribution<std::size_t> pick(0, act.size() - 1);
    out.push_back(act[pick(rng)]);
  }
  while (static_cast<int>(out.size()) < length) {
    auto next = sft.successors(out.back());
    if (next.empty()) throw ValidationError("word cannot be extended: " + to_string(out));
    std::uniform_int_distribution<std::size_t> pick(0, next.size() - 1);
    out.push_back(next[pick(rng)]);
  }
  return out;
}

std::vector<Word> enumerate_words(const Sft& sft, int n, const Limits& limits) {
  std::vector<Word> out;
  for_each_word(
      sft, n,
      [&](std::span<const Symbol> w) { out.emplace_back(std::vector<Symbol>(w.begin(), w.end())); },
      limits);
  return out;
}

std::vector<Word> enumerate_periodic(const Sft& sft, int N, const Limits& limits) {
  std::vector<Word> out;
  for_each_periodic(
      sft, N,
      [&](std::span<const Symbol> w) { out.emplace_back(std::vector<Symbol>(w.begin(), w.end())); },
      limits);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using Edge = std::pair<Symbol, Symbol>;

// Strong connectivity of the graph formed by `edges` over the vertices they
// touch. An empty edge set is not strongly connected.
bool edges_strongly_connected(int k, const std::vector<Edge>& edges) {
  if (edges.empty()) return false;
  std::vector<std::vector<Symbol>> fwd(static_cast<std::size_t>(k)), bwd(static_cast<std::size_t>(k));
  std::vector<char> touched(static_cast<std::size_t>(k), 0);
  for (auto [a, b] : edges) {
    fwd[a].push_back(b);
    bwd[b].push_back(a);
    touched[a] = touched[b] = 1;
  }
  auto sweep = [&](const std::vector<std::vector<Symbol>>& adj) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    std::vector<Symbol> stack{edges.front().first};
    seen[edges.front().first] = 1;
    while (!stack.empty()) {
      Symbol s = stack.back();
      stack.pop_back();
      for (Symbol t : adj[s]) {
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    for (int s = 0; s < k; ++s) {
      if (touched[s] && !seen[s]) return false;
    }
    return true;
  };
  return sweep(fwd) && sweep(bwd);
}

Sft sft_from_edges(int k, const std::vector<Edge>& edges) {
  std::vector<std::uint8_t> t(static_cast<std::size_t>(k) * k, 0);
  for (auto [a, b] : edges) t[a * k + b] = 1;
  return Sft(k, std::move(t));
}

}  // namespace

std::vector<Sft> irreducible_components(const Sft& sft) {
  const int k = sft.alphabet_size();
  std::vector<int> comp(static_cast<std::size_t>(k), -1);
  std::vector<Sft> out;
  for (Symbol s : sft.active_symbols()) {
    if (comp[s] >= 0) continue;
    auto fwd = reach(sft, s, true);
    auto bwd = reach(sft, s, false);
    const int id = static_cast<int>(out.size()) + 1000;
    std::vector<Edge> edges;
    for (Symbol t : sft.active_symbols()) {
      if (fwd[t] && bwd[t]) comp[t] = id;
    }
    for (Symbol a : sft.active_symbols()) {
      for (Symbol b : sft.successors(a)) {
        if (comp[a] == id && comp[b] == id) edges.emplace_back(a, b);
      }
    }
    if (!edges.empty()) out.push_back(sft_from_edges(k, edges));
  }
  return out;
}

std::vector<Sft> transitive_subsystems(const Sft& sft, int max_count, const Limits& limits) {
  const int k = sft.alphabet_size();
  std::vector<Edge> all;
  for (Symbol a : sft.active_symbols()) {
    for (Symbol b : sft.successors(a)) all.emplace_back(a, b);
  }
  const int e = static_cast<int>(all.size());
  std::vector<Sft> out;
  if (e == 0) return out;

  auto sort_key_less = [](std::uint64_t x, std::uint64_t y) {
    const int px = std::popcount(x), py = std::popcount(y);
    if (px != py) return px > py;
    return x > y;
  };

  if (e < 63 && std::ldexp(1.0, e) <= static_cast<double>(limits.enumeration_cap)) {
    // Bit (e-1-i) is edge i in row-major order so numeric order matches the
    // lexicographic order of transition patterns.
    std::vector<std::uint64_t> masks;
    std::vector<Edge> chosen;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << e); ++mask) {
      chosen.clear();
      for (int i = 0; i < e; ++i) {
        if (mask >> (e - 1 - i) & 1u) chosen.push_back(all[i]);
      }
      if (edges_strongly_connected(k, chosen)) masks.push_back(mask);
    }
    std::sort(masks.begin(), masks.end(), sort_key_less);
    if (max_count >= 0 && static_cast<int>(masks.size()) > max_count) masks.resize(max_count);
    for (auto mask : masks) {
      chosen.clear();
      for (int i = 0; i < e; ++i) {
        if (mask >> (e - 1 - i) & 1u) chosen.push_back(all[i]);
      }
      out.push_back(sft_from_edges(k, chosen));
    }
    return out;
  }

  const int a = sft.active_count();
  if (a < 63 && std::ldexp(1.0, a) <= static_cast<double>(limits.enumeration_cap)) {
    auto act = sft.active_symbols();
    std::vector<std::pair<int, std::vector<Edge>>> found;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << a); ++mask) {
      std::vector<Edge> chosen;
      for (auto [x, y] : all) {
        auto ix = std::find(act.begin(), act.end(), x) - act.begin();
        auto iy = std::find(act.begin(), act.end(), y) - act.begin();
        if ((mask >> ix & 1u) && (mask >> iy & 1u)) chosen.emplace_back(x, y);
      }
      // Induced subgraph must use every selected symbol.
      std::vector<char> used(static_cast<std::size_t>(k), 0);
      for (auto [x, y] : chosen) used[x] = used[y] = 1;
      bool all_used = true;
      for (int i = 0; i < a; ++i) {
        if ((mask >> i & 1u) && !used[act[i]]) all_used = false;
      }
      if (all_used && edges_strongly_connected(k, chosen)) {
        found.emplace_back(static_cast<int>(chosen.size()), std::move(chosen));
      }
    }
    for (auto& [cnt, edges] : found) out.push_back(sft_from_edges(k, edges));
  } else {
    out = irreducible_components(sft);
  }
  std::stable_sort(out.begin(), out.end(), [](const Sft& x, const Sft& y) {
    if (x.edge_count() != y.edge_count()) return x.edge_count() > y.edge_count();
    return x.transitions() > y.transitions();
  });
  if (max_count >= 0 && static_cast<int>(out.size()) > max_count) out.resize(max_count);
  return out;
}

// ---------------------------------------------------------------------------

BranchSystem first_return_horseshoe(const Sft& sft, const Word& base, int n, double rho,
                                    const HorseshoeOptions& options) {
  if (base.empty() || !sft.admissible(base.symbols())) {
    throw ValidationError("base word '" + base.str() + "' is not admissible");
  }
  if (n < 1) throw ValidationError("window start n must be >= 1");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");

  int hi;
  if (std::isinf(rho)) {
    if (options.max_return <= 0) {
      throw ValidationError("infinite rho requires an explicit max_return truncation");
    }
    hi = options.max_return;
  } else {
    hi = static_cast<int>(std::floor((1.0 + rho) * n + 1e-9));
    if (options.max_return > 0) hi = std::min(hi, options.max_return);
  }
  if (hi < n) throw ValidationError("return window [n, (1+rho)n] is empty");

  const int b = static_cast<int>(base.size());
  auto base_syms = base.symbols();
  std::vector<Symbol> s(base_syms.begin(), base_syms.end());
  s.resize(static_cast<std::size_t>(b + hi));
  std::vector<std::size_t> next(static_cast<std::size_t>(b + hi), 0);

  BranchSystem out;
  out.system = sft;
  out.base = base;
  out.window_lo = n;
  out.window_hi = hi;
  out.rule = options.rule;

  std::uint64_t visited = 0;
  auto ends_with_base = [&](int len) {
    return std::equal(base_syms.begin(), base_syms.end(), s.begin() + (len - b));
  };

  // DFS over continuations of the base; `depth` is the position being filled
  // and never exceeds b + hi - 1.
  int depth = b;
  while (depth >= b) {
    if (next[depth] >= sft.successors(s[depth - 1]).size()) {
      next[depth] = 0;
      --depth;
      continue;
    }
    s[depth] = sft.successors(s[depth - 1])[next[depth]++];
    const int len = depth + 1;
    const int r = len - b;
    if (++visited > options.limits.enumeration_cap) {
      throw CapExceeded("enumeration cap exceeded while building horseshoe (window up to " +
                        std::to_string(hi) + ")");
    }
    if (ends_with_base(len)) {
      if (r >= n) {
        out.branches.push_back(
            Branch{Word(std::vector<Symbol>(s.begin(), s.begin() + r)), r, 0.0});
        continue;  // stop: first return inside the window
      }
      if (options.rule == ReturnRule::strict) continue;  // earlier return, not a branch
    }
    if (r < hi) ++depth;
  }

  if (out.branches.empty()) {
    throw EmptyBranchSet("no return to base '" + base.str() + "' in window [" +
                         std::to_string(n) + ", " + std::to_string(hi) + "]");
  }
  std::sort(out.branches.begin(), out.branches.end(),
            [](const Branch& x, const Branch& y) { return x.word < y.word; });
  return out;
}

std::vector<Symbol> branch_orbit(const BranchSystem& bs, const Branch& b, int extra) {
  std::vector<Symbol> w(b.word.symbols().begin(), b.word.symbols().end());
  auto base = bs.base.symbols();
  w.insert(w.end(), base.begin(), base.end());
  const int want = b.return_time + extra;
  if (static_cast<int>(w.size()) >= want) {
    w.resize(static_cast<std::size_t>(want));
    return w;
  }
  return lexmin_extension(bs.system, w, want);
}

double saturate_pressure(const BranchSystem& bs) {
  if (bs.branches.empty()) throw EmptyBranchSet("saturate pressure of an empty branch set");
  double lo = -std::numeric_limits<double>::infinity();
  for (const auto& b : bs.branches) {
    if (!std::isfinite(b.weight)) throw ValidationError("non-finite branch weight");
    lo = std::max(lo, b.weight / b.return_time);
  }
  const double count = static_cast<double>(bs.branches.size());
  double hi = lo + std::log(count);

  // log of sum_i exp(w_i - s R_i); strictly decreasing in s.
  auto log_sum = [&](double s) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& b : bs.branches) m = std::max(m, b.weight - s * b.return_time);
    double acc = 0.0;
    for (const auto& b : bs.branches) acc += std::exp(b.weight - s * b.return_time - m);
    return m + std::log(acc);
  };

  for (int it = 0; it < 400 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (log_sum(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = std::abs(log_sum(lo)) <= std::abs(log_sum(hi)) ? lo : hi;
  const double residual = std::abs(std::expm1(log_sum(s)));
  if (residual > 1e-12) {
    throw NumericalError("saturate pressure residual " + std::to_string(residual) +
                         " above 1e-12");
  }
  return s;
}

bool nested_in(const BranchSystem& inner, const BranchSystem& outer) {
  if (!(inner.base == outer.base)) return false;
  for (const auto& b : inner.branches) {
    auto it = std::lower_bound(outer.branches.begin(), outer.branches.end(), b.word,
                               [](const Branch& x, const Word& w) { return x.word < w; });
    if (it == outer.branches.end() || !(it->word == b.word)) return false;
  }
  return true;
}

}  // namespace thermo
