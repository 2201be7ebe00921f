#include "thermo/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermo/errors.hpp"

namespace thermo {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Csr {
  std::vector<int> start;
  std::vector<int> target;
  std::vector<double> weight;
};

// Rows indexed by `from` (or by `to` when transposed), weights shifted by
// -shift and exponentiated.
Csr build_csr(const WeightedDigraph& g, bool transpose, double shift) {
  const int n = g.node_count();
  Csr c;
  c.start.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : g.edges()) ++c.start[(transpose ? e.to : e.from) + 1];
  for (int i = 0; i < n; ++i) c.start[i + 1] += c.start[i];
  c.target.resize(g.edges().size());
  c.weight.resize(g.edges().size());
  std::vector<int> fill(c.start.begin(), c.start.end() - 1);
  for (const auto& e : g.edges()) {
    const int row = transpose ? e.to : e.from;
    const int pos = fill[row]++;
    c.target[pos] = transpose ? e.from : e.to;
    c.weight[pos] = std::exp(e.log_weight - shift);
  }
  return c;
}

struct PowerOutcome {
  double lower;
  double upper;
  int iterations;
  std::vector<double> vec;
};

PowerOutcome shifted_power(const Csr& m, double tol) {
  const std::size_t n = m.start.size() - 1;
  std::vector<double> x(n, 1.0), y(n);
  constexpr int kMaxIterations = 2'000'000;
  double lo = 0.0, hi = 0.0;
  for (int it = 1; it <= kMaxIterations; ++it) {
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int p = m.start[i]; p < m.start[i + 1]; ++p) acc += m.weight[p] * x[m.target[p]];
      y[i] = acc;
      const double ratio = acc / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (!(lo > 0.0) || !std::isfinite(hi)) {
      throw NumericalError("power iteration lost positivity (graph not irreducible?)");
    }
    if (std::log(hi) - std::log(lo) < tol) return {lo, hi, it, x};
    // The shift keeps every peripheral eigenvalue of a periodic matrix
    // strictly inside the Perron root's circle.
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = y[i] + hi * x[i];
      top = std::max(top, x[i]);
    }
    for (auto& v : x) v /= top;
  }
  throw NumericalError("power iteration did not converge: bracket [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
}

}  // namespace

WeightedDigraph::WeightedDigraph(int nodes, std::vector<WeightedEdge> edges)
    : n_(nodes), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) {
      throw ValidationError("edge endpoint out of range");
    }
  }
}

std::vector<std::vector<int>> WeightedDigraph::components() const {
  std::vector<std::vector<int>> fwd(static_cast<std::size_t>(n_)), bwd(static_cast<std::size_t>(n_));
  for (const auto& e : edges_) {
    fwd[e.from].push_back(e.to);
    bwd[e.to].push_back(e.from);
  }
  // Kosaraju, iterative.
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n_));
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  for (int root = 0; root < n_; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      if (idx < fwd[v].size()) {
        const int w = fwd[v][idx++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(static_cast<std::size_t>(n_), -1);
  std::vector<std::vector<int>> out;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{*it};
    comp[*it] = id;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int w : bwd[v]) {
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
  }
  for (auto& c : out) std::sort(c.begin(), c.end());
  std::sort(out.begin(), out.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() < b.front(); });
  return out;
}

WeightedDigraph WeightedDigraph::induced(const std::vector<int>& nodes) const {
  std::vector<int> index(static_cast<std::size_t>(n_), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = static_cast<int>(i);
  std::vector<WeightedEdge> sub;
  for (const auto& e : edges_) {
    if (index[e.from] >= 0 && index[e.to] >= 0) {
      sub.push_back({index[e.from], index[e.to], e.log_weight});
    }
  }
  return WeightedDigraph(static_cast<int>(nodes.size()), std::move(sub));
}

bool WeightedDigraph::has_cycle_in(const std::vector<int>& component) const {
  if (component.size() > 1) return true;
  const int v = component.front();
  return std::any_of(edges_.begin(), edges_.end(),
                     [v](const WeightedEdge& e) { return e.from == v && e.to == v; });
}

PerronResult perron_irreducible(const WeightedDigraph& g, bool want_left, double tol) {
  if (g.node_count() == 0 || g.edges().empty()) {
    throw NumericalError("Perron root of an empty graph");
  }
  if (g.components().size() != 1) {
    throw NumericalError("Perron iteration needs a strongly connected graph");
  }
  double shift = kNegInf;
  for (const auto& e : g.edges()) shift = std::max(shift, e.log_weight);

  PerronResult res;
  auto right = shifted_power(build_csr(g, false, shift), tol);
  res.lower = shift + std::log(right.lower);
  res.upper = shift + std::log(right.upper);
  res.log_radius = 0.5 * (res.lower + res.upper);
  res.iterations = right.iterations;
  res.right = std::move(right.vec);
  if (want_left) {
    auto left = shifted_power(build_csr(g, true, shift), tol);
    res.left = std::move(left.vec);
    res.iterations += left.iterations;
  }
  return res;
}

double log_spectral_radius(const WeightedDigraph& g) {
  double best = kNegInf;
  for (const auto& comp : g.components()) {
    if (!g.has_cycle_in(comp)) continue;
    if (comp.size() == 1) {
      for (const auto& e : g.edges()) {
        if (e.from == comp.front() && e.to == comp.front()) best = std::max(best, e.log_weight);
      }
      continue;
    }
    best = std::max(best, perron_irreducible(g.induced(comp)).log_radius);
  }
  return best;
}

namespace {

// Karp's characterization on a strongly connected graph with source 0:
// max_v min_k (D_m(v) - D_k(v)) / (m - k), D_k = best walk weight of length k.
double karp_component(const WeightedDigraph& g) {
  const int m = g.node_count();
  auto step = [&](const std::vector<double>& cur, std::vector<double>& nxt) {
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (const auto& e : g.edges()) {
      if (cur[e.from] == kNegInf) continue;
      nxt[e.to] = std::max(nxt[e.to], cur[e.from] + e.log_weight);
    }
  };
  std::vector<double> cur(static_cast<std::size_t>(m), kNegInf), nxt(static_cast<std::size_t>(m));
  cur[0] = 0.0;
  for (int k = 0; k < m; ++k) {
    step(cur, nxt);
    std::swap(cur, nxt);
  }
  const std::vector<double> dm = cur;

  std::vector<double> worst(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
  std::fill(cur.begin(), cur.end(), kNegInf);
  cur[0] = 0.0;
  for (int k = 0; k < m; ++k) {
    for (int v = 0; v < m; ++v) {
      if (dm[v] == kNegInf || cur[v] == kNegInf) continue;
      worst[v] = std::min(worst[v], (dm[v] - cur[v]) / (m - k));
    }
    step(cur, nxt);
    std::swap(cur, nxt);
  }
  double best = kNegInf;
  for (int v = 0; v < m; ++v) {
    if (dm[v] != kNegInf) best = std::max(best, worst[v]);
  }
  return best;
}

}  // namespace

double max_cycle_mean(const WeightedDigraph& g) {
  double best = kNegInf;
  for (const auto& comp : g.components()) {
    if (!g.has_cycle_in(comp)) continue;
    best = std::max(best, karp_component(g.induced(comp)));
  }
  return best;
}

}  // namespace thermo
