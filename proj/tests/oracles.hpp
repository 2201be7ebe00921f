#pragma once

// Independent reference computations shared by the unit tests. Nothing here
// calls into the estimators under test.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "thermo/potentials.hpp"
#include "thermo/symbolic.hpp"

namespace oracle {

using thermo::Symbol;

inline std::vector<std::vector<Symbol>> words(const thermo::Sft& s, int n) {
  std::vector<std::vector<Symbol>> out{{}};
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<Symbol>> next;
    for (const auto& w : out)
      for (Symbol a = 0; a < s.alphabet_size(); ++a) {
        if (!s.active(a)) continue;
        if (!w.empty() && !s.allowed(w.back(), a)) continue;
        auto v = w;
        v.push_back(a);
        next.push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

inline Eigen::MatrixXd adjacency(const thermo::Sft& s) {
  const int k = s.alphabet_size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) a(i, j) = s.allowed(i, j) ? 1.0 : 0.0;
  return a;
}

/// Weighted transfer matrix on (r-1)-words (symbols for r = 1), built from
/// the potential's values only.
inline Eigen::MatrixXd transfer_matrix(const thermo::Potential& phi) {
  const auto& s = phi.system();
  const int r = phi.range();
  const int b = std::max(r - 1, 1);
  const auto nodes = words(s, b);
  std::map<std::vector<Symbol>, int> id;
  for (std::size_t i = 0; i < nodes.size(); ++i) id[nodes[i]] = static_cast<int>(i);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nodes.size(), nodes.size());
  for (const auto& w : words(s, b + 1)) {
    std::vector<Symbol> from(w.begin(), w.begin() + b), to(w.end() - b, w.end());
    m(id[from], id[to]) = std::exp(phi(std::span<const Symbol>(w.data(), static_cast<std::size_t>(r))));
  }
  return m;
}

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  double best = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, std::abs(es.eigenvalues()[i]));
  return best;
}

inline double log_radius(const thermo::Potential& phi) { return std::log(spectral_radius(transfer_matrix(phi))); }

/// Max mean over simple cycles of a weighted matrix (weight 0 entries absent).
inline double max_cycle_mean(const Eigen::MatrixXd& logw, const Eigen::MatrixXi& edge) {
  const int n = static_cast<int>(logw.rows());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> path;
  std::vector<char> on(n, 0);
  std::function<void(int, double)> go = [&](int v, double sum) {
    for (int w = 0; w < n; ++w) {
      if (!edge(v, w)) continue;
      if (w == path.front()) {
        best = std::max(best, (sum + logw(v, w)) / static_cast<double>(path.size()));
      } else if (w > path.front() && !on[w]) {
        on[w] = 1;
        path.push_back(w);
        go(w, sum + logw(v, w));
        path.pop_back();
        on[w] = 0;
      }
    }
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    std::fill(on.begin(), on.end(), 0);
    on[s] = 1;
    go(s, 0.0);
  }
  return best;
}

inline bool strongly_connected(const thermo::Sft& s) {
  const int k = s.alphabet_size();
  Eigen::MatrixXi r = Eigen::MatrixXi::Zero(k, k);
  std::vector<int> used;
  for (int i = 0; i < k; ++i) {
    bool any = false;
    for (int j = 0; j < k; ++j) {
      r(i, j) = s.allowed(i, j);
      any = any || s.allowed(i, j) || s.allowed(j, i);
    }
    if (any) used.push_back(i);
  }
  for (int m = 0; m < k; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (r(i, m) && r(m, j)) r(i, j) = 1;
  for (int i : used)
    for (int j : used)
      if (!r(i, j)) return false;
  return !used.empty();
}

/// Root of a decreasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double golden_log() { return std::log((1.0 + std::sqrt(5.0)) / 2.0); }

}  // namespace oracle
