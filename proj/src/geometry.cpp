#include "thermo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "thermo/pressure.hpp"
#include "thermo/variational.hpp"

namespace thermo {

ConformalIFS ConformalIFS::make(std::vector<IfsBranch> branches, std::optional<Sft> coding, bool separated,
                                int unstable_dim) {
  if (branches.empty()) throw ValidationError("IFS needs at least one branch");
  if (unstable_dim < 1) throw ValidationError("unstable dimension must be >= 1");
  for (const auto& b : branches) {
    if (!(b.ratio > 0.0 && b.ratio < 1.0)) throw ValidationError("branch ratio must lie in (0, 1)");
    if (b.offset < -1e-12 || b.offset + b.ratio > 1.0 + 1e-12) {
      throw ValidationError("branch image leaves [0, 1]");
    }
  }
  const int k = static_cast<int>(branches.size());
  Sft code = coding ? *coding : Sft::full_shift(k);
  if (code.alphabet_size() != k) throw ValidationError("coding alphabet does not match the branch count");
  if (code.empty()) throw ValidationError("coding admits no infinite word");
  if (separated) {
    std::vector<IfsBranch> sorted = branches;
    std::sort(sorted.begin(), sorted.end(), [](const IfsBranch& a, const IfsBranch& b) { return a.offset < b.offset; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].offset - (sorted[i - 1].offset + sorted[i - 1].ratio) <= 1e-12) {
        throw ValidationError("branch images are not pairwise disjoint");
      }
    }
  }
  return ConformalIFS{std::move(branches), std::move(code), separated, unstable_dim};
}

std::vector<double> ConformalIFS::ratios() const {
  std::vector<double> r;
  for (const auto& b : branches) r.push_back(b.ratio);
  return r;
}

BowenRoot bowen_root(const std::function<double(double)>& pressure, double t_max) {
  if (!(t_max > 0.0)) throw ValidationError("probe range must be positive");
  BowenRoot root;
  constexpr int kProbes = 8;
  for (int i = 0; i <= kProbes; ++i) {
    const double t = t_max * i / kProbes;
    root.probes.emplace_back(t, pressure(t));
  }
  for (std::size_t i = 1; i < root.probes.size(); ++i) {
    if (root.probes[i].second > root.probes[i - 1].second + 1e-12) {
      throw ValidationError("pressure increases between probes");
    }
  }
  const double f0 = root.probes.front().second;
  if (std::abs(f0) <= 1e-12) {
    root.residual = std::abs(f0);
    return root;
  }
  if (f0 < 0.0) throw ValidationError("pressure at t = 0 is negative: no root in [0, T]");
  std::size_t j = 1;
  while (j < root.probes.size() && root.probes[j].second > 0.0) ++j;
  if (j == root.probes.size()) throw ValidationError("pressure stays positive on [0, T]");
  double lo = root.probes[j - 1].first, hi = root.probes[j].first;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pressure(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  root.lo = lo;
  root.hi = hi;
  root.t_star = 0.5 * (lo + hi);
  root.residual = std::abs(pressure(root.t_star));
  if (root.residual > 1e-9) {
    throw NumericalError("Bowen root residual " + std::to_string(root.residual) + " above 1e-9");
  }
  return root;
}

bool convex_on_probes(const BowenRoot& root, double tol) {
  const auto& p = root.probes;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    if (p[i - 1].second - 2.0 * p[i].second + p[i + 1].second < -tol) return false;
  }
  return true;
}

double moran_root(const std::vector<double>& ratios) {
  if (ratios.empty()) throw ValidationError("Moran equation needs at least one ratio");
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("Moran ratios must lie in (0, 1)");
  }
  auto f = [&](double s) {
    double acc = 0.0;
    for (double r : ratios) acc += std::pow(r, s);
    return acc - 1.0;
  };
  if (f(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

UnstablePotential unstable_potential(const ConformalIFS& ifs) {
  std::vector<double> values;
  for (const auto& b : ifs.branches) values.push_back(ifs.unstable_dim * -std::log(b.ratio));
  auto phi = Potential::from_symbol_values(ifs.coding, values);
  auto seq = PotentialSequence::additive(phi);
  return {std::move(phi), std::move(seq)};
}

BowenRoot subsystem_dimension(const ConformalIFS& ifs, const Sft& sub) {
  const auto u = unstable_potential(ifs);
  return bowen_root([&](double t) { return perron_pressure(sub, u.phi.scaled(-t)); });
}

BowenRoot ifs_dimension(const ConformalIFS& ifs) {
  if (!ifs.separated) throw ValidationError("Bowen dimension needs a separated IFS");
  return subsystem_dimension(ifs, ifs.coding);
}

BoxDimension box_dimension(const ConformalIFS& ifs, int depth, const Limits& limits) {
  if (depth < 1 || depth > 24) throw ValidationError("box-counting depth must lie in 1..24");
  const int k = static_cast<int>(ifs.branches.size());
  std::vector<Symbol> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Symbol a, Symbol b) { return ifs.branches[a].offset < ifs.branches[b].offset; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& p = ifs.branches[order[i - 1]];
    if (ifs.branches[order[i]].offset < p.offset + p.ratio - 1e-12) {
      throw ValidationError("box counting needs non-overlapping branch images");
    }
  }
  const double target = std::ldexp(1.0, -(depth + 2));
  std::vector<double> count(static_cast<std::size_t>(depth) + 1, 0.0);
  std::vector<long long> last(static_cast<std::size_t>(depth) + 1, -1);
  double emitted = 0.0;

  // Intervals arrive left to right, so each grid only needs its last box.
  auto emit = [&](double a, double len) {
    if (++emitted > static_cast<double>(limits.enumeration_cap)) {
      throw CapExceeded("box counting needs more than " + std::to_string(limits.enumeration_cap) + " intervals");
    }
    for (int j = 0; j <= depth; ++j) {
      const double scale = std::ldexp(1.0, j);
      const long long top = static_cast<long long>(scale) - 1;
      const long long first = std::clamp(static_cast<long long>(std::floor(a * scale)), 0LL, top);
      const long long lastbox = std::clamp(static_cast<long long>(std::floor((a + len) * scale)), 0LL, top);
      const long long from = std::max(first, last[j] + 1);
      if (lastbox >= from) {
        count[j] += static_cast<double>(lastbox - from + 1);
        last[j] = lastbox;
      }
    }
  };

  struct Frame {
    double a, len;
    Symbol sym;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (Symbol s : order) {
    if (!ifs.coding.active(s)) continue;
    stack.push_back({ifs.branches[s].offset, ifs.branches[s].ratio, s, 0});
    while (!stack.empty()) {
      auto& f = stack.back();
      if (f.len <= target) {
        emit(f.a, f.len);
        stack.pop_back();
        continue;
      }
      if (f.next == order.size()) {
        stack.pop_back();
        continue;
      }
      const Symbol c = order[f.next++];
      if (!ifs.coding.allowed(f.sym, c)) continue;
      const Frame child{f.a + f.len * ifs.branches[c].offset, f.len * ifs.branches[c].ratio, c, 0};
      stack.push_back(child);
    }
  }

  BoxDimension out;
  for (int j = 0; j <= depth; ++j) out.counts.emplace_back(j, count[j]);
  out.fit_from = (depth + 1) / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int j = out.fit_from; j <= depth; ++j) {
    const double x = j * std::log(2.0), y = std::log(count[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  const double denom = m * sxx - sx * sx;
  out.estimate = denom > 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
  return out;
}

namespace {

void finish_chain(LowerBoundChain& out) {
  out.monotone = true;
  for (std::size_t i = 1; i < out.roots.size(); ++i) {
    if (out.roots[i].t_star < out.roots[i - 1].t_star - 1e-12) out.monotone = false;
  }
  out.bounded = out.roots.empty() || out.roots.back().t_star <= out.full + 1e-9;
}

}  // namespace

LowerBoundChain dimension_lower_bound(const ConformalIFS& ifs, const std::vector<Sft>& chain) {
  LowerBoundChain out;
  out.full = ifs_dimension(ifs).t_star;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Sft& s = chain[i];
    if (!ifs.coding.contains(s)) throw ValidationError("chain member is not a subsystem of the coding");
    if (s.empty() || !s.is_irreducible()) throw ValidationError("chain member is not irreducible");
    if (i > 0 && (!s.contains(chain[i - 1]) || s == chain[i - 1])) {
      throw ValidationError("non-nested chain");
    }
    out.roots.push_back(subsystem_dimension(ifs, s));
  }
  finish_chain(out);
  return out;
}

LowerBoundChain dimension_lower_bound(const ConformalIFS& ifs, const std::vector<BranchSystem>& chain) {
  LowerBoundChain out;
  out.full = ifs_dimension(ifs).t_star;
  const auto u = unstable_potential(ifs);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (!ifs.coding.contains(chain[i].system)) throw ValidationError("horseshoe is not in the coding");
    if (i > 0 && !nested_in(chain[i - 1], chain[i])) throw ValidationError("non-nested chain");
    const auto weighed = weigh_branches(chain[i], u.phi);
    out.roots.push_back(bowen_root([&](double t) {
      BranchSystem scaled = weighed;
      for (auto& b : scaled.branches) b.weight *= -t;
      return saturate_pressure(scaled);
    }));
  }
  finish_chain(out);
  return out;
}

}  // namespace thermo
