#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "thermo/potentials.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

/// x -> offset + ratio * x on [0, 1].
struct IfsBranch {
  double ratio = 0.5;
  double offset = 0.0;
};

/// One-dimensional similarity IFS with an optional coding restricting the
/// admissible compositions. Branch i acts as symbol i.
struct ConformalIFS {
  std::vector<IfsBranch> branches;
  Sft coding;
  bool separated = true;
  int unstable_dim = 1;

  /// Validates ratios in (0, 1), images inside [0, 1] and, when `separated`
  /// is set, pairwise disjoint images (gaps > 1e-12). Full-shift coding when
  /// none is given.
  static ConformalIFS make(std::vector<IfsBranch> branches, std::optional<Sft> coding = std::nullopt,
                           bool separated = true, int unstable_dim = 1);

  std::vector<double> ratios() const;
};

struct BowenRoot {
  double t_star = 0.0;
  double residual = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  /// (t, pressure) on the probe grid, t ascending.
  std::vector<std::pair<double, double>> probes;
};

/// Root of a non-increasing pressure function on [0, t_max]: 9 probes,
/// then bisection to width <= 1e-10. Root 0 when |f(0)| <= 1e-12.
/// Throws ValidationError when f(0) < 0, no probe is <= 0, or the probes
/// increase; NumericalError when the residual exceeds 1e-9.
BowenRoot bowen_root(const std::function<double(double)>& pressure, double t_max = 1.0);

/// Second differences of the probe values are >= -tol.
bool convex_on_probes(const BowenRoot& root, double tol = 1e-9);

/// Unique s >= 0 with sum r_i^s = 1, bisection to 1e-12.
double moran_root(const std::vector<double>& ratios);

struct UnstablePotential {
  Potential phi;            // unstable_dim * (-log ratio(w_0))
  PotentialSequence sequence;
};

UnstablePotential unstable_potential(const ConformalIFS& ifs);

/// Root t of P(coding, -t log J^u). The Hausdorff dimension of the attractor
/// is t * unstable_dim. Requires a separated IFS.
BowenRoot ifs_dimension(const ConformalIFS& ifs);

/// Root on a subsystem of the coding.
BowenRoot subsystem_dimension(const ConformalIFS& ifs, const Sft& sub);

struct BoxDimension {
  double estimate = 0.0;
  /// (j, N(j)): dyadic boxes of side 2^-j meeting the cover, j = 0..depth.
  std::vector<std::pair<int, double>> counts;
  int fit_from = 0;
};

/// Cylinder intervals refined to length <= 2^-(depth+2) are counted against
/// dyadic grids; the estimate is the least-squares slope of log N(j) against
/// j log 2 over j in [ceil(depth/2), depth]. depth <= 24. Images may touch
/// but not overlap.
BoxDimension box_dimension(const ConformalIFS& ifs, int depth, const Limits& limits = {});

struct LowerBoundChain {
  std::vector<BowenRoot> roots;
  double full = 0.0;
  bool monotone = false;
  bool bounded = false;
};

/// Chain of coded subsystems, each irreducible and strictly larger than the
/// previous by edge inclusion (ValidationError otherwise).
LowerBoundChain dimension_lower_bound(const ConformalIFS& ifs, const std::vector<Sft>& chain);

/// Chain of horseshoes in the coding, each nested in the next. Each root
/// solves saturate_pressure with branch weights -t S_R log J^u = 0.
LowerBoundChain dimension_lower_bound(const ConformalIFS& ifs, const std::vector<BranchSystem>& chain);

}  // namespace thermo
