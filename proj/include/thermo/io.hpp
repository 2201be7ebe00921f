#pragma once

// Input-file parsers and the CSV/JSON report writer.
//
// Common rules: '#' starts a comment, blank lines are ignored, keywords are
// lower case, tokens are separated by whitespace.
//
// System file
//   alphabet 2
//   labels a b          (optional, one label per symbol)
//   matrix
//   11                  (k rows of k 0/1 digits; spaces between digits allowed)
//   10
//
// Potential table (needs a system)
//   range 2
//   00 0.5              (one line per admissible word: word, value)
//
// Cocycle file
//   dim 2
//   matrix 0            (then d rows of d reals; one block per symbol)
//
// Markov file
//   states 2
//   transition          (then k rows of k reals)
//   stationary          (optional, then one row of k reals)
//
// IFS file
//   branch 0.3333333333333333 0
//   branch 0.3333333333333333 0.6666666666666666
//   separated true      (optional, default true)
//   unstable_dim 1      (optional, default 1)
//   coding              (optional, then k rows of 0/1 digits)

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "thermo/geometry.hpp"
#include "thermo/markov.hpp"
#include "thermo/potentials.hpp"
#include "thermo/pressure.hpp"
#include "thermo/symbolic.hpp"

namespace thermo {

struct SystemFile {
  Sft sft;
  std::vector<std::string> labels;
};

SystemFile parse_system(std::istream& in);
Potential parse_potential(std::istream& in, const Sft& sft);
MatrixCocycle parse_cocycle(std::istream& in);
MarkovMeasure parse_markov(std::istream& in);
ConformalIFS parse_ifs(std::istream& in);

/// Opens `path` and dispatches; errors carry the path.
SystemFile load_system(const std::string& path);
Potential load_potential(const std::string& path, const Sft& sft);
MatrixCocycle load_cocycle(const std::string& path);
MarkovMeasure load_markov(const std::string& path);
ConformalIFS load_ifs(const std::string& path);

/// Rows of PressureEstimate records under one command and seed. Columns:
/// schema,command,method,n,N,eps_exp,alpha,rho,depth,value,lower,upper,diagnostics,notes
class Report {
 public:
  static constexpr int kSchema = 1;

  Report(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

  /// Rows without a bracket get [value, value] and a "point value" note.
  void add(PressureEstimate row);
  const std::vector<PressureEstimate>& rows() const { return rows_; }

  std::string csv() const;
  std::string json() const;

 private:
  std::string command_;
  std::uint64_t seed_;
  std::vector<PressureEstimate> rows_;
};

/// Shortest text that reads back to the same double ("%.17g" grade).
std::string format_double(double v);

}  // namespace thermo
