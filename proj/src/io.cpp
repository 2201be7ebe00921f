#include "thermo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include <json.hpp>

namespace thermo {

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw ValidationError("line " + std::to_string(line.number) + ": " + what);
}

int to_int(const Line& line, const std::string& tok) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) fail(line, "expected an integer, got '" + tok + "'");
  return v;
}

double to_double(const Line& line, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) fail(line, "expected a finite number, got '" + tok + "'");
  return v;
}

// k rows of 0/1 digits starting at lines[at]; spaces between digits allowed.
std::vector<std::uint8_t> read_matrix01(const std::vector<Line>& lines, std::size_t& at, int k) {
  std::vector<std::uint8_t> out;
  for (int r = 0; r < k; ++r, ++at) {
    if (at >= lines.size()) throw ValidationError("matrix ends after " + std::to_string(r) + " of " + std::to_string(k) + " rows");
    std::string row;
    for (const auto& t : lines[at].tokens) row += t;
    if (static_cast<int>(row.size()) != k) {
      fail(lines[at], "matrix row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(k));
    }
    for (char c : row) {
      if (c != '0' && c != '1') fail(lines[at], "matrix entries must be 0 or 1");
      out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
  }
  return out;
}

std::vector<double> read_row(const Line& line, int k) {
  if (static_cast<int>(line.tokens.size()) != k) {
    fail(line, "expected " + std::to_string(k) + " numbers, got " + std::to_string(line.tokens.size()));
  }
  std::vector<double> v;
  for (const auto& t : line.tokens) v.push_back(to_double(line, t));
  return v;
}

bool to_bool(const Line& line, const std::string& tok) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  fail(line, "expected true or false, got '" + tok + "'");
}

template <class F>
auto with_file(const std::string& path, F&& parse) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return parse(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string opt_text(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, double>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

std::string join_notes(const std::vector<std::string>& notes) {
  std::string s;
  for (std::size_t i = 0; i < notes.size(); ++i) s += (i ? "; " : "") + notes[i];
  return s;
}

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

SystemFile parse_system(std::istream& in) {
  const auto lines = read_lines(in);
  SystemFile out;
  int k = 0;
  bool have_matrix = false;
  std::vector<std::uint8_t> trans;
  for (std::size_t i = 0; i < lines.size();) {
    const auto& line = lines[i];
    const auto& key = line.tokens[0];
    if (key == "alphabet") {
      if (line.tokens.size() != 2) fail(line, "usage: alphabet <k>");
      k = to_int(line, line.tokens[1]);
      if (k < 1) fail(line, "alphabet size must be positive");
      ++i;
    } else if (key == "labels") {
      out.labels.assign(line.tokens.begin() + 1, line.tokens.end());
      ++i;
    } else if (key == "matrix") {
      if (k < 1) fail(line, "alphabet must precede matrix");
      ++i;
      trans = read_matrix01(lines, i, k);
      have_matrix = true;
    } else {
      fail(line, "unknown keyword '" + key + "'");
    }
  }
  if (!have_matrix) throw ValidationError("system file has no matrix");
  if (!out.labels.empty() && static_cast<int>(out.labels.size()) != k) {
    throw ValidationError("labels count does not match the alphabet");
  }
  out.sft = Sft(k, std::move(trans));
  return out;
}

Potential parse_potential(std::istream& in, const Sft& sft) {
  const auto lines = read_lines(in);
  int range = 0;
  std::vector<std::pair<Word, double>> entries;
  for (const auto& line : lines) {
    if (line.tokens[0] == "range") {
      if (line.tokens.size() != 2) fail(line, "usage: range <r>");
      range = to_int(line, line.tokens[1]);
      continue;
    }
    if (range < 1) fail(line, "range must be declared first");
    if (line.tokens.size() != 2) fail(line, "expected '<word> <value>'");
    Word w;
    try {
      w = Word::parse(line.tokens[0]);
    } catch (const ValidationError& e) {
      fail(line, e.what());
    }
    for (Symbol s : w.symbols()) {
      if (s >= sft.alphabet_size()) fail(line, "symbol outside the alphabet");
    }
    entries.emplace_back(std::move(w), to_double(line, line.tokens[1]));
  }
  if (range < 1) throw ValidationError("potential file declares no range");
  return Potential::from_entries(sft, range, entries);
}

MatrixCocycle parse_cocycle(std::istream& in) {
  const auto lines = read_lines(in);
  int d = 0;
  MatrixCocycle out;
  for (std::size_t i = 0; i < lines.size();) {
    const auto& line = lines[i];
    if (line.tokens[0] == "dim") {
      if (line.tokens.size() != 2) fail(line, "usage: dim <d>");
      d = to_int(line, line.tokens[1]);
      if (d < 1) fail(line, "dimension must be positive");
      ++i;
    } else if (line.tokens[0] == "matrix") {
      if (d < 1) fail(line, "dim must precede matrix blocks");
      if (line.tokens.size() != 2 || to_int(line, line.tokens[1]) != static_cast<int>(out.matrices.size())) {
        fail(line, "matrix blocks must be numbered 0, 1, ... in order");
      }
      ++i;
      Eigen::MatrixXd m(d, d);
      for (int r = 0; r < d; ++r, ++i) {
        if (i >= lines.size()) throw ValidationError("cocycle matrix block is truncated");
        const auto row = read_row(lines[i], d);
        for (int c = 0; c < d; ++c) m(r, c) = row[c];
      }
      out.matrices.push_back(std::move(m));
    } else {
      fail(line, "unknown keyword '" + line.tokens[0] + "'");
    }
  }
  if (out.matrices.empty()) throw ValidationError("cocycle file has no matrices");
  return out;
}

MarkovMeasure parse_markov(std::istream& in) {
  const auto lines = read_lines(in);
  int k = 0;
  Eigen::MatrixXd p;
  std::optional<Eigen::VectorXd> pi;
  for (std::size_t i = 0; i < lines.size();) {
    const auto& line = lines[i];
    if (line.tokens[0] == "states") {
      if (line.tokens.size() != 2) fail(line, "usage: states <k>");
      k = to_int(line, line.tokens[1]);
      if (k < 1) fail(line, "state count must be positive");
      ++i;
    } else if (line.tokens[0] == "transition") {
      if (k < 1) fail(line, "states must precede transition");
      ++i;
      p.resize(k, k);
      for (int r = 0; r < k; ++r, ++i) {
        if (i >= lines.size()) throw ValidationError("transition matrix is truncated");
        const auto row = read_row(lines[i], k);
        for (int c = 0; c < k; ++c) p(r, c) = row[c];
      }
    } else if (line.tokens[0] == "stationary") {
      if (k < 1) fail(line, "states must precede stationary");
      ++i;
      if (i >= lines.size()) throw ValidationError("stationary vector is missing");
      const auto row = read_row(lines[i], k);
      pi = Eigen::Map<const Eigen::VectorXd>(row.data(), k);
      ++i;
    } else {
      fail(line, "unknown keyword '" + line.tokens[0] + "'");
    }
  }
  if (p.size() == 0) throw ValidationError("Markov file has no transition matrix");
  return pi ? MarkovMeasure::from_transition(p, *pi) : MarkovMeasure::from_transition(p);
}

ConformalIFS parse_ifs(std::istream& in) {
  const auto lines = read_lines(in);
  std::vector<IfsBranch> branches;
  bool separated = true;
  int dim = 1;
  std::optional<Sft> coding;
  for (std::size_t i = 0; i < lines.size();) {
    const auto& line = lines[i];
    const auto& key = line.tokens[0];
    if (key == "branch") {
      if (line.tokens.size() != 3) fail(line, "usage: branch <ratio> <offset>");
      branches.push_back({to_double(line, line.tokens[1]), to_double(line, line.tokens[2])});
      ++i;
    } else if (key == "separated") {
      if (line.tokens.size() != 2) fail(line, "usage: separated true|false");
      separated = to_bool(line, line.tokens[1]);
      ++i;
    } else if (key == "unstable_dim") {
      if (line.tokens.size() != 2) fail(line, "usage: unstable_dim <d>");
      dim = to_int(line, line.tokens[1]);
      ++i;
    } else if (key == "coding") {
      const int k = static_cast<int>(branches.size());
      if (k < 1) fail(line, "branches must precede coding");
      ++i;
      coding = Sft(k, read_matrix01(lines, i, k));
    } else {
      fail(line, "unknown keyword '" + key + "'");
    }
  }
  return ConformalIFS::make(std::move(branches), std::move(coding), separated, dim);
}

SystemFile load_system(const std::string& path) {
  return with_file(path, [](std::istream& in) { return parse_system(in); });
}
Potential load_potential(const std::string& path, const Sft& sft) {
  return with_file(path, [&](std::istream& in) { return parse_potential(in, sft); });
}
MatrixCocycle load_cocycle(const std::string& path) {
  return with_file(path, [](std::istream& in) { return parse_cocycle(in); });
}
MarkovMeasure load_markov(const std::string& path) {
  return with_file(path, [](std::istream& in) { return parse_markov(in); });
}
ConformalIFS load_ifs(const std::string& path) {
  return with_file(path, [](std::istream& in) { return parse_ifs(in); });
}

// ---------------------------------------------------------------------------

void Report::add(PressureEstimate row) {
  if (!row.bracket) {
    row.bracket = Bracket{row.value, row.value};
    row.notes.push_back("point value");
  }
  rows_.push_back(std::move(row));
}

std::string Report::csv() const {
  std::ostringstream out;
  out << "# thermo report schema=" << kSchema << " command=" << command_ << " seed=" << seed_ << "\n";
  out << "schema,command,method,n,N,eps_exp,alpha,rho,depth,value,lower,upper,diagnostics,notes\n";
  for (const auto& r : rows_) {
    std::string diag;
    for (std::size_t i = 0; i < r.diagnostics.size(); ++i) {
      diag += (i ? ";" : "") + std::to_string(r.diagnostics[i].first) + ":" + format_double(r.diagnostics[i].second);
    }
    out << kSchema << ',' << csv_field(command_) << ',' << csv_field(r.method) << ',' << opt_text(r.params.n) << ','
        << opt_text(r.params.N) << ',' << opt_text(r.params.eps_exp) << ',' << opt_text(r.params.alpha) << ','
        << opt_text(r.params.rho) << ',' << opt_text(r.params.depth) << ',' << format_double(r.value) << ','
        << format_double(r.bracket->lower) << ',' << format_double(r.bracket->upper) << ',' << csv_field(diag)
        << ',' << csv_field(join_notes(r.notes)) << '\n';
  }
  return out.str();
}

std::string Report::json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    nlohmann::json diag = nlohmann::json::array();
    for (const auto& [n, v] : r.diagnostics) diag.push_back({n, number_json(v)});
    rows.push_back({{"schema", kSchema},
                    {"command", command_},
                    {"method", r.method},
                    {"n", opt_json(r.params.n)},
                    {"N", opt_json(r.params.N)},
                    {"eps_exp", opt_json(r.params.eps_exp)},
                    {"alpha", opt_json(r.params.alpha)},
                    {"rho", opt_json(r.params.rho)},
                    {"depth", opt_json(r.params.depth)},
                    {"value", number_json(r.value)},
                    {"lower", number_json(r.bracket->lower)},
                    {"upper", number_json(r.bracket->upper)},
                    {"diagnostics", diag},
                    {"notes", join_notes(r.notes)}});
  }
  nlohmann::json doc = {{"schema", kSchema}, {"command", command_}, {"seed", seed_}, {"rows", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace thermo
