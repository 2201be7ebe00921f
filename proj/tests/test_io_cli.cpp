#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "thermo/io.hpp"

using namespace thermo;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(THERMO_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(THERMO_DATA_DIR) + "/" + name; }

// method -> value from the CSV body.
double csv_value(const std::string& text, const std::string& method) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() > 9 && cells[2] == method) return std::stod(cells[9]);
  }
  FAIL("no row for " << method);
  return 0;
}

}  // namespace

TEST_CASE("system files") {
  std::istringstream in("# golden\nalphabet 2\nlabels a b\nmatrix\n1 1\n10\n");
  const auto f = parse_system(in);
  CHECK(f.sft == Sft::golden_mean());
  CHECK(f.labels == std::vector<std::string>{"a", "b"});
  std::istringstream bad("alphabet 2\nmatrix\n12\n10\n");
  CHECK_THROWS_AS(parse_system(bad), ValidationError);
  std::istringstream short_rows("alphabet 3\nmatrix\n111\n111\n");
  CHECK_THROWS_AS(parse_system(short_rows), ValidationError);
  CHECK_THROWS_AS(load_system("/nonexistent/file"), ValidationError);
}

TEST_CASE("potential, cocycle, Markov and IFS files") {
  std::istringstream pot("range 2\n00 0.5\n01 -1\n10 2\n");
  const auto phi = parse_potential(pot, Sft::golden_mean());
  CHECK(phi(std::vector<Symbol>{1, 0}) == 2.0);
  std::istringstream missing("range 2\n00 0.5\n");
  CHECK_THROWS_AS(parse_potential(missing, Sft::golden_mean()), ValidationError);

  const auto c = load_cocycle(data("diagonal.cocycle"));
  REQUIRE(c.matrices.size() == 2);
  CHECK(c.matrices[1](0, 0) == 3.0);

  const auto mu = load_markov(data("bernoulli03.markov"));
  CHECK(mu.stationary(0) == doctest::Approx(0.3));
  std::istringstream rows("states 2\ntransition\n0.5 0.6\n0.5 0.5\n");
  CHECK_THROWS_AS(parse_markov(rows), ValidationError);

  const auto ifs = load_ifs(data("golden_third.ifs"));
  CHECK(ifs.branches.size() == 2);
  CHECK(ifs.coding == Sft::golden_mean());
  CHECK_FALSE(load_ifs(data("touching_halves.ifs")).separated);
}

TEST_CASE("report rows round-trip through CSV and JSON") {
  Report rep("pressure", 7);
  PressureEstimate e;
  e.method = "demo";
  e.value = 0.1 + 0.2;
  e.params.n = 3;
  e.diagnostics = {{1, 0.5}, {2, 1.0 / 3}};
  e.notes = {"a, b", "c"};
  rep.add(e);
  PressureEstimate inf;
  inf.method = "unbounded";
  inf.value = -std::numeric_limits<double>::infinity();
  rep.add(inf);

  const auto csv = rep.csv();
  CHECK(csv.rfind("# thermo report schema=1 command=pressure seed=7\n", 0) == 0);
  CHECK(csv.find("schema,command,method,n,N,eps_exp,alpha,rho,depth,value,lower,upper,diagnostics,notes") !=
        std::string::npos);
  CHECK(std::stod(format_double(e.value)) == e.value);

  const auto j = nlohmann::json::parse(rep.json());
  CHECK(j["seed"] == 7);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["value"].get<double>() == e.value);
  CHECK(j["rows"][0]["lower"].get<double>() == e.value);
  CHECK(j["rows"][0]["n"] == 3);
  CHECK(j["rows"][0]["diagnostics"][1][1].get<double>() == 1.0 / 3);
  CHECK(j["rows"][1]["value"].is_string());
}

TEST_CASE("cli: pressure on the golden-mean fixture") {
  const auto r = cli("pressure --system " + data("golden_mean.sft"));
  REQUIRE(r.status == 0);
  const double g = oracle::golden_log();
  CHECK(std::abs(csv_value(r.out, "perron") - g) < 1e-12);
  CHECK(std::abs(csv_value(r.out, "periodic") - g) < 0.01);
  CHECK(std::abs(csv_value(r.out, "spanning") - g) < 0.05);
  CHECK(std::abs(csv_value(r.out, "caratheodory") - g) < 1e-6);
}

TEST_CASE("cli: dimension on the middle-third fixture") {
  const auto r = cli("dimension --ifs " + data("middle_third.ifs") + " --depth 12");
  REQUIRE(r.status == 0);
  const double d = std::log(2.0) / std::log(3.0);
  CHECK(std::abs(csv_value(r.out, "bowen-root") - d) < 1e-9);
  CHECK(std::abs(csv_value(r.out, "moran-root") - csv_value(r.out, "bowen-root")) < 1e-9);
  CHECK(std::abs(csv_value(r.out, "box-counting") - d) < 0.02);
}

TEST_CASE("cli: JSON output and flags after the subcommand") {
  const auto r = cli("bowen --ifs " + data("golden_third.ifs") + " --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "bowen");
  CHECK(std::abs(j["rows"][0]["value"].get<double>() - oracle::golden_log() / std::log(3.0)) < 1e-9);
}

TEST_CASE("cli: exit statuses") {
  CHECK(cli("pressure").status == 2);
  CHECK(cli("pressure --system /nonexistent").status == 2);
  CHECK(cli("pressure --system " + data("golden_mean.sft") + " --n-max 0").status == 2);
  CHECK(cli("frobnicate").status == 2);
  CHECK(cli("pressure --system " + data("full_shift3.sft") + " --n-max 20 --enum-cap 100000").status == 3);
  CHECK(cli("sequence-pressure --system " + data("full_shift2.sft") + " --cocycle " + data("diagonal.cocycle")).status == 0);
}

TEST_CASE("cli: reports are byte-identical across runs") {
  const std::string args = "variational --system " + data("full_shift2.sft") + " --potential " + data("range2.pot") +
                           " --seed 5 --samples 20 --n-max 8";
  const auto a = cli(args), b = cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("seed=5") != std::string::npos);
}
