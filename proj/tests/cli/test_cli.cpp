#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "json.hpp"

using namespace randcurv::cli;
namespace fs = std::filesystem;

namespace {

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  Csv csv;
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const auto sp = line.find(' ', 2);
    REQUIRE(sp != std::string::npos);
    csv.meta[line.substr(2, sp - 2)] = line.substr(sp + 1);
  }
  csv.columns = split(line);
  while (std::getline(in, line)) csv.rows.push_back(split(line));
  return csv;
}

double cell(const Csv& csv, std::size_t row, const std::string& column) {
  const auto it = std::find(csv.columns.begin(), csv.columns.end(), column);
  REQUIRE(it != csv.columns.end());
  return std::stod(csv.rows.at(row).at(static_cast<std::size_t>(it - csv.columns.begin())));
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("randcurv_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig config(const std::string& text, const std::string& command, std::uint64_t seed = 5) {
  ExperimentConfig c = parse_config(text, command);
  c.seed = seed;
  c.seed_source = "flag";
  return c;
}

const std::map<std::string, std::string> kSmallRuns{
    {"sample", "[run]\ngrid = 200\n[sample]\ndraws = 2\n"},
    {"p2", "[run]\nsamples = 500\ngrid = 256\n[p2]\namplitudes = 0.5, 0.4\n"},
    {"euler", "[run]\nsamples = 100\ndepth = 2\n[euler]\nthresholds = -10, 0, 10\n"},
    {"linf", "[run]\ngeometry = torus2\nscheme = power_law\ns = 2\ntruncation = 3\ntail_tolerance = 1\nsamples = 500\n"
             "grid = 12\n[linf]\nu = 0.1\nratio = 2\n"},
    {"heat", "[run]\n[heat]\nT = 0.01, 10\n"},
    {"bounds", "[bounds]\nn = 4\nsigma_v = 1\nsigma_2 = 1\n"},
    {"qsign", "[run]\ngeometry = sphere4\n[qsign]\nt = 0.02\n"},
};

const std::map<std::string, std::vector<std::string>> kSchemas{
    {"sample", {"index", "x", "y", "z", "weight", "f", "h", "R1"}},
    {"p2", {"a", "u", "estimate", "standard_error", "events", "n", "prediction", "ratio", "point_lower", "lower",
            "upper", "borell_tis", "refinement_delta", "warnings"}},
    {"euler", {"u", "mean_chi", "standard_error", "predicted", "z"}},
    {"linf", {"u", "a", "ratio", "estimate", "standard_error", "events", "n", "log_estimate", "asymptote",
              "log_ratio", "regime_ok", "refinement_delta", "flags"}},
    {"heat", {"T", "heat_sup", "sigma2_v", "small_T", "small_ratio", "large_T", "large_ratio", "lambda1",
              "multiplicity", "levels_used"}},
    {"bounds", {"a", "lower", "upper", "lower_limit", "upper_limit", "limit", "lower_gap", "upper_gap",
                "nd_negative"}},
    {"bounds_constants", {"n", "sigma_v", "sigma_2", "kappa", "delta0", "one_minus_delta0", "B",
                          "exponent_negative", "exponent_positive", "residual"}},
    {"qsign", {"a", "lower", "upper", "lower_limit", "upper_limit", "limit", "lower_gap", "upper_gap",
               "nd_negative"}},
};

int run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + RANDCURV_EXE + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("seed precedence: flag, then environment, then file") {
  ExperimentConfig c = parse_config("[run]\nseed = 11\n", "p2");
  CHECK(c.seed == 11);
  CHECK(c.seed_source == "file");
  ::setenv("RANDCURV_SEED", "22", 1);
  resolve_seed(c, std::nullopt);
  CHECK(c.seed == 22);
  CHECK(c.seed_source == "env");
  resolve_seed(c, 33);
  CHECK(c.seed == 33);
  CHECK(c.seed_source == "flag");
  ::setenv("RANDCURV_SEED", "x1", 1);
  ExperimentConfig d = parse_config("[run]\nseed = 11\n", "p2");
  CHECK_THROWS_AS(resolve_seed(d, std::nullopt), ConfigError);
  ::unsetenv("RANDCURV_SEED");
}

TEST_CASE("config hash is canonical") {
  const auto a = parse_config("[run]\nsamples = 10\ngrid=64\n[p2]\namplitudes = 0.5\n", "p2");
  const auto b = parse_config("# comment\n[p2]\namplitudes=0.5\n[run]\ngrid = 64\n  samples = 10\n", "p2");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 64);
  auto c = a;
  c.seed = 2;
  CHECK(c.hash() != a.hash());
  CHECK(parse_config("[run]\nsamples = 10\ngrid=64\n[p2]\namplitudes = 0.5\n", "euler").hash() != a.hash());
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config("[run]\nsampels = 3\n", "p2"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nope]\nx = 1\n", "p2"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nseed = -4\n", "p2"), ConfigError);
  CHECK_THROWS_AS(execute(config("[p2]\namplitudes = \n", "p2"), 1), ConfigError);
  CHECK_THROWS_AS(execute(config("[run]\nsamples = 0\n[p2]\namplitudes = 0.5\n", "p2"), 1), ConfigError);
  CHECK_THROWS_AS(execute(config("[run]\ngeometry = klein\n", "heat"), 1), ConfigError);
  CHECK_THROWS_AS(execute(config("[bounds]\namplitudes = 0.1, -1\n", "bounds"), 1), ConfigError);
}

TEST_CASE("every artifact follows its schema") {
  for (const auto& [cmd, text] : kSmallRuns) {
    CAPTURE(cmd);
    TempDir dir;
    const ExperimentConfig c = config(text, cmd);
    const RunRecord rec = run_command(c, {1, dir.path.string()});
    REQUIRE_FALSE(rec.files.empty());
    for (const auto& f : rec.files) {
      CAPTURE(f);
      if (f.ends_with(".json")) {
        std::ifstream in(f);
        const auto j = nlohmann::json::parse(in);
        CHECK(j.at("command") == cmd);
        CHECK(j.at("config_hash") == c.hash());
        CHECK(j.at("seed") == 5);
        CHECK(j.at("timestamp").get<std::string>().size() == 20);
        CHECK(j.at("tables").size() + 1 == rec.files.size());
        for (const auto& t : j.at("tables")) CHECK(t.at("rows").size() > 0);
        continue;
      }
      const Csv csv = read_csv(f);
      CHECK(csv.meta.at("config_hash") == c.hash());
      CHECK(csv.meta.at("command") == cmd);
      CHECK(csv.meta.at("seed") == "5");
      std::string stem = fs::path(f).stem().string();
      if (stem.rfind("sample_", 0) == 0) stem = "sample";
      REQUIRE(kSchemas.count(stem));
      CHECK(csv.columns == kSchemas.at(stem));
      CHECK_FALSE(csv.rows.empty());
      for (const auto& row : csv.rows) REQUIRE(row.size() == csv.columns.size());
    }
  }
}

TEST_CASE("command contents") {
  TempDir dir;
  SUBCASE("zero amplitude leaves R0") {
    const RunRecord rec = run_command(config("[run]\ngrid = 100\nreference = 1.5\n[sample]\na = 0\n", "sample"),
                                      {1, dir.path.string()});
    const Csv csv = read_csv(rec.files.front());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) CHECK(cell(csv, i, "R1") == 1.5);
    CHECK(std::stod(csv.meta.at("C")) > 0.0);
    CHECK(std::stod(csv.meta.at("L2")) == doctest::Approx(4 * 3.141592653589793 * std::stod(csv.meta.at("C"))));
  }
  SUBCASE("euler endpoints") {
    const RunRecord rec = run_command(config(kSmallRuns.at("euler"), "euler"), {1, dir.path.string()});
    const Csv csv = read_csv(rec.files.front());
    CHECK(cell(csv, 0, "mean_chi") == 2.0);
    CHECK(cell(csv, 0, "standard_error") == 0.0);
    CHECK(cell(csv, 2, "mean_chi") == 0.0);
  }
  SUBCASE("bounds reproduces the κ = 1.5 triple") {
    const RunRecord rec = run_command(config(kSmallRuns.at("bounds"), "bounds"), {1, dir.path.string()});
    const Csv k = read_csv(dir.path / "bounds_constants.csv");
    CHECK(cell(k, 0, "kappa") == doctest::Approx(1.5));
    CHECK(cell(k, 0, "delta0") == doctest::Approx((std::sqrt(8.25) - 1.5) / 2));
    CHECK(cell(k, 0, "B") == doctest::Approx((3.5 - std::sqrt(8.25)) / 24));
  }
  SUBCASE("heat sweep approaches both asymptotes") {
    const RunRecord rec = run_command(config(kSmallRuns.at("heat"), "heat"), {1, dir.path.string()});
    const Csv csv = read_csv(rec.files.front());
    CHECK(cell(csv, 0, "small_ratio") == doctest::Approx(1.0).epsilon(0.05));
    CHECK(cell(csv, 1, "large_ratio") == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("qsign limit column") {
    const RunRecord rec = run_command(config(kSmallRuns.at("qsign"), "qsign"), {1, dir.path.string()});
    const Csv csv = read_csv(rec.files.front());
    CHECK(std::stod(csv.meta.at("sigma2_v")) > 0.0);
    CHECK(cell(csv, 2, "limit") < 0.0);
    CHECK(cell(csv, 2, "upper_gap") < cell(csv, 0, "upper_gap"));
    CHECK(cell(csv, 2, "lower_gap") < cell(csv, 0, "lower_gap"));
  }
}

TEST_CASE("worker count does not change any CSV") {
  for (const auto& [cmd, text] : kSmallRuns) {
    CAPTURE(cmd);
    TempDir one, eight;
    const ExperimentConfig c = config(text, cmd);
    const RunRecord a = run_command(c, {1, one.path.string()});
    const RunRecord b = run_command(c, {8, eight.path.string()});
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      if (a.files[i].ends_with(".json")) continue;
      std::ifstream fa(a.files[i], std::ios::binary), fb(b.files[i], std::ios::binary);
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      CHECK(sa.str() == sb.str());
    }
  }
}

TEST_CASE("command-line binary") {
  TempDir dir;
  const fs::path cfg = dir.path / "p2.ini";
  std::ofstream(cfg) << "[run]\nsamples = 200\ngrid = 128\nseed = 1\n[p2]\namplitudes = 0.5\nrefine = false\n";
  const std::string base = "p2 --config " + cfg.string() + " --out ";
  REQUIRE(run_binary(base + (dir.path / "file").string()) == 0);
  REQUIRE(run_binary(base + (dir.path / "env").string(), "RANDCURV_SEED=77") == 0);
  REQUIRE(run_binary(base + (dir.path / "flag").string() + " --seed 99", "RANDCURV_SEED=77") == 0);
  CHECK(read_csv(dir.path / "file" / "p2.csv").meta.at("seed") == "1");
  CHECK(read_csv(dir.path / "env" / "p2.csv").meta.at("seed") == "77");
  CHECK(read_csv(dir.path / "flag" / "p2.csv").meta.at("seed") == "99");

  // Identical reruns give identical files.
  REQUIRE(run_binary(base + (dir.path / "again").string()) == 0);
  std::ifstream a(dir.path / "file" / "p2.csv"), b(dir.path / "again" / "p2.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());

  std::ofstream(dir.path / "bad.ini") << "[p2]\namplitudes =\n";
  CHECK(run_binary("p2 --config " + (dir.path / "bad.ini").string() + " --out " + dir.path.string()) == 2);
  CHECK(run_binary("p2 --config /nonexistent.ini") != 0);
  CHECK(run_binary("frobnicate --config " + cfg.string()) != 0);
}
