#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "kondo/cli_io.hpp"

using namespace kondo;
namespace fs = std::filesystem;

namespace {

bool parse(std::vector<std::string> args, RunConfig& out) {
  args.insert(args.begin(), "kondo_lab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return parse_args(static_cast<int>(argv.size()), argv.data(), out);
}

std::string key_of_error(std::vector<std::string> args) {
  RunConfig c;
  try {
    parse(std::move(args), c);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("kondo_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("flags build a complete config") {
  RunConfig c;
  REQUIRE(parse({"--experiment", "ehl", "--n", "12", "--j2", "0.0", "--jp", "0.5", "--out", "x"}, c));
  CHECK(c.experiment == Experiment::ehl);
  CHECK(c.n == 12);
  CHECK(c.j2 == 0.0);
  CHECK(c.jp == 0.5);
  CHECK(c.j1 == 1.0);
  CHECK(c.seed == kDefaultSeed);
  CHECK(c.threshold == kDefaultEhlThreshold);
  CHECK(c.variant == Variant::initial);
  CHECK(c.format == "csv");
  CHECK(c.out_dir == fs::path("x"));
  CHECK(c.resolved_t_max() == 48.0);
  CHECK(c.resolved_dt() == doctest::Approx(0.12));
  CHECK(c.chain().n_sites == 12);
  CHECK(c.chain().j_prime == 0.5);

  RunConfig d;
  REQUIRE(parse({"scan", "--n", "10", "--jp-grid", "0.2,0.4", "--out", "y"}, d));
  CHECK(d.experiment == Experiment::scan);
  CHECK(d.jp_grid == std::vector<double>{0.2, 0.4});
}

TEST_CASE("invalid values name the offending key") {
  CHECK(key_of_error({"ehl", "--n", "13"}) == "n");
  CHECK(key_of_error({"ehl", "--jp", "1.5"}) == "jp");
  CHECK(key_of_error({"ehl", "--jp", "0"}) == "jp");
  CHECK(key_of_error({"ehl", "--n", "twelve"}) == "n");
  CHECK(key_of_error({"ehl", "--j2", "-0.1"}) == "j2");
  CHECK(key_of_error({"sideways"}) == "experiment");
  CHECK(key_of_error({"ehl", "--experiment", "scan"}) == "experiment");
  CHECK(key_of_error({"ehl", "--format", "hdf5"}) == "format");
  CHECK(key_of_error({"quench", "--n", "2", "--jp", "0.5"}) == "n");
  CHECK(key_of_error({"thermal", "--n", "14", "--jp", "0.3"}) == "n");
  CHECK(key_of_error({"thermal", "--n", "10"}) == "jp");
  CHECK(key_of_error({"scan", "--t-max", "1", "--dt", "2"}) == "dt");
  CHECK(key_of_error({"ehl", "--bogus", "1"}) == "command line");
  CHECK_THROWS_AS(parse_config({{"colour", "blue"}}), ConfigError);
  try {
    parse_config({{"colour", "blue"}});
  } catch (const ConfigError& e) {
    CHECK(e.key() == "colour");
  }
}

TEST_CASE("config file with flag overrides and output defaults") {
  TempDir tmp;
  const fs::path file = tmp.path / "run.cfg";
  {
    std::ofstream os(file);
    os << "# quench run\nexperiment = quench\nn = 10\nj_prime_unused_comment = 1 # no\n";
  }
  RunConfig c;
  CHECK(key_of_error({"--config", file.string()}) == "j-prime-unused-comment");
  {
    std::ofstream os(file);
    os << "# quench run\nexperiment = quench\nn = 10\njp = 0.3   # trailing comment\nt_max = 20\n";
  }
  REQUIRE(parse({"--config", file.string(), "--jp", "0.4", "--out", "o"}, c));
  CHECK(c.experiment == Experiment::quench);
  CHECK(c.n == 10);
  CHECK(c.jp == 0.4);
  CHECK(c.t_max == 20.0);

  ::setenv("KONDO_LAB_OUT", (tmp.path / "env_out").c_str(), 1);
  RunConfig e;
  REQUIRE(parse({"ehl"}, e));
  CHECK(e.out_dir == tmp.path / "env_out");
  ::unsetenv("KONDO_LAB_OUT");
  RunConfig f;
  REQUIRE(parse({"ehl"}, f));
  CHECK(f.out_dir == fs::path("kondo_out"));
}

TEST_CASE("CSV round trip is exact") {
  TempDir tmp;
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  CsvTable t;
  t.header = {{"n", "12"}, {"note", "round trip"}};
  t.columns = {"a", "b", "c"};
  for (int i = 0; i < 50; ++i) t.rows.push_back({u(rng), u(rng) * 1e-300, std::ldexp(u(rng), -40)});
  t.rows.push_back({0.1, -0.0, 1.0 / 3.0});
  write_csv(tmp.path / "t.csv", t);
  const CsvTable back = read_csv(tmp.path / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(back.rows[i] == t.rows[i]);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("ehl run writes its table and config echo") {
  TempDir tmp;
  RunConfig c;
  REQUIRE(parse({"ehl", "--n", "8", "--jp", "0.5", "--out", tmp.path.string()}, c));
  const auto files = run_experiment(c);
  CHECK(fs::exists(tmp.path / "ehl.csv"));
  CHECK(fs::exists(tmp.path / "config.json"));
  CHECK(files.size() >= 2);
  const CsvTable t = read_csv(tmp.path / "ehl.csv");
  CHECK(t.columns == std::vector<std::string>{"L", "negativity"});
  REQUIRE(t.rows.size() == 7);
  CHECK(t.rows[0][0] == 0.0);
  CHECK(t.rows[0][1] == doctest::Approx(1.0).epsilon(1e-6));
  bool has_seed = false, has_lstar = false;
  for (const auto& [k, v] : t.header) {
    has_seed |= k == "seed";
    has_lstar |= k == "l_star";
  }
  CHECK(has_seed);
  CHECK(has_lstar);
  const std::string json = slurp(tmp.path / "config.json");
  CHECK(json.find("\"experiment\"") != std::string::npos);
  CHECK(json.find("20090527") != std::string::npos);
}

TEST_CASE("scan run writes trajectories and summary; reruns are byte-identical") {
  TempDir tmp;
  RunConfig c;
  REQUIRE(parse({"scan", "--n", "6", "--jp-grid", "0.3,0.6", "--out", (tmp.path / "a").string()}, c));
  run_experiment(c);
  const fs::path a = tmp.path / "a";
  REQUIRE(fs::exists(a / "scan_summary.csv"));
  const CsvTable s = read_csv(a / "scan_summary.csv");
  CHECK(s.rows.size() == 2);
  std::size_t trajectories = 0;
  for (const auto& e : fs::directory_iterator(a / "trajectories")) trajectories += e.path().extension() == ".csv";
  CHECK(trajectories == 2);

  c.out_dir = tmp.path / "b";
  run_experiment(c);
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "config.json") continue;
    const fs::path twin = tmp.path / "b" / fs::relative(e.path(), a);
    REQUIRE(fs::exists(twin));
    CHECK(slurp(e.path()) == slurp(twin));
  }
}
