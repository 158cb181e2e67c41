#include "kondo/cli_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#ifndef KONDO_VERSION
#define KONDO_VERSION "unknown"
#endif

namespace kondo {

namespace fs = std::filesystem;

namespace {

const std::vector<std::pair<Experiment, std::string>> kExperimentNames = {
    {Experiment::ground, "ground"},        {Experiment::ehl, "ehl"},
    {Experiment::scaling, "scaling"},      {Experiment::quench, "quench"},
    {Experiment::scan, "scan"},            {Experiment::double_quench, "double-quench"},
    {Experiment::interference, "interference"}, {Experiment::thermal, "thermal"},
    {Experiment::ansatz, "ansatz"},
};

struct KeyInfo {
  const char* name;
  const char* help;
};

const std::vector<KeyInfo> kKeys = {
    {"experiment", "ground|ehl|scaling|quench|scan|double-quench|interference|thermal|ansatz"},
    {"n", "number of sites (even)"},
    {"j1", "nearest-neighbour coupling"},
    {"j2", "next-nearest-neighbour coupling"},
    {"jp", "impurity bond strength J' in (0,1]"},
    {"jp-grid", "comma-separated J' values"},
    {"n-list", "comma-separated sizes (scaling)"},
    {"variant", "initial|end_quenched|double_quenched|uniform"},
    {"t-max", "trajectory length (default 4N)"},
    {"dt", "sample spacing (default t-max/400)"},
    {"beta-grid", "comma-separated inverse temperatures"},
    {"epsilon", "static-scheme coupling scale"},
    {"seed", "Lanczos start-vector seed"},
    {"lanczos-tol", "Lanczos residual tolerance"},
    {"krylov-tol", "Krylov propagator local error"},
    {"threshold", "negativity threshold for L*"},
    {"collapse-ratio", "scaling: match N/L* to this value"},
    {"k", "number of low states for large sectors"},
    {"out", "output directory"},
    {"format", "output format (csv)"},
};

std::string normalize_key(std::string k) {
  for (char& c : k)
    if (c == '_') c = '-';
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(d))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return d;
}

long long to_integer(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE)
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return i;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

void check_n(const std::string& key, long long n) {
  if (n % 2 != 0) throw ConfigError(key, "n must be even, got " + std::to_string(n));
  if (n < 2 || n > kMaxSites)
    throw ConfigError(key, "n must lie in [2, " + std::to_string(kMaxSites) + "], got " + std::to_string(n));
}

void check_jp(const std::string& key, double jp) {
  if (!(jp > 0.0 && jp <= 1.0)) throw ConfigError(key, "J' must lie in (0,1], got " + format_double(jp));
}

void add_header(CsvTable& t, const std::string& k, double v) { t.header.emplace_back(k, format_double(v)); }
void add_header(CsvTable& t, const std::string& k, const std::string& v) { t.header.emplace_back(k, v); }

void chain_header(CsvTable& t, const RunConfig& cfg, double jp) {
  add_header(t, "n", cfg.n);
  add_header(t, "j1", cfg.j1);
  add_header(t, "j2", cfg.j2);
  add_header(t, "jp", jp);
}

void provenance_header(CsvTable& t, const RunConfig& cfg) {
  add_header(t, "experiment", to_string(cfg.experiment));
  add_header(t, "seed", std::to_string(cfg.seed));
  add_header(t, "lanczos_tol", cfg.lanczos_tol);
  add_header(t, "krylov_tol", cfg.krylov_tol);
  add_header(t, "version", KONDO_VERSION);
}

LanczosOptions lanczos_of(const RunConfig& cfg) {
  LanczosOptions o;
  o.tolerance = cfg.lanczos_tol;
  o.seed = cfg.seed;
  return o;
}

KrylovOptions krylov_of(const RunConfig& cfg) {
  KrylovOptions o;
  o.step_tolerance = cfg.krylov_tol;
  return o;
}

std::string jp_tag(double jp) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "jp_%.4f", jp);
  return buf;
}

CsvTable trajectory_table(const RunConfig& cfg, const ScanPoint& p) {
  CsvTable t;
  chain_header(t, cfg, p.j_prime);
  add_header(t, "variant", to_string(p.trajectory.spec_final.variant));
  add_header(t, "e_m", p.peaks.e_m);
  add_header(t, "t_opt", p.peaks.t_opt);
  add_header(t, "window_end", p.peaks.window_end);
  add_header(t, "initial_energy", p.trajectory.initial_energy);
  add_header(t, "norm_drift", p.trajectory.norm_drift);
  add_header(t, "energy_drift", p.trajectory.energy_drift);
  add_header(t, "reversal_fidelity", p.trajectory.reversal_fidelity);
  provenance_header(t, cfg);
  t.columns = {"t", "concurrence"};
  for (std::size_t i = 0; i < p.trajectory.times.size(); ++i)
    t.rows.push_back({p.trajectory.times[i], p.trajectory.concurrence[i]});
  return t;
}

ScanOptions scan_options(const RunConfig& cfg, Variant v) {
  ScanOptions o;
  o.final_variant = v;
  o.quench.krylov = krylov_of(cfg);
  o.quench.lanczos = lanczos_of(cfg);
  return o;
}

class Writer {
 public:
  explicit Writer(const RunConfig& cfg) : cfg_(cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + cfg.out_dir.string() + ": " + ec.message());
    const fs::path json = cfg.out_dir / "config.json";
    std::ofstream os(json);
    os << config_json(cfg) << "\n";
    if (!os) throw std::runtime_error("cannot write " + json.string());
    files_.push_back(json);
  }

  void csv(const fs::path& rel, const CsvTable& t) {
    const fs::path p = cfg_.out_dir / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_csv(p, t);
    files_.push_back(p);
  }

  std::vector<fs::path> manifest() && { return std::move(files_); }

 private:
  const RunConfig& cfg_;
  std::vector<fs::path> files_;
};

void write_scan(Writer& w, const RunConfig& cfg, const ScanResult& r, const std::string& prefix = "") {
  CsvTable summary;
  add_header(summary, "n", r.n_sites);
  add_header(summary, "j2", r.j2);
  add_header(summary, "variant", to_string(r.final_variant));
  add_header(summary, "t_max", r.t_max);
  add_header(summary, "dt", r.dt);
  add_header(summary, "e_m", r.e_m);
  add_header(summary, "t_opt", r.t_opt);
  add_header(summary, "jp_opt", r.j_prime_opt);
  std::string failed;
  for (const auto& p : r.points)
    if (!p.ok) failed += (failed.empty() ? "" : ";") + format_double(p.j_prime) + " " + p.error;
  add_header(summary, "failures", failed.empty() ? std::string("none") : failed);
  provenance_header(summary, cfg);
  summary.columns = {"n", "j2", "jp", "e_m", "t_opt"};
  const double nan = std::nan("");
  for (const auto& p : r.points) {
    summary.rows.push_back({static_cast<double>(r.n_sites), r.j2, p.j_prime, p.ok ? p.peaks.e_m : nan,
                            p.ok ? p.peaks.t_opt : nan});
    if (p.ok) w.csv(fs::path(prefix + "trajectories") / (jp_tag(p.j_prime) + ".csv"), trajectory_table(cfg, p));
  }
  w.csv(prefix + "scan_summary.csv", summary);
}

CsvTable ehl_table(const RunConfig& cfg, const EhlResult& r) {
  CsvTable t;
  chain_header(t, cfg, r.spec.j_prime);
  add_header(t, "variant", to_string(r.spec.variant));
  add_header(t, "threshold", r.threshold);
  add_header(t, "l_star", r.l_star);
  add_header(t, "saturated", r.saturated ? "true" : "false");
  add_header(t, "ground_energy", r.ground_energy);
  provenance_header(t, cfg);
  t.columns = {"L", "negativity"};
  for (const auto& [l, e] : r.curve) t.rows.push_back({static_cast<double>(l), e});
  return t;
}

std::vector<fs::path> run_scaling(const RunConfig& cfg) {
  Writer w(cfg);
  std::vector<int> sizes = cfg.n_list.empty() ? std::vector<int>{cfg.n} : cfg.n_list;
  CsvTable curves;
  add_header(curves, "j1", cfg.j1);
  add_header(curves, "j2", cfg.j2);
  add_header(curves, "threshold", cfg.threshold);
  CsvTable lstar;
  lstar.columns = {"n", "jp", "l_star", "saturated"};
  curves.columns = {"n", "jp", "l_over_n", "negativity"};

  auto emit_curve = [&](const EhlResult& r) {
    for (const auto& [l, e] : r.curve)
      curves.rows.push_back({static_cast<double>(r.spec.n_sites), r.spec.j_prime,
                             static_cast<double>(l) / r.spec.n_sites, e});
    lstar.rows.push_back({static_cast<double>(r.spec.n_sites), r.spec.j_prime, r.l_star, r.saturated ? 1.0 : 0.0});
  };

  if (cfg.collapse_ratio > 0.0) {
    std::vector<EhlResult> matched;
    for (int n : sizes) {
      matched.push_back(match_ratio(n, cfg.j2, cfg.collapse_ratio, cfg.threshold, 0.05, 1.0, lanczos_of(cfg)));
      emit_curve(matched.back());
    }
    const CollapseRecord c = scaling_collapse(matched);
    add_header(curves, "collapse_ratio", cfg.collapse_ratio);
    add_header(curves, "max_deviation", c.max_deviation);
  } else {
    const std::vector<double> grid = cfg.jp_grid.empty() ? std::vector<double>{0.4, 0.5, 0.6, 0.7, 0.8, 0.9} : cfg.jp_grid;
    for (int n : sizes) {
      std::vector<EhlResult> results;
      for (double jp : grid) {
        ChainSpec s = cfg.chain();
        s.n_sites = n;
        s.j_prime = jp;
        results.push_back(ehl_curve(s, cfg.threshold, lanczos_of(cfg)));
        emit_curve(results.back());
      }
      const std::string tag = "_n" + std::to_string(n);
      try {
        const EhlFit fit = ehl_scaling_fit(results);
        add_header(curves, "alpha" + tag, fit.alpha());
        add_header(curves, "intercept" + tag, fit.fit.intercept);
        add_header(curves, "r2" + tag, fit.fit.r2);
        add_header(curves, "flagged" + tag, fit.flagged ? "true" : "false");
      } catch (const std::invalid_argument& e) {
        add_header(curves, "fit" + tag, e.what());
      }
    }
  }
  provenance_header(curves, cfg);
  provenance_header(lstar, cfg);
  w.csv("scaling.csv", curves);
  w.csv("l_star.csv", lstar);
  return std::move(w).manifest();
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, v] : kExperimentNames)
    if (k == e) return v;
  return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
  const std::string n = normalize_key(s);
  for (const auto& [k, v] : kExperimentNames)
    if (v == n) return k;
  throw std::invalid_argument("unknown experiment '" + s + "'");
}

ChainSpec RunConfig::chain() const {
  ChainSpec s;
  s.n_sites = n;
  s.j1 = j1;
  s.j2 = j2;
  s.j_prime = jp;
  s.variant = variant;
  return s;
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config", path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig parse_config(const std::map<std::string, std::string>& values) {
  std::set<std::string> known;
  for (const auto& k : kKeys) known.insert(k.name);
  RunConfig c;
  bool jp_set = false;
  for (const auto& [raw, v] : values) {
    const std::string key = normalize_key(raw);
    if (!known.count(key)) throw ConfigError(key, "unknown key");
    if (key == "experiment") {
      try {
        c.experiment = experiment_from_string(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "n") {
      const long long n = to_integer(key, v);
      check_n(key, n);
      c.n = static_cast<int>(n);
    } else if (key == "j1") {
      c.j1 = to_double(key, v);
      if (!(c.j1 > 0.0)) throw ConfigError(key, "J1 must be positive");
    } else if (key == "j2") {
      c.j2 = to_double(key, v);
      if (!(c.j2 >= 0.0)) throw ConfigError(key, "J2 must be >= 0");
    } else if (key == "jp") {
      c.jp = to_double(key, v);
      check_jp(key, c.jp);
      jp_set = true;
    } else if (key == "jp-grid") {
      c.jp_grid.clear();
      for (const auto& item : split_list(v)) {
        c.jp_grid.push_back(to_double(key, item));
        check_jp(key, c.jp_grid.back());
      }
      if (c.jp_grid.empty()) throw ConfigError(key, "grid is empty");
    } else if (key == "n-list") {
      c.n_list.clear();
      for (const auto& item : split_list(v)) {
        const long long n = to_integer(key, item);
        check_n(key, n);
        c.n_list.push_back(static_cast<int>(n));
      }
      if (c.n_list.empty()) throw ConfigError(key, "list is empty");
    } else if (key == "variant") {
      try {
        c.variant = variant_from_string(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
      }
    } else if (key == "t-max") {
      c.t_max = to_double(key, v);
      if (!(c.t_max > 0.0)) throw ConfigError(key, "t-max must be positive");
    } else if (key == "dt") {
      c.dt = to_double(key, v);
      if (!(c.dt > 0.0)) throw ConfigError(key, "dt must be positive");
    } else if (key == "beta-grid") {
      c.beta_grid.clear();
      for (const auto& item : split_list(v)) {
        c.beta_grid.push_back(to_double(key, item));
        if (!(c.beta_grid.back() >= 0.0)) throw ConfigError(key, "beta must be >= 0");
      }
      if (c.beta_grid.empty()) throw ConfigError(key, "grid is empty");
    } else if (key == "epsilon") {
      c.epsilon = to_double(key, v);
      if (!(c.epsilon > 0.0)) throw ConfigError(key, "epsilon must be positive");
    } else if (key == "seed") {
      const long long s = to_integer(key, v);
      if (s < 0) throw ConfigError(key, "seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "lanczos-tol" || key == "krylov-tol") {
      const double t = to_double(key, v);
      if (!(t > 0.0 && t < 1.0)) throw ConfigError(key, "tolerance must lie in (0,1)");
      (key == "lanczos-tol" ? c.lanczos_tol : c.krylov_tol) = t;
    } else if (key == "threshold") {
      c.threshold = to_double(key, v);
      if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError(key, "threshold must lie in (0,1)");
    } else if (key == "collapse-ratio") {
      c.collapse_ratio = to_double(key, v);
      if (!(c.collapse_ratio > 0.0)) throw ConfigError(key, "collapse-ratio must be positive");
    } else if (key == "k") {
      const long long k = to_integer(key, v);
      if (k < 1 || k > 40) throw ConfigError(key, "k must lie in [1, 40]");
      c.k = static_cast<int>(k);
    } else if (key == "out") {
      if (trim(v).empty()) throw ConfigError(key, "output directory is empty");
      c.out_dir = trim(v);
    } else if (key == "format") {
      c.format = trim(v);
      if (c.format != "csv") throw ConfigError(key, "only csv output is supported");
    }
  }

  // Cross-field and per-experiment preconditions.
  if (c.t_max > 0.0 && c.dt > c.t_max) throw ConfigError("dt", "dt must not exceed t-max");
  const bool dynamic = c.experiment == Experiment::quench || c.experiment == Experiment::scan ||
                       c.experiment == Experiment::double_quench || c.experiment == Experiment::interference ||
                       c.experiment == Experiment::thermal;
  if (dynamic && c.n < 4) throw ConfigError("n", "quench experiments need n >= 4");
  if (c.variant != Variant::initial && c.variant != Variant::uniform && c.n < 4)
    throw ConfigError("variant", "quenched variants need n >= 4");
  if (c.experiment == Experiment::thermal && c.n > 12) throw ConfigError("n", "thermal runs need full spectra; n <= 12");
  if (c.experiment == Experiment::interference && c.n > 16) throw ConfigError("n", "interference runs need n <= 16");
  if (c.experiment == Experiment::thermal && !jp_set)
    throw ConfigError("jp", "thermal runs need the dynamic-scheme J' (typically J'_opt)");
  if (c.experiment == Experiment::scaling && c.collapse_ratio > 0.0 && c.n_list.size() < 2)
    throw ConfigError("n-list", "collapse needs at least two sizes");
  if (c.experiment == Experiment::scaling)
    for (int n : c.n_list.empty() ? std::vector<int>{c.n} : c.n_list)
      if (n < 4) throw ConfigError(c.n_list.empty() ? "n" : "n-list", "scaling needs n >= 4");
  return c;
}

bool parse_args(int argc, char** argv, RunConfig& out) {
  CLI::App app{"Exact-diagonalization lab for impurity entanglement in J1-J2 spin chains"};
  app.set_version_flag("--version", KONDO_VERSION);
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& k : kKeys) opts[k.name] = app.add_option(std::string("--") + k.name, flags[k.name], k.help);
  std::string positional;
  app.add_option("command", positional, "experiment to run (same as --experiment)");
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return false;
  } catch (const CLI::ParseError& e) {
    throw ConfigError("command line", e.what());
  }

  std::map<std::string, std::string> merged;
  if (!config_path.empty()) merged = read_config_file(config_path);
  for (const auto& [k, opt] : opts)
    if (opt->count() > 0) merged[k] = flags[k];
  if (!positional.empty()) {
    if (opts["experiment"]->count() > 0 && normalize_key(flags["experiment"]) != normalize_key(positional))
      throw ConfigError("experiment", "conflicts with command '" + positional + "'");
    merged["experiment"] = positional;
  }
  if (!merged.count("out")) {
    const char* env = std::getenv("KONDO_LAB_OUT");
    merged["out"] = env != nullptr && *env != '\0' ? env : "kondo_out";
  }
  out = parse_config(merged);
  return true;
}

std::vector<double> default_beta_grid() {
  // Temperatures 10^-6 .. 10 in quarter decades, coldest first, then T = infinity.
  std::vector<double> b;
  for (int k = 0; k <= 28; ++k) b.push_back(std::pow(10.0, 6.0 - 0.25 * k));
  b.push_back(0.0);
  return b;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& [k, v] : table.header) os << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (line.rfind("# ", 0) == 0 && !have_columns) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) t.header.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
      continue;
    }
    if (!have_columns) {
      t.columns = split_list(line);
      have_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : split_list(line)) row.push_back(std::strtod(cell.c_str(), nullptr));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(cfg.experiment);
  j["n"] = cfg.n;
  j["j1"] = cfg.j1;
  j["j2"] = cfg.j2;
  j["jp"] = cfg.jp;
  j["jp_grid"] = cfg.jp_grid;
  j["n_list"] = cfg.n_list;
  j["variant"] = to_string(cfg.variant);
  j["t_max"] = cfg.resolved_t_max();
  j["dt"] = cfg.resolved_dt();
  j["beta_grid"] = cfg.beta_grid;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["lanczos_tol"] = cfg.lanczos_tol;
  j["krylov_tol"] = cfg.krylov_tol;
  j["threshold"] = cfg.threshold;
  j["collapse_ratio"] = cfg.collapse_ratio;
  j["k"] = cfg.k;
  j["out"] = cfg.out_dir.string();
  j["format"] = cfg.format;
  j["version"] = KONDO_VERSION;
  return j.dump(2);
}

std::vector<fs::path> run_experiment(const RunConfig& cfg) {
  const ChainSpec spec = cfg.chain();
  switch (cfg.experiment) {
    case Experiment::ground: {
      Writer w(cfg);
      spec.validate();
      auto basis = std::make_shared<const SectorBasis>(spec.n_sites, sector_of_ground_state(spec.n_sites));
      const HamiltonianOperator h(spec, basis, true);
      SolveReport rep;
      const EigenPair gs = ground_state(h, lanczos_of(cfg), &rep);
      CsvTable t;
      chain_header(t, cfg, cfg.jp);
      add_header(t, "variant", to_string(spec.variant));
      add_header(t, "sector_dim", static_cast<double>(h.dim()));
      provenance_header(t, cfg);
      t.columns = {"energy", "residual", "matvecs", "degenerate"};
      t.rows.push_back({gs.value, rep.residual, static_cast<double>(rep.matvecs), rep.degenerate ? 1.0 : 0.0});
      w.csv("ground.csv", t);
      return std::move(w).manifest();
    }
    case Experiment::ehl: {
      Writer w(cfg);
      w.csv("ehl.csv", ehl_table(cfg, ehl_curve(spec, cfg.threshold, lanczos_of(cfg))));
      return std::move(w).manifest();
    }
    case Experiment::ansatz: {
      Writer w(cfg);
      spec.validate();
      auto basis = std::make_shared<const SectorBasis>(spec.n_sites, sector_of_ground_state(spec.n_sites));
      const HamiltonianOperator h(spec, basis, true);
      const PureState gs = PureState::from_real(basis, ground_state(h, lanczos_of(cfg)).vector);
      const EhlResult e = ehl_curve(gs, spec, cfg.threshold);
      const AnsatzReport a = ansatz_check(gs, e.l_star, cfg.threshold);
      w.csv("ehl.csv", ehl_table(cfg, e));
      CsvTable t;
      chain_header(t, cfg, cfg.jp);
      add_header(t, "threshold", cfg.threshold);
      add_header(t, "l_star", e.l_star);
      provenance_header(t, cfg);
      t.columns = {"block_a_len", "impurity_purity", "block_b_entropy", "negativity"};
      t.rows.push_back({static_cast<double>(a.block_a_len), a.impurity_purity, a.block_b_entropy, a.negativity});
      w.csv("ansatz.csv", t);
      return std::move(w).manifest();
    }
    case Experiment::scaling:
      return run_scaling(cfg);
    case Experiment::quench: {
      Writer w(cfg);
      const ScanResult r = quench_scan(cfg.n, cfg.j2, {cfg.jp}, cfg.resolved_t_max(), cfg.resolved_dt(),
                                       scan_options(cfg, Variant::end_quenched));
      const ScanPoint& p = r.points.front();
      if (!p.ok) throw EvolutionError(p.error, 0.0, 0.0);
      w.csv("trajectory.csv", trajectory_table(cfg, p));
      return std::move(w).manifest();
    }
    case Experiment::scan:
    case Experiment::double_quench: {
      Writer w(cfg);
      const auto t_max = cfg.resolved_t_max();
      const auto dt = cfg.resolved_dt();
      std::vector<double> grid = cfg.jp_grid.empty() ? default_j_grid() : cfg.jp_grid;
      if (cfg.experiment == Experiment::scan) {
        write_scan(w, cfg, quench_scan(cfg.n, cfg.j2, grid, t_max, dt, scan_options(cfg, Variant::end_quenched)));
      } else {
        // Without an explicit grid the right bond is held at the single-quench optimum.
        if (cfg.jp_grid.empty()) {
          const ScanResult single =
              quench_scan(cfg.n, cfg.j2, grid, t_max, dt, scan_options(cfg, Variant::end_quenched));
          if (!(single.j_prime_opt > 0.0)) throw EvolutionError("single-quench scan produced no optimum", 0.0, 0.0);
          write_scan(w, cfg, single, "single_");
          grid = {single.j_prime_opt};
        }
        write_scan(w, cfg, double_quench_scan(cfg.n, cfg.j2, grid, t_max, dt, scan_options(cfg, Variant::double_quenched)));
      }
      return std::move(w).manifest();
    }
    case Experiment::interference: {
      Writer w(cfg);
      const InterferenceReport r = interference_analysis(spec.with_variant(Variant::initial), cfg.k, lanczos_of(cfg));
      CsvTable t;
      chain_header(t, cfg, cfg.jp);
      add_header(t, "delta_e", r.delta_e);
      add_header(t, "condition_ratio", r.condition_ratio);
      add_header(t, "t_predicted", r.t_predicted);
      add_header(t, "dominant_mass", r.dominant_mass);
      add_header(t, "dominant_pair", std::to_string(r.first) + " " + std::to_string(r.second));
      add_header(t, "selection", "largest overlap");
      add_header(t, "dominance_failure", r.dominance_failure ? "true" : "false");
      add_header(t, "complete", r.complete ? "true" : "false");
      add_header(t, "captured_mass", r.captured_mass);
      provenance_header(t, cfg);
      t.columns = {"k", "energy", "overlap", "alpha", "beta"};
      for (std::size_t i = 0; i < r.states.size(); ++i) {
        const auto& s = r.states[i];
        t.rows.push_back({static_cast<double>(i), s.energy, s.overlap, s.singlet, s.triplet_rms});
      }
      w.csv("interference.csv", t);
      return std::move(w).manifest();
    }
    case Experiment::thermal: {
      Writer w(cfg);
      ThermalOptions o;
      o.t_max = cfg.t_max;
      o.dt = cfg.dt;
      o.krylov = krylov_of(cfg);
      o.lanczos = lanczos_of(cfg);
      const auto betas = cfg.beta_grid.empty() ? default_beta_grid() : cfg.beta_grid;
      const ThermalComparison r = thermal_comparison(spec.with_variant(Variant::initial), betas, cfg.epsilon, o);
      CsvTable t;
      chain_header(t, cfg, cfg.jp);
      add_header(t, "epsilon", r.epsilon);
      add_header(t, "jp_static", r.j_prime_static);
      add_header(t, "window_end", r.window_end);
      add_header(t, "e_m_zero_t", r.e_m_zero_t);
      add_header(t, "t_half_dynamic", r.t_half_dynamic);
      add_header(t, "t_half_static", r.t_half_static);
      provenance_header(t, cfg);
      t.columns = {"beta", "e_m_dynamic", "c_static"};
      for (const auto& row : r.rows) t.rows.push_back({row.beta, row.e_m_dynamic, row.c_static});
      w.csv("thermal.csv", t);
      return std::move(w).manifest();
    }
  }
  return {};
}

}  // namespace kondo
