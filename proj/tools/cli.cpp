#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "critlab/estimate_verifier.hpp"
#include "critlab/fft.hpp"
#include "critlab/snapshot.hpp"

namespace critlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing key " + where + "." + key);
  return obj.at(key);
}

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw ConfigError("unknown key " + where + "." + k);
  }
}

double number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing key " + where + "." + key);
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

long long integer(const json& obj, const char* key, const std::string& where, std::optional<long long> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError("missing key " + where + "." + key);
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<long long>();
}

Exponent exponent(const json& v, const std::string& where) {
  if (v.is_number()) return Exponent(v.get<double>());
  if (v.is_string()) return Exponent::parse(v.get<std::string>());
  throw ConfigError(where + " must be a number or \"inf\"");
}

json exponent_json(const Exponent& e) {
  if (e.is_infinite()) return "inf";
  return e.value();
}

std::string format_double(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string exponent_text(const Exponent& e) { return e.is_infinite() ? "inf" : format_double(e.value()); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(17);
  return f;
}

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
};

/// Run directory bookkeeping: every file written goes through here.
class RunDir {
 public:
  RunDir(fs::path root, std::string command) : root_(std::move(root)), command_(std::move(command)), start_(utc_now()) {
    fs::create_directories(root_);
  }

  std::ofstream open(const fs::path& rel) {
    fs::create_directories((root_ / rel).parent_path());
    std::ofstream f = open_file(root_ / rel);
    files_.push_back(rel.generic_string());
    return f;
  }

  fs::path track(const fs::path& rel) {
    fs::create_directories((root_ / rel).parent_path());
    files_.push_back(rel.generic_string());
    return root_ / rel;
  }

  void write_manifest(const std::string& config_path, const std::string& config_hash, const std::string& status,
                      int exit_code, const std::string& message = {}) {
    json m;
    m["tool"] = "critlab";
    m["version"] = kToolVersion;
    m["command"] = command_;
    m["config_path"] = config_path;
    m["config_hash"] = config_hash;
    m["start"] = start_;
    m["end"] = utc_now();
    m["output_dir"] = root_.string();
    m["status"] = status;
    m["exit_code"] = exit_code;
    if (!message.empty()) m["message"] = message;
    m["files"] = files_;
    std::ofstream f = open_file(root_ / "manifest.json");
    f << m.dump(2) << "\n";
  }

  [[nodiscard]] const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::string command_;
  std::string start_;
  std::vector<std::string> files_;
};

// Per-save outputs shared by every mode.
class SaveWriter {
 public:
  SaveWriter(RunDir& dir, const RunConfig& cfg)
      : dir_(dir), cfg_(cfg), norms_(dir.open("norms.csv")), residuals_(dir.open("residuals.csv")),
        index_(dir.open("snapshots.csv")) {
    norms_ << "t,field,norm,s,p,r,value\n";
    residuals_ << "t,divergence,density_flux,density_flux_column,deformation_gradient,perturbation_identity,"
                  "min_density_factor\n";
    index_ << "index,t,file\n";
  }

  void save(double t, const FluidState& s) {
    for (const auto& n : cfg_.norms) {
      const std::string prefix = format_double(t) + ",";
      const std::string tail = "," + n.name + "," + format_double(n.spec.s) + "," + exponent_text(n.spec.p) + "," +
                               exponent_text(n.spec.r) + ",";
      norms_ << prefix << "sigma" << tail << besov_norm(s.sigma, n.spec).value << "\n";
      norms_ << prefix << "v" << tail << besov_norm(s.velocity, n.spec).value << "\n";
      norms_ << prefix << "H" << tail << besov_norm(s.H, n.spec).value << "\n";
      norms_ << prefix << "grad_p" << tail << besov_norm(s.pressure_grad, n.spec).value << "\n";
    }
    const ConstraintResiduals r = constraint_residuals(s);
    const double min_factor = inverse_transform(s.sigma).min() + 1.0;
    residuals_ << t << "," << r.divergence << "," << r.density_flux << "," << r.density_flux_column << ","
               << r.deformation_gradient << "," << r.perturbation_identity << "," << min_factor << "\n";

    Snapshot snap;
    snap.add("sigma", s.sigma);
    const int n = s.grid().dim;
    for (int i = 0; i < n; ++i) snap.add("v" + std::to_string(i), s.velocity[i]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) snap.add("H" + std::to_string(i) + std::to_string(j), s.H(i, j));
    for (int i = 0; i < n; ++i) snap.add("grad_p" + std::to_string(i), s.pressure_grad[i]);
    std::ostringstream name;
    name << "snapshots/state_" << std::setw(6) << std::setfill('0') << count_ << ".snap";
    write_snapshot(dir_.track(name.str()), snap);
    index_ << count_ << "," << t << "," << name.str() << "\n";
    ++count_;
    norms_.flush();
    residuals_.flush();
    index_.flush();
  }

 private:
  RunDir& dir_;
  const RunConfig& cfg_;
  std::ofstream norms_;
  std::ofstream residuals_;
  std::ofstream index_;
  int count_ = 0;
};

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

int cmd_norms(const Globals& g, const std::string& snapshot_path, const std::vector<std::string>& specs,
              std::ostream& out, std::ostream& err) {
  std::vector<NormSpec> norms;
  for (const auto& t : specs) norms.push_back(parse_norm_spec(t));
  if (norms.empty() && !g.config.empty()) norms = parse_config(read_json_file(g.config)).norms;
  if (norms.empty()) norms.push_back({"L2", {0.0, 2.0, 2.0}});

  Snapshot snap;
  try {
    snap = read_snapshot(snapshot_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::ostringstream csv;
  csv << std::setprecision(17) << "field,norm,s,p,r,value\n";
  for (std::size_t i = 0; i < snap.fields.size(); ++i) {
    const SpectralField f = forward_transform(snap.fields[i]);
    for (const auto& n : norms)
      csv << snap.names[i] << "," << n.name << "," << format_double(n.spec.s) << "," << exponent_text(n.spec.p)
          << "," << exponent_text(n.spec.r) << "," << besov_norm(f, n.spec).value << "\n";
  }
  out << csv.str();
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    std::ofstream f = open_file(fs::path(g.out) / "norms.csv");
    f << csv.str();
  }
  return kPass;
}

int cmd_simulate(const Globals& g, std::optional<std::string> forced_mode, std::ostream& out, std::ostream& err) {
  if (g.config.empty()) throw ConfigError("simulate needs --config");
  RunConfig cfg = parse_config(read_json_file(g.config));
  if (forced_mode) cfg.mode = *forced_mode;
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out.empty()) cfg.output_dir = g.out;
  const json resolved = to_json(cfg);
  const std::string text = resolved.dump(2) + "\n";
  const std::string hash = fnv1a_hex(text);

  RunDir dir(cfg.output_dir, "simulate");
  {
    std::ofstream f = dir.open("config.json");
    f << text;
  }
  const FluidState s0 = make_initial_data(cfg.family, cfg.amplitude, cfg.seed, cfg.grid).first;
  SaveWriter writer(dir, cfg);
  try {
    if (cfg.mode == "direct") {
      RunMonitors mon;
      mon.on_save = [&](const RunRecord& rec, const FluidState& s) { writer.save(rec.times.back(), s); };
      run(s0, cfg.params, cfg.time, mon);
    } else if (cfg.mode == "coupled") {
      RunMonitors mon;
      mon.keep_states = true;
      mon.on_save = [&](const RunRecord& rec, const FluidState& s) { writer.save(rec.times.back(), s); };
      const RunRecord coupled = run_coupled(s0, cfg.params, cfg.time, mon);
      RunMonitors keep;
      keep.keep_states = true;
      const RunRecord direct = run(s0, cfg.params, cfg.time, keep);
      std::ofstream f = dir.open("cross_formulation.csv");
      f << "t,difference_l2,direct_size_l2\n";
      for (std::size_t n = 0; n < coupled.states.size(); ++n)
        f << coupled.times[n] << "," << l2_distance(coupled.states[n], direct.states[n]) << ","
          << l2_size(direct.states[n]) << "\n";
    } else {
      std::ofstream contraction = dir.open("contraction.csv");
      contraction << "outer_iter,distance,sigma_ok,velocity_ok,energy_ok\n";
      AdmissibleSetSpec adm;
      adm.T = cfg.time.t_end;
      try {
        const PhiResult phi = phi_iteration(s0, cfg.params, cfg.time, cfg.phi_max_outer, cfg.phi_tol, adm);
        for (std::size_t i = 0; i < phi.distances.size(); ++i) {
          const auto& a = phi.admissible[i];
          contraction << i + 1 << "," << phi.distances[i] << "," << (a.sigma_ok ? "true" : "false") << ","
                      << (a.velocity_ok ? "true" : "false") << "," << (a.energy_ok ? "true" : "false") << "\n";
        }
        for (const auto& w : phi.warnings) err << "warning: " << w << "\n";
        for (std::size_t n = 0; n < phi.trajectory.size(); ++n)
          if (cfg.time.saves(static_cast<int>(n))) {
            FluidState s = phi.trajectory[n];
            s.pressure_grad = compute_pressure(s, cfg.params);
            writer.save(phi.times[n], s);
          }
      } catch (const PhiConvergenceError& e) {
        for (std::size_t i = 0; i < e.distances().size(); ++i)
          contraction << i + 1 << "," << e.distances()[i] << ",,,\n";
        throw;
      }
    }
  } catch (const SolverError& e) {
    err << "solver abort: " << e.what() << "\n";
    dir.write_manifest(g.config, hash, "solver_abort", kSolverAbort, e.what());
    return kSolverAbort;
  }
  dir.write_manifest(g.config, hash, "completed", kPass);
  out << "completed " << cfg.mode << " run in " << dir.root().string() << "\n";
  return kPass;
}

struct VerifyOptions {
  int count = 64;
  int dim = 2;
  int M = 64;
};

std::string report_line(const RatioReport& r) {
  std::ostringstream s;
  s << (r.passed() ? "PASS " : "FAIL ") << r.name;
  for (const auto& [k, v] : r.params) s << " " << k << "=" << v;
  s << " max_ratio=" << r.max_ratio << " doubled=" << r.doubled_max_ratio << " count=" << r.count
    << " stable=" << (r.stable ? "true" : "false");
  if (r.bracket) s << " bracket_ok=" << (r.bracket_ok ? "true" : "false");
  return s.str();
}

bool smallness_passed(const SmallnessTable& t) {
  const bool done = std::all_of(t.rows.begin(), t.rows.end(), [](const SmallnessRow& r) { return r.completed; });
  return done && t.h_ratio_spread < 2.0 && std::abs(t.pressure_slope - 2.0) <= 0.3;
}

void print_smallness(const SmallnessTable& t, std::ostream& out) {
  for (const auto& r : t.rows)
    out << "  alpha=" << r.alpha << " h_ratio=" << r.h_ratio << " pressure_ratio=" << r.pressure_ratio
        << (r.completed ? "" : " error=" + r.error) << "\n";
  out << (smallness_passed(t) ? "PASS" : "FAIL") << " smallness spread=" << t.h_ratio_spread
      << " slope=" << t.pressure_slope << "\n";
}

const std::vector<double> kDefaultAlphas{1e-3, 3e-3, 1e-2};

int cmd_verify(const Globals& g, const std::string& suite, const VerifyOptions& opt, std::ostream& out) {
  std::vector<std::string> suites;
  const auto& ratio = ratio_suite_names();
  if (suite == "all") {
    suites = ratio;
    suites.push_back("scaling");
    suites.push_back("smallness");
  } else if (suite == "scaling" || suite == "smallness" ||
             std::find(ratio.begin(), ratio.end(), suite) != ratio.end()) {
    suites.push_back(suite);
  } else {
    throw ConfigError("unknown suite '" + suite + "'; expected bernstein, products, loginterp, commutator, scaling, "
                      "smallness or all");
  }

  EnsembleSpec ens;
  ens.count = opt.count;
  ens.seed = g.seed.value_or(1);
  ens.threads = g.threads;
  ens.validate();
  const GridSpec grid = make_grid(opt.dim, opt.M);

  std::optional<RunDir> dir;
  if (!g.out.empty()) dir.emplace(g.out, "verify " + suite);

  bool all_ok = true;
  std::vector<RatioReport> reports;
  for (const auto& name : suites) {
    if (name == "scaling") {
      const ScalingReport sr = verify_scaling(band_safe_state(grid, ens.seed), 1);
      for (const auto& e : sr.entries)
        out << (e.relative_error <= sr.tolerance ? "PASS" : "FAIL") << " scaling field=" << e.field
            << " original=" << e.original << " rescaled=" << e.rescaled << " relative_error=" << e.relative_error
            << "\n";
      all_ok = all_ok && sr.passed();
      if (dir) {
        std::ofstream f = dir->open("scaling.csv");
        f << "field,original,rescaled,relative_error\n";
        for (const auto& e : sr.entries) f << e.field << "," << e.original << "," << e.rescaled << "," << e.relative_error << "\n";
      }
    } else if (name == "smallness") {
      PhysicalParams params;
      const SmallnessTable t = smallness_experiment(kDefaultAlphas, 10.0, make_grid(2, 32), params);
      print_smallness(t, out);
      all_ok = all_ok && smallness_passed(t);
      if (dir) write_smallness_csv(dir->track("smallness.csv"), t);
    } else {
      for (auto& r : default_ratio_suite(name, ens, grid)) {
        out << report_line(r) << "\n";
        all_ok = all_ok && r.passed();
        reports.push_back(std::move(r));
      }
    }
  }
  if (dir && !reports.empty()) {
    write_reports_csv(dir->track("reports.csv"), reports);
    write_reports_json(dir->track("reports.json"), reports);
  }
  out << (all_ok ? "verify: all checks passed" : "verify: some checks failed") << "\n";
  if (dir) dir->write_manifest(g.config, "", all_ok ? "passed" : "failed", all_ok ? kPass : kSoftFail);
  return all_ok ? kPass : kSoftFail;
}

struct SmallnessCli {
  std::vector<double> alphas = kDefaultAlphas;
  double T = 10.0;
};

int cmd_smallness(const Globals& g, const SmallnessCli& opt, std::ostream& out) {
  GridSpec grid = make_grid(2, 32);
  PhysicalParams params;
  SmallnessOptions so;
  double T = opt.T;
  std::string hash;
  if (!g.config.empty()) {
    const RunConfig cfg = parse_config(read_json_file(g.config));
    grid = cfg.grid;
    params = cfg.params;
    so.family = cfg.family;
    so.dt = cfg.time.dt;
    so.save_stride = cfg.time.save_stride;
    T = cfg.time.t_end;
    hash = fnv1a_hex(to_json(cfg).dump(2) + "\n");
  }
  if (g.seed) so.seed = *g.seed;
  const SmallnessTable t = smallness_experiment(opt.alphas, T, grid, params, so);
  print_smallness(t, out);
  const bool ok = smallness_passed(t);
  if (!g.out.empty()) {
    RunDir dir(g.out, "smallness");
    write_smallness_csv(dir.track("smallness.csv"), t);
    dir.write_manifest(g.config, hash, ok ? "passed" : "failed", ok ? kPass : kSoftFail);
  }
  return ok ? kPass : kSoftFail;
}

}  // namespace

RunConfig parse_config(const json& j) {
  require_keys(j, "config", {"grid", "params", "time", "initial", "mode", "norms", "output_dir", "phi"});
  RunConfig c;
  try {
    const json& grid = member(j, "grid", "config");
    require_keys(grid, "grid", {"dim", "M"});
    c.grid = make_grid(static_cast<int>(integer(grid, "dim", "grid")), static_cast<int>(integer(grid, "M", "grid")));

    if (j.contains("params")) {
      const json& p = j.at("params");
      require_keys(p, "params", {"mu", "sigma_floor"});
      c.params.mu = number(p, "mu", "params", c.params.mu);
      c.params.sigma_floor = number(p, "sigma_floor", "params", c.params.sigma_floor);
    }
    c.params.validate();

    const json& t = member(j, "time", "config");
    require_keys(t, "time", {"T", "dt", "save_stride"});
    c.time.t_end = number(t, "T", "time");
    c.time.dt = number(t, "dt", "time");
    c.time.save_stride = static_cast<int>(integer(t, "save_stride", "time", 1));
    c.time.validate();

    const json& ini = member(j, "initial", "config");
    require_keys(ini, "initial", {"family", "amplitude", "seed"});
    const json& fam = member(ini, "family", "initial");
    if (!fam.is_string()) throw ConfigError("initial.family must be a string");
    c.family = parse_family(fam.get<std::string>());
    c.amplitude = number(ini, "amplitude", "initial");
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude)) throw ConfigError("initial.amplitude must be >= 0");
    const long long seed = integer(ini, "seed", "initial", 0);
    if (seed < 0) throw ConfigError("initial.seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);

    if (j.contains("mode")) {
      if (!j.at("mode").is_string()) throw ConfigError("mode must be a string");
      c.mode = j.at("mode").get<std::string>();
    }
    if (c.mode != "direct" && c.mode != "phi" && c.mode != "coupled")
      throw ConfigError("mode must be direct, phi or coupled, got '" + c.mode + "'");

    if (j.contains("norms")) {
      const json& ns = j.at("norms");
      if (!ns.is_array()) throw ConfigError("norms must be an array");
      for (std::size_t i = 0; i < ns.size(); ++i) {
        const std::string where = "norms[" + std::to_string(i) + "]";
        const json& n = ns[i];
        require_keys(n, where, {"name", "s", "p", "r"});
        NormSpec spec;
        const json& name = member(n, "name", where);
        if (!name.is_string()) throw ConfigError(where + ".name must be a string");
        spec.name = name.get<std::string>();
        spec.spec.s = number(n, "s", where);
        spec.spec.p = exponent(member(n, "p", where), where + ".p");
        spec.spec.r = exponent(member(n, "r", where), where + ".r");
        c.norms.push_back(spec);
      }
    }
    if (j.contains("output_dir")) {
      if (!j.at("output_dir").is_string()) throw ConfigError("output_dir must be a string");
      c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("phi")) {
      const json& p = j.at("phi");
      require_keys(p, "phi", {"max_outer", "tol"});
      c.phi_max_outer = static_cast<int>(integer(p, "max_outer", "phi", c.phi_max_outer));
      c.phi_tol = number(p, "tol", "phi", c.phi_tol);
      if (c.phi_max_outer < 1 || !(c.phi_tol > 0.0)) throw ConfigError("phi.max_outer >= 1 and phi.tol > 0 required");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  json norms = json::array();
  for (const auto& n : c.norms)
    norms.push_back({{"name", n.name}, {"s", n.spec.s}, {"p", exponent_json(n.spec.p)}, {"r", exponent_json(n.spec.r)}});
  return {
      {"grid", {{"dim", c.grid.dim}, {"M", c.grid.points_per_axis}}},
      {"params", {{"mu", c.params.mu}, {"sigma_floor", c.params.sigma_floor}}},
      {"time", {{"T", c.time.t_end}, {"dt", c.time.dt}, {"save_stride", c.time.save_stride}}},
      {"initial", {{"family", to_string(c.family)}, {"amplitude", c.amplitude}, {"seed", c.seed}}},
      {"mode", c.mode},
      {"norms", norms},
      {"output_dir", c.output_dir.string()},
      {"phi", {{"max_outer", c.phi_max_outer}, {"tol", c.phi_tol}}},
  };
}

NormSpec parse_norm_spec(const std::string& text) {
  NormSpec n;
  std::string body = text;
  if (const auto eq = text.find('='); eq != std::string::npos) {
    n.name = text.substr(0, eq);
    body = text.substr(eq + 1);
  }
  std::vector<std::string> parts;
  std::stringstream ss(body);
  for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("norm spec '" + text + "' is not s,p,r");
  try {
    std::size_t used = 0;
    n.spec.s = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("trailing text");
    n.spec.p = Exponent::parse(parts[1]);
    n.spec.r = Exponent::parse(parts[2]);
  } catch (const std::exception&) {
    throw ConfigError("norm spec '" + text + "' is not s,p,r");
  }
  if (n.name.empty()) n.name = "B(" + parts[0] + "," + parts[1] + "," + parts[2] + ")";
  return n;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-spectral Besov lab for the density-dependent Oldroyd system", "critlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "JSON run configuration");
  CLI::Option* seed_opt = app.add_option("--seed", seed, "Seed override");
  app.add_option("--threads", g.threads, "Worker threads for ensembles")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  std::string snapshot;
  std::vector<std::string> norm_specs;
  auto* norms = app.add_subcommand("norms", "Besov norms of every field in a snapshot, as CSV");
  norms->add_option("snapshot", snapshot, "Snapshot file")->required();
  norms->add_option("--norm", norm_specs, "s,p,r or name=s,p,r; p and r accept inf");

  auto* simulate = app.add_subcommand("simulate", "Run the system as configured");
  auto* phi = app.add_subcommand("phi", "simulate with mode phi");

  std::string suite;
  VerifyOptions vopt;
  auto* verify = app.add_subcommand("verify", "Run estimate verification suites");
  verify->add_option("suite", suite, "bernstein, products, loginterp, commutator, scaling, smallness or all")
      ->required();
  verify->add_option("--count", vopt.count, "Ensemble size");
  verify->add_option("--dim", vopt.dim, "Grid dimension");
  verify->add_option("-M", vopt.M, "Points per axis");

  SmallnessCli sopt;
  auto* small = app.add_subcommand("smallness", "Small-data boundedness table");
  small->add_option("--alphas", sopt.alphas, "Target smallness values")->delimiter(',');
  small->add_option("-T", sopt.T, "Final time");

  for (auto* sub : {norms, simulate, phi, verify, small}) sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*norms) return cmd_norms(g, snapshot, norm_specs, out, err);
    if (*simulate) return cmd_simulate(g, std::nullopt, out, err);
    if (*phi) return cmd_simulate(g, "phi", out, err);
    if (*verify) return cmd_verify(g, suite, vopt, out);
    return cmd_smallness(g, sopt, out);
  } catch (const SolverError& e) {
    err << "solver abort: " << e.what() << "\n";
    return kSolverAbort;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace critlab::cli
