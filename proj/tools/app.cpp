#include "app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "wdl/config.hpp"
#include "wdl/errors.hpp"
#include "wdl/fbm.hpp"
#include "wdl/harness.hpp"
#include "wdl/io.hpp"
#include "wdl/levy.hpp"
#include "wdl/limit.hpp"
#include "wdl/manifest.hpp"
#include "wdl/parallel.hpp"
#include "wdl/rng.hpp"
#include "wdl/version.hpp"
#include "wdl/wigner.hpp"

namespace wdl::app {
namespace {

namespace fs = std::filesystem;
using Options = std::map<std::string, std::string>;

constexpr double kPi = 3.14159265358979323846;

/// Output directory plus the running list of written files.
class Sink {
 public:
  explicit Sink(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path path(const std::string& name) const { return dir_ / name; }
  void record(const std::string& name) {
    const auto p = path(name);
    outputs_.push_back({name, sha256_file(p), static_cast<std::uint64_t>(fs::file_size(p))});
  }
  std::ofstream text(const std::string& name) {
    std::ofstream os(path(name), std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + path(name).string() + "'");
    return os;
  }
  const std::vector<OutputDigest>& outputs() const { return outputs_; }

 private:
  fs::path dir_;
  std::vector<OutputDigest> outputs_;
};

std::string indexed(const std::string& stem, std::size_t i, const char* ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
  return os.str();
}

std::string option(const Options& o, const std::string& key, const std::string& fallback = {}) {
  const auto it = o.find(key);
  return it == o.end() ? fallback : it->second;
}

double max_potential_estimate(const ModeSet& modes) {
  double v = 0.0;
  for (std::size_t j = 0; j < modes.pair_count(); ++j) v += 2.0 * modes.stationary_variance(2 * j);
  return 6.0 * std::sqrt(v);
}

struct Propagation {
  std::vector<WaveField> fields;  // t = 0 first
  StepDiagnostics diag;
  double dt = 0.0;
};

Propagation run_propagation(const Config& cfg, std::ostream& out) {
  const auto& sv = cfg.solver;
  const Grid grid = sv.grid(cfg.model.d);
  const ScalingRegime regime = sv.regime();
  regime.validate();
  const GaussianPacket packet{{}, sv.packet_width};
  std::vector<double> zeta(static_cast<std::size_t>(grid.d), 0.0);
  zeta[0] = sv.zeta;
  InitialConditionReport report;
  const WaveField f0 = initial_condition(packet, zeta, regime, grid, &report);
  if (report.applied != report.requested) {
    out << "carrier rounded to lattice: " << report.requested[0] << " -> " << report.applied[0] << "\n";
  }
  ModeSet modes = ModeSet::build(cfg.model, grid, regime.wave_scale(), cfg.seed);
  Propagation p;
  p.dt = sv.dt;
  if (!(p.dt > 0.0)) {
    // largest stable dt that divides the snapshot spacing
    const double spacing = sv.T / static_cast<double>(sv.snapshots);
    const double cap = suggest_dt(f0, cfg.model, max_potential_estimate(modes));
    p.dt = spacing > 0.0 ? spacing / std::ceil(spacing / cap) : cap;
  }
  StochasticPotential potential(std::move(modes));
  SolverConfig sc;
  sc.dt = p.dt;
  sc.snapshots = sv.snapshot_times();
  p.fields.push_back(f0);
  auto snaps = propagate(f0, potential, cfg.model, sc, &p.diag);
  for (auto& s : snaps) p.fields.push_back(std::move(s));
  return p;
}

void report_phase_warnings(const StepDiagnostics& d, std::ostream& err) {
  if (d.phase_warnings) {
    err << "warning: " << d.phase_warnings << " steps had potential phase above pi/4 (max "
        << d.max_potential_phase << "); reduce dt\n";
  }
}

void cmd_synthesize(const Config& cfg, Sink& sink, std::ostream& out) {
  const auto& sv = cfg.solver;
  const Grid grid = sv.grid(cfg.model.d);
  const ScalingRegime regime = sv.regime();
  StochasticPotential potential(ModeSet::build(cfg.model, grid, regime.wave_scale(), cfg.seed));
  const auto& modes = potential.modes();
  {
    auto os = sink.text("modes.csv");
    io::CsvWriter csv(os, {"p", "weight", "variance", "gap"});
    for (std::size_t m = 0; m < modes.size(); m += 2) {
      csv.row({modes.wavevector(m)[0], modes.weight(m), modes.stationary_variance(m), modes.gap(m)});
    }
  }
  sink.record("modes.csv");
  const std::uint32_t hash = params_hash(cfg.model);
  const double micro = std::pow(regime.epsilon, regime.s + cfg.model.gamma);
  std::vector<double> times{0.0};
  for (double t : sv.snapshot_times()) times.push_back(t);
  std::vector<double> v;
  for (std::size_t i = 0; i < times.size(); ++i) {
    potential.sample(times[i] / micro, v);
    const auto name = indexed("potential", i, ".wdlb");
    io::write_real_field(sink.path(name), grid, v, times[i], hash, cfg.seed);
    sink.record(name);
  }
  out << "synthesized " << modes.pair_count() << " mode pairs, " << times.size() << " snapshots\n";
}

void cmd_propagate(const Config& cfg, Sink& sink, std::ostream& out, std::ostream& err) {
  const auto p = run_propagation(cfg, out);
  report_phase_warnings(p.diag, err);
  const std::uint32_t hash = params_hash(cfg.model);
  const double m0 = p.fields.front().mass();
  {
    auto os = sink.text("diagnostics.csv");
    io::CsvWriter csv(os, {"time", "mass", "relative_mass_error", "inner_mass_fraction", "alias_fraction"});
    for (const auto& f : p.fields) {
      csv.row({f.time, f.mass(), f.mass() / m0 - 1.0, inner_mass_fraction(f), alias_fraction(f)});
    }
  }
  for (std::size_t i = 0; i < p.fields.size(); ++i) {
    const auto name = indexed("field", i, ".wdlb");
    io::write_wave_field(sink.path(name), p.fields[i], hash, cfg.seed);
    sink.record(name);
  }
  sink.record("diagnostics.csv");
  out << "propagated to t = " << p.fields.back().time << " in " << p.diag.steps << " steps of " << p.dt
      << ", relative mass error " << p.fields.back().mass() / m0 - 1.0 << "\n";
}

void write_phase_snapshots(const std::vector<WignerGrid>& ws, const std::string& stem, const Config& cfg,
                           const Options& opts, Sink& sink) {
  const std::uint32_t hash = params_hash(cfg.model);
  const std::string slice = option(opts, "slice");
  {
    auto os = sink.text(stem + "_summary.csv");
    io::CsvWriter csv(os, {"time", "l2_norm", "mass"});
    for (const auto& w : ws) csv.row({w.time, l2_norm(w), total_mass(w)});
  }
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const auto name = indexed(stem, i, ".wdlb");
    io::write_wigner(sink.path(name), ws[i], hash, cfg.seed);
    sink.record(name);
    if (!slice.empty()) {
      const auto csv = indexed(stem + "_slice", i, ".csv");
      {
        auto os = sink.text(csv);
        write_slice_csv(os, ws[i], std::stod(slice));
      }
      sink.record(csv);
    }
  }
  sink.record(stem + "_summary.csv");
}

void cmd_wigner(const Config& cfg, const Options& opts, Sink& sink, std::ostream& out, std::ostream& err) {
  const auto p = run_propagation(cfg, out);
  report_phase_warnings(p.diag, err);
  WignerOptions wo;
  wo.x_stride = cfg.plan.x_stride;
  std::vector<WignerGrid> ws;
  for (const auto& f : p.fields) ws.push_back(wigner_transform(f, wo));
  write_phase_snapshots(ws, "wigner", cfg, opts, sink);
  out << "wigner transforms at " << ws.size() << " times on " << ws.front().grid.nx << " x "
      << ws.front().grid.nk << " phase points\n";
}

void cmd_limit(const Config& cfg, const Options& opts, Sink& sink, std::ostream& out) {
  const std::string model = option(opts, "model", "frac");
  if (model != "frac" && model != "transfer") throw ConfigError("limit: --model must be frac or transfer");
  const auto& sv = cfg.solver;
  const Grid grid = sv.grid(cfg.model.d);
  const ScalingRegime regime = sv.regime();
  const GaussianPacket packet{{}, sv.packet_width};
  const WignerGrid w0 = initial_wigner(packet, cfg.plan.mu, regime, grid, cfg.plan.x_stride);
  std::vector<WignerGrid> ws{w0};
  const auto times = sv.snapshot_times();
  if (model == "frac") {
    for (double t : times) ws.push_back(frac_diffusion_evolve(w0, cfg.model, t));
  } else {
    const auto& g = w0.grid;
    const double diameter = 2.0 * std::hypot(kPi / g.dk, kPi / g.dx);
    const double extent = std::max(4.0 * diameter, required_psi_extent(g, times.back()));
    const PsiTable psi(JumpKernel(cfg.model), extent, 4000, cfg.plan.jobs);
    for (double t : times) ws.push_back(radiative_closed_form(w0, psi, t));
  }
  write_phase_snapshots(ws, "limit", cfg, opts, sink);
  out << model << " limit at " << times.size() << " times\n";
}

void cmd_sample(const Config& cfg, const Options& opts, Sink& sink, std::ostream& out) {
  const std::string model = option(opts, "model", "direction");
  const auto count = static_cast<std::size_t>(std::stoull(option(opts, "count", "10000")));
  auto os = sink.text(model + "_samples.csv");
  if (model == "direction") {
    io::CsvWriter csv(os, {"zeta"});
    for (std::size_t i = 0; i < count; ++i) csv.row({sample_direction(cfg.plan.mu, 1, cfg.seed, i)[0]});
  } else if (model == "fbm") {
    const double hurst = derived_exponents(cfg.model).kappa0;
    const auto path = fbm_sample(hurst, count, 1.0 / static_cast<double>(count), cfg.seed);
    io::CsvWriter csv(os, {"t", "b"});
    for (std::size_t i = 0; i < path.values.size(); ++i) csv.row({static_cast<double>(i) * path.dt, path.values[i]});
  } else if (model == "levy") {
    const LevySampler sampler(JumpKernel(cfg.model), 1e-6);
    io::CsvWriter csv(os, {"position", "integral", "jumps"});
    std::vector<LevyEndpoint> ends(count);
    parallel_for(count, cfg.plan.jobs, [&](std::size_t i) { ends[i] = sampler.endpoint(cfg.solver.T, cfg.seed, i); });
    for (const auto& e : ends) csv.row({e.position, e.integral, static_cast<double>(e.jumps)});
  } else {
    throw ConfigError("sample: --model must be direction, fbm or levy");
  }
  os.close();
  sink.record(model + "_samples.csv");
  out << "wrote " << count << " " << model << " samples\n";
}

int cmd_experiment(const Config& cfg, Sink& sink, std::ostream& out) {
  auto progress = [&](const std::string& msg) { out << msg << "\n" << std::flush; };
  const auto& plan = cfg.plan;
  if (plan.kind == PlanKind::kPhase) {
    const auto rep = phase_experiment(plan, progress);
    {
      auto os = sink.text("phase_report.csv");
      io::CsvWriter csv(os, {"epsilon", "kappa_hat", "ci_low", "ci_high", "degenerate", "modulus_drift",
                             "ks_p_value", "unwrap_flags", "control_phase"});
      for (const auto& r : rep.rows) {
        csv.row({r.epsilon, r.kappa_hat, r.ci_low, r.ci_high, r.degenerate ? 1.0 : 0.0, r.modulus_drift,
                 r.ks_p_value, static_cast<double>(r.unwrap_flags), r.control_phase});
      }
    }
    sink.record("phase_report.csv");
    out << "kappa0 = " << rep.kappa0 << "\n";
    return kExitOk;
  }
  const auto rep = decoherence_convergence(plan, progress);
  {
    auto os = sink.text("report.csv");
    io::CsvWriter csv(os, {"epsilon", "median_distance", "q25", "q75", "iqr", "initial_gap", "alias_fraction"});
    for (const auto& r : rep.rows) csv.row({r.epsilon, r.median, r.q25, r.q75, r.iqr, r.initial_gap, r.alias_fraction});
  }
  {
    auto os = sink.text("distances.csv");
    io::CsvWriter csv(os, {"epsilon", "realization", "distance"});
    for (const auto& r : rep.rows) {
      for (std::size_t i = 0; i < r.distances.size(); ++i) csv.row({r.epsilon, static_cast<double>(i), r.distances[i]});
    }
  }
  sink.record("report.csv");
  sink.record("distances.csv");
  out << "distances strictly decreasing: " << (rep.distances_decreasing ? "yes" : "no")
      << ", spread shrinking: " << (rep.spread_shrinking ? "yes" : "no") << "\n";
  return kExitOk;
}

int cmd_validate(const Config& cfg, Sink& sink, std::ostream& out) {
  const auto& v = cfg.validate;
  const Grid grid{cfg.model.d, v.cov_grid_N, v.cov_box_L};
  const ModeSet modes = ModeSet::build(cfg.model, grid, 1.0, cfg.seed);
  Prop1Config pc;
  pc.samples = v.prop1_samples;
  pc.correlation = v.prop1_correlation;
  auto verdicts = prop1_suite(modes, pc);
  const std::size_t n_prop1 = verdicts.size();
  auto cc = default_covariance_config();
  cc.dt = v.cov_dt;
  cc.realizations = v.cov_realizations;
  cc.jobs = cfg.plan.jobs;
  for (auto& x : covariance_suite(cfg.model, grid, cc, derive_seed(cfg.seed, 1))) verdicts.push_back(std::move(x));
  bool all = true;
  {
    auto os = sink.text("validate.csv");
    io::CsvWriter csv(os, {"suite", "check", "pass", "observed", "expected", "tolerance", "detail"});
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      const auto& x = verdicts[i];
      all = all && x.pass;
      csv.row_text({i < n_prop1 ? "prop1" : "covariance", x.name, x.pass ? "pass" : "FAIL",
                    io::format_number(x.observed), io::format_number(x.expected), io::format_number(x.tolerance),
                    '"' + x.detail + '"'});
      out << (x.pass ? "pass  " : "FAIL  ") << x.name << "  observed " << x.observed << " expected " << x.expected
          << "\n";
    }
  }
  sink.record("validate.csv");
  out << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? kExitOk : kExitChecksFailed;
}

/// Runs one subcommand into `dir` and writes its manifest.
int execute(const std::string& sub, const Config& cfg, const Options& opts, const fs::path& dir,
            std::ostream& out, std::ostream& err, RunManifest* manifest_out = nullptr) {
  Sink sink(dir);
  RunManifest m;
  m.tool_version = kVersion;
  m.subcommand = sub;
  m.options = opts;
  m.config = to_ini(cfg);
  m.params_hash = hash_hex(params_hash(cfg.model));
  m.seed = cfg.seed;
  m.started = utc_timestamp();
  int code = kExitOk;
  if (sub == "synthesize") {
    cmd_synthesize(cfg, sink, out);
  } else if (sub == "propagate") {
    cmd_propagate(cfg, sink, out, err);
  } else if (sub == "wigner") {
    cmd_wigner(cfg, opts, sink, out, err);
  } else if (sub == "limit") {
    cmd_limit(cfg, opts, sink, out);
  } else if (sub == "sample") {
    cmd_sample(cfg, opts, sink, out);
  } else if (sub == "experiment") {
    code = cmd_experiment(cfg, sink, out);
  } else if (sub == "validate") {
    code = cmd_validate(cfg, sink, out);
  } else {
    throw ConfigError("unknown subcommand '" + sub + "'");
  }
  m.finished = utc_timestamp();
  m.outputs = sink.outputs();
  m.write(dir / "manifest.json");
  if (manifest_out) *manifest_out = m;
  return code;
}

int replay(const fs::path& manifest_path, const fs::path& dir, unsigned jobs, std::ostream& out,
           std::ostream& err) {
  const RunManifest ref = RunManifest::read(manifest_path);
  Config cfg = parse_config(ref.config);
  cfg.plan.jobs = jobs;
  RunManifest now;
  const int code = execute(ref.subcommand, cfg, ref.options, dir, out, err, &now);
  std::map<std::string, std::string> digests;
  for (const auto& o : now.outputs) digests[o.path] = o.sha256;
  std::size_t bad = 0;
  for (const auto& o : ref.outputs) {
    const auto it = digests.find(o.path);
    if (it == digests.end() || it->second != o.sha256) {
      err << "mismatch: " << o.path << "\n";
      ++bad;
    }
  }
  if (now.outputs.size() != ref.outputs.size()) {
    err << "output count differs: " << now.outputs.size() << " vs " << ref.outputs.size() << "\n";
    ++bad;
  }
  out << (bad ? "replay differs from manifest\n" : "replay reproduces all outputs\n");
  if (bad) return kExitNumerical;
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"wdlab: wave propagation in long-range random media", "wdlab"};
  cli.require_subcommand(1);
  std::string config_path, out_dir = ".", model, plan, slice, manifest_path;
  std::uint64_t seed = 0;
  double eps = 0.0, s = 0.0, sc = 0.0;
  unsigned jobs = 1;
  std::size_t count = 10000;

  auto common = [&](CLI::App* c) {
    c->add_option("--config", config_path, "INI configuration file");
    c->add_option("--seed", seed, "master seed (overrides the config)");
    c->add_option("--out", out_dir, "output directory");
    c->add_option("--eps", eps, "epsilon");
    c->add_option("--s", s, "propagation scale exponent s");
    c->add_option("--sc", sc, "correlation scale exponent s_c");
    c->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto* syn = cli.add_subcommand("synthesize", "potential realization snapshots");
  auto* prop = cli.add_subcommand("propagate", "split-step propagation snapshots");
  auto* wig = cli.add_subcommand("wigner", "Wigner transforms of propagated snapshots");
  auto* lim = cli.add_subcommand("limit", "limit-model phase-space solutions");
  auto* smp = cli.add_subcommand("sample", "draws of directions, fBm paths or Levy endpoints");
  auto* exp = cli.add_subcommand("experiment", "convergence or phase experiment");
  auto* val = cli.add_subcommand("validate", "Ornstein-Uhlenbeck and covariance self-tests");
  auto* rep = cli.add_subcommand("replay", "re-run from a manifest and compare digests");
  for (auto* c : {syn, prop, wig, lim, smp, exp, val}) common(c);
  wig->add_option("--slice", slice, "x of a CSV slice per snapshot");
  lim->add_option("--slice", slice, "x of a CSV slice per snapshot");
  lim->add_option("--model", model, "frac or transfer")->check(CLI::IsMember({"frac", "transfer"}));
  smp->add_option("--model", model, "direction, fbm or levy")->check(CLI::IsMember({"direction", "fbm", "levy"}));
  smp->add_option("--count", count, "number of samples");
  exp->add_option("--plan", plan, "frac_default, transfer_default or phase_default");
  rep->add_option("--manifest", manifest_path, "manifest.json of the run")->required();
  rep->add_option("--out", out_dir, "output directory");
  rep->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1u, 1024u));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    cli.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << cli.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << cli.help();
    return kExitConfig;
  }
  auto* sub = cli.get_subcommands().front();
  try {
    if (sub == rep) return replay(manifest_path, out_dir, jobs, out, err);
    if (config_path.empty()) {
      err << "error: --config is required\n" << sub->help();
      return kExitConfig;
    }
    Config cfg = load_config(config_path, plan);
    if (sub->count("--seed")) {
      cfg.seed = seed;
      cfg.plan.seed = seed;
    }
    if (sub->count("--eps")) {
      cfg.solver.epsilon = eps;
      cfg.plan.ladder = {eps};
    }
    if (sub->count("--s")) {
      cfg.solver.s = s;
      cfg.plan.s = s;
    }
    if (sub->count("--sc")) {
      cfg.solver.s_c = sc;
      cfg.plan.s_c = sc;
    }
    cfg.plan.jobs = jobs;
    // canonicalize so the manifest snapshot is exactly what ran
    cfg = parse_config(to_ini(cfg));
    cfg.plan.jobs = jobs;
    Options opts;
    if (!model.empty()) opts["model"] = model;
    if (!slice.empty()) opts["slice"] = slice;
    if (sub == smp) opts["count"] = std::to_string(count);
    return execute(sub->get_name(), cfg, opts, out_dir, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace wdl::app
