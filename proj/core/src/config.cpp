#include "wdl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wdl/errors.hpp"
#include "wdl/io.hpp"

namespace wdl {
namespace {

namespace pt = boost::property_tree;

class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return tree_ && tree_->find(key) != tree_->not_found();
  }
  std::string text(const std::string& key) { return tree_->get<std::string>(key); }

  void real(const std::string& key, double& out) {
    if (!has(key)) return;
    const std::string v = trim(text(key));
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, v, "a number");
    out = x;
  }
  template <class U>
  void count(const std::string& key, U& out) {
    if (!has(key)) return;
    const std::string v = trim(text(key));
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) fail(key, v, "a nonnegative integer");
    out = static_cast<U>(x);
  }
  void word(const std::string& key, std::string& out) {
    if (has(key)) out = trim(text(key));
  }
  void list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    out.clear();
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      double x = 0.0;
      const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
      if (item.empty() || ec != std::errc() || p != item.data() + item.size()) fail(key, item, "a number list");
      out.push_back(x);
    }
  }
  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [key, child] : *tree_) {
      if (!child.empty()) throw ConfigError("[" + name_ + "] nested key '" + key + "'");
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
    }
  }
  [[noreturn]] void fail(const std::string& key, const std::string& v, const char* what) const {
    throw ConfigError("[" + name_ + "] " + key + " = '" + v + "' is not " + what);
  }

 private:
  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> seen_;
};

const pt::ptree* child(const pt::ptree& root, const char* name) {
  const auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

MixtureRule parse_mixture(const std::string& v) {
  if (v == "monte_carlo") return MixtureRule::kMonteCarlo;
  if (v == "lattice") return MixtureRule::kLatticeQuadrature;
  throw ConfigError("[experiment] mixture must be monte_carlo or lattice, got '" + v + "'");
}

PlanKind parse_kind(const std::string& v) {
  if (v == "frac") return PlanKind::kFracDiffusion;
  if (v == "transfer") return PlanKind::kTransfer;
  if (v == "phase") return PlanKind::kPhase;
  throw ConfigError("[experiment] kind must be frac, transfer or phase, got '" + v + "'");
}

std::string num(double v) { return io::format_number(v); }

}  // namespace

std::string mixture_name(MixtureRule m) {
  return m == MixtureRule::kMonteCarlo ? "monte_carlo" : "lattice";
}

std::string plan_kind_name(PlanKind k) {
  switch (k) {
    case PlanKind::kFracDiffusion: return "frac";
    case PlanKind::kTransfer: return "transfer";
    case PlanKind::kPhase: return "phase";
  }
  return "frac";
}

std::vector<double> SolverSettings::snapshot_times() const {
  std::vector<double> t;
  for (std::size_t i = 1; i <= snapshots; ++i) t.push_back(T * static_cast<double>(i) / static_cast<double>(snapshots));
  return t;
}

Config parse_config(const std::string& text, const std::string& plan) {
  pt::ptree root;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [name, tree] : root) {
    if (tree.empty() && !tree.data().empty()) throw ConfigError("config: key '" + name + "' outside a section");
    if (name != "model" && name != "solver" && name != "experiment") {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  Config c;

  Section m("model", child(root, "model"));
  m.count("d", c.model.d);
  m.real("alpha", c.model.alpha);
  m.real("beta", c.model.beta);
  m.real("nu", c.model.nu);
  m.real("gamma", c.model.gamma);
  std::string env = c.model.envelope.name();
  double amp = c.model.envelope.amplitude;
  m.word("envelope", env);
  m.real("envelope_amp", amp);
  try {
    c.model.envelope = Envelope::parse(env, amp);
    c.model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }
  m.check_unknown();

  Section s("solver", child(root, "solver"));
  auto& sv = c.solver;
  s.real("dt", sv.dt);
  s.real("T", sv.T);
  s.count("snapshots", sv.snapshots);
  s.real("box_L", sv.box_L);
  s.count("grid_N", sv.grid_N);
  s.real("epsilon", sv.epsilon);
  s.real("s", sv.s);
  s.real("s_c", sv.s_c);
  s.real("zeta", sv.zeta);
  s.real("packet_width", sv.packet_width);
  s.check_unknown();
  if (sv.dt < 0.0 || !(sv.T >= 0.0) || sv.snapshots < 1 || !(sv.box_L > 0.0) || sv.grid_N < 4 ||
      !(sv.packet_width > 0.0)) {
    throw ConfigError("[solver] need dt >= 0, T >= 0, snapshots >= 1, box_L > 0, grid_N >= 4, packet_width > 0");
  }
  if (sv.grid_N & (sv.grid_N - 1)) throw ConfigError("[solver] grid_N must be a power of two");

  Section e("experiment", child(root, "experiment"));
  std::string plan_name = c.plan.name;
  e.word("plan", plan_name);
  if (!plan.empty()) plan_name = plan;
  c.plan = plan_by_name(plan_name);
  auto& p = c.plan;
  p.params = c.model;
  std::string word = plan_kind_name(p.kind);
  e.word("kind", word);
  p.kind = parse_kind(word);
  e.list("ladder", p.ladder);
  e.real("s", p.s);
  e.real("s_c", p.s_c);
  e.real("t1", p.t1);
  e.real("dt", p.dt);
  e.count("grid_N", p.grid.n);
  e.real("box_L", p.grid.length);
  p.grid.d = c.model.d;
  e.count("x_stride", p.x_stride);
  e.count("realizations", p.realizations);
  word = mixture_name(p.mixture);
  e.word("mixture", word);
  p.mixture = parse_mixture(word);
  e.count("directions", p.directions);
  e.real("quadrature_spacing", p.quadrature_spacing);
  std::string mu = p.mu.is_point() ? "point" : p.mu.kind == DirectionLaw::Kind::kUniform ? "uniform" : "gaussian";
  double mu_mean = p.mu.mean, mu_scale = p.mu.scale;
  e.word("mu", mu);
  e.real("mu_mean", mu_mean);
  e.real("mu_scale", mu_scale);
  if (mu == "gaussian") {
    p.mu = DirectionLaw::gaussian(mu_mean, mu_scale);
  } else if (mu == "point") {
    p.mu = DirectionLaw::point(mu_mean);
  } else if (mu == "uniform") {
    p.mu = DirectionLaw::uniform(mu_mean, mu_scale);
  } else {
    throw ConfigError("[experiment] mu must be gaussian, point or uniform, got '" + mu + "'");
  }
  if (!p.mu.is_point() && !(p.mu.scale > 0.0)) throw ConfigError("[experiment] mu_scale must be positive");
  e.real("packet_width", p.packet_width);
  e.count("seed", p.seed);
  e.word("family", p.family);
  e.real("track_k", p.track_k);
  e.count("phase_samples", p.phase_samples);
  e.count("sample_stride", p.sample_stride);
  auto& v = c.validate;
  e.count("prop1_samples", v.prop1_samples);
  e.real("prop1_correlation", v.prop1_correlation);
  e.count("cov_realizations", v.cov_realizations);
  e.real("cov_dt", v.cov_dt);
  e.real("cov_box_L", v.cov_box_L);
  e.count("cov_grid_N", v.cov_grid_N);
  e.check_unknown();
  if (p.x_stride < 1 || p.sample_stride < 1 || p.directions < 1) {
    throw ConfigError("[experiment] x_stride, sample_stride and directions must be >= 1");
  }
  if (!(v.prop1_correlation > 0.0 && v.prop1_correlation < 1.0)) {
    throw ConfigError("[experiment] prop1_correlation must lie in (0, 1)");
  }
  c.seed = p.seed;
  return c;
}

Config load_config(const std::filesystem::path& path, const std::string& plan) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), plan);
}

std::string model_section(const ModelParams& p) {
  std::ostringstream os;
  os << "[model]\n"
     << "d = " << p.d << "\n"
     << "alpha = " << num(p.alpha) << "\n"
     << "beta = " << num(p.beta) << "\n"
     << "nu = " << num(p.nu) << "\n"
     << "gamma = " << num(p.gamma) << "\n"
     << "envelope = " << p.envelope.name() << "\n"
     << "envelope_amp = " << num(p.envelope.amplitude) << "\n";
  return os.str();
}

std::string to_ini(const Config& c) {
  std::ostringstream os;
  os << model_section(c.model) << "\n";
  const auto& s = c.solver;
  os << "[solver]\n"
     << "dt = " << num(s.dt) << "\n"
     << "T = " << num(s.T) << "\n"
     << "snapshots = " << s.snapshots << "\n"
     << "box_L = " << num(s.box_L) << "\n"
     << "grid_N = " << s.grid_N << "\n"
     << "epsilon = " << num(s.epsilon) << "\n"
     << "s = " << num(s.s) << "\n"
     << "s_c = " << num(s.s_c) << "\n"
     << "zeta = " << num(s.zeta) << "\n"
     << "packet_width = " << num(s.packet_width) << "\n\n";
  const auto& p = c.plan;
  std::string ladder;
  for (std::size_t i = 0; i < p.ladder.size(); ++i) ladder += (i ? ", " : "") + num(p.ladder[i]);
  const char* mu = p.mu.is_point() ? "point" : p.mu.kind == DirectionLaw::Kind::kUniform ? "uniform" : "gaussian";
  os << "[experiment]\n"
     << "plan = " << p.name << "\n"
     << "kind = " << plan_kind_name(p.kind) << "\n"
     << "ladder = " << ladder << "\n"
     << "s = " << num(p.s) << "\n"
     << "s_c = " << num(p.s_c) << "\n"
     << "t1 = " << num(p.t1) << "\n"
     << "dt = " << num(p.dt) << "\n"
     << "grid_N = " << p.grid.n << "\n"
     << "box_L = " << num(p.grid.length) << "\n"
     << "x_stride = " << p.x_stride << "\n"
     << "realizations = " << p.realizations << "\n"
     << "mixture = " << mixture_name(p.mixture) << "\n"
     << "directions = " << p.directions << "\n"
     << "quadrature_spacing = " << num(p.quadrature_spacing) << "\n"
     << "mu = " << mu << "\n"
     << "mu_mean = " << num(p.mu.mean) << "\n"
     << "mu_scale = " << num(p.mu.scale) << "\n"
     << "packet_width = " << num(p.packet_width) << "\n"
     << "seed = " << p.seed << "\n"
     << "family = " << p.family << "\n"
     << "track_k = " << num(p.track_k) << "\n"
     << "phase_samples = " << p.phase_samples << "\n"
     << "sample_stride = " << p.sample_stride << "\n"
     << "prop1_samples = " << c.validate.prop1_samples << "\n"
     << "prop1_correlation = " << num(c.validate.prop1_correlation) << "\n"
     << "cov_realizations = " << c.validate.cov_realizations << "\n"
     << "cov_dt = " << num(c.validate.cov_dt) << "\n"
     << "cov_box_L = " << num(c.validate.cov_box_L) << "\n"
     << "cov_grid_N = " << c.validate.cov_grid_N << "\n";
  return os.str();
}

}  // namespace wdl
