// Acceptance criteria 1-11.  Each criterion prints one line "criterion N: PASS|FAIL ..."
// and the process exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "../../tools/app.hpp"
#include "wdl/brownian.hpp"
#include "wdl/field.hpp"
#include "wdl/harness.hpp"
#include "wdl/levy.hpp"
#include "wdl/limit.hpp"
#include "wdl/manifest.hpp"
#include "wdl/quadrature.hpp"
#include "wdl/schrodinger.hpp"
#include "wdl/spectrum.hpp"
#include "wdl/stats.hpp"
#include "wdl/wigner.hpp"

namespace {

using namespace wdl;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

WaveField packet(const Grid& g, const ScalingRegime& r, double z) {
  return initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
}

PhaseGrid centred_grid(std::size_t nx, double lx, std::size_t nk, double lk) {
  PhaseGrid g;
  g.nx = nx;
  g.dx = lx / static_cast<double>(nx);
  g.x0 = -0.5 * lx;
  g.x_period = lx;
  g.nk = nk;
  g.dk = lk / static_cast<double>(nk);
  g.k0 = -0.5 * lk;
  return g;
}

// 1: mass conservation of the split-step scheme under a random potential
Outcome unitarity() {
  const Grid g{1, 4096, 80.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  WaveField f = packet(g, r, 0.3);
  const double m0 = f.mass();
  StochasticPotential v(ModeSet::build(params, g, r.wave_scale(), 11));
  Propagator p(g, r, params, 1e-3);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    p.step(f, v);
    worst = std::max(worst, std::abs(f.mass() / m0 - 1.0));
  }
  return {worst <= 1e-10, fmt("max relative mass drift %.3e over 1000 steps (tol 1e-10)", worst)};
}

// 2: Ornstein-Uhlenbeck regression per tracked mode
Outcome prop1() {
  const Grid g{1, 512, 128.0};
  const ModeSet modes = ModeSet::build(ModelParams{}, g, 1.0, 2024);
  const auto verdicts = prop1_suite(modes, Prop1Config{});
  std::size_t bad = 0;
  double worst_slope = 0.0, worst_res = 0.0;
  for (const auto& v : verdicts) {
    if (!v.pass) ++bad;
    if (v.detail != "relative") continue;
    const double rel = std::abs(v.observed / v.expected - 1.0);
    if (v.name.find("slope") != std::string::npos) {
      worst_slope = std::max(worst_slope, rel);
    } else {
      worst_res = std::max(worst_res, rel);
    }
  }
  return {bad == 0 && !verdicts.empty(),
          fmt("%zu checks, %zu failed; worst slope error %.4f (tol 0.01), worst residual error %.4f (tol 0.02)",
              verdicts.size(), bad, worst_slope, worst_res)};
}

// 3: ensemble covariance against the band-limited oracle
Outcome covariance() {
  const Grid g{1, 512, 128.0};
  const auto verdicts = covariance_suite(ModelParams{}, g, default_covariance_config(), 77);
  std::size_t bad = 0;
  double worst = 0.0;
  for (const auto& v : verdicts) {
    if (!v.pass) ++bad;
    if (v.tolerance > 0.0) worst = std::max(worst, std::abs(v.observed - v.expected) / (v.tolerance / 3.0));
  }
  return {bad == 0 && verdicts.size() == 5,
          fmt("%zu lags, %zu outside 3 SE; worst |z| = %.2f", verdicts.size(), bad, worst)};
}

// 4: k-marginal and L2 norm along propagation, exact free-flow shift
Outcome wigner_identities() {
  const Grid g{1, 1024, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  WaveField f = packet(g, r, 0.4);
  StochasticPotential v(ModeSet::build(params, g, r.wave_scale(), 3));
  Propagator p(g, r, params, 0.004);
  const double n0 = l2_norm(wigner_transform(f));
  double marg_err = 0.0, norm_err = 0.0;
  for (int snap = 0; snap <= 5; ++snap) {
    if (snap > 0) {
      for (int i = 0; i < 25; ++i) p.step(f, v);
    }
    const auto w = wigner_transform(f);
    const auto marg = k_marginal(w);
    double scale = 0.0;
    for (const auto& c : f.values) scale = std::max(scale, std::norm(c));
    for (std::size_t i = 0; i < g.n; ++i) marg_err = std::max(marg_err, std::abs(marg[i] - std::norm(f.values[i])) / scale);
    norm_err = std::max(norm_err, std::abs(l2_norm(w) / n0 - 1.0));
  }

  const Grid gs{1, 512, 40.0};
  const WaveField f0 = packet(gs, r, 0.3);
  const auto w0 = wigner_transform(f0);
  const double speed = std::pow(r.epsilon, r.s_c);
  const double t = gs.dx() / (speed * w0.grid.dk);
  WaveField ff = f0;
  Propagator(gs, r, ModelParams{}, 0.01).free_flow(ff, t);
  const auto w = wigner_transform(ff);
  const auto n = static_cast<long>(gs.n);
  double shift_err = 0.0;
  for (std::size_t j = 0; j < w.grid.nk; ++j) {
    const long shift = static_cast<long>(j) - n / 2;
    for (std::size_t i = 0; i < w.grid.nx; ++i) {
      const long src = ((static_cast<long>(i) - shift) % n + n) % n;
      shift_err = std::max(shift_err, std::abs(w.at(i, j) - w0.at(static_cast<std::size_t>(src), j)));
    }
  }
  shift_err /= max_abs(w0.values);
  const bool ok = marg_err <= 1e-8 && norm_err <= 1e-8 && shift_err <= 1e-10;
  return {ok, fmt("marginal %.2e, norm %.2e (tol 1e-8) at 6 snapshots; free-flow shift %.2e", marg_err, norm_err,
                  shift_err)};
}

// 5: sigma(theta) two ways, and the large-q ratio of Psi
Outcome coefficients() {
  ModelParams p;  // d = 1, theta = 0.5, a(0) = 1
  const double target = 1.0 / std::sqrt(kPi);
  const double closed = sigma_theta(p);
  const double th = p.theta();
  const double quad = 2.0 * p.envelope.at_origin() * th * std::tgamma(1.0 - th) / (2.0 * kPi) *
                      sphere_moment_quadrature(p.d, th);
  const bool a = std::abs(closed - target) <= 1e-10 && std::abs(quad - target) <= 1e-10;
  const JumpKernel kernel(p);
  const double ratio = kernel.exponent(100.0) / (-closed * std::pow(100.0, th));
  const bool b = ratio >= 0.98 && ratio <= 1.02;
  return {a && b, fmt("(a) %s: closed %.15f, quadrature %.15f, 1/sqrt(pi) %.15f; (b) %s: Psi(100)/(-sigma 100^theta) = %.4f "
                      "(band [0.98, 1.02])",
                      a ? "pass" : "fail", closed, quad, target, b ? "pass" : "fail", ratio)};
}

// 6: Levy Monte Carlo against the closed-form radiative transfer solution
Outcome levy_cross() {
  const ModelParams params;
  const JumpKernel kernel(params);
  const double t = 0.5;
  const double width = 1.5;
  auto w0f = [width](double x, double k) { return std::exp(-0.5 * (x * x + k * k) / (width * width)); };
  const auto g = centred_grid(128, 40.0, 256, 40.0);
  auto w0 = WignerGrid::zeros(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) w0.at(i, j) = w0f(g.x(i), g.k(j));
  }
  const double diameter = 2.0 * std::hypot(kPi / g.dk, kPi / g.dx);
  const PsiTable psi(kernel, std::max(4.0 * diameter, required_psi_extent(g, t)), 20000);
  const auto exact = radiative_closed_form(w0, psi, t);

  // probes on grid nodes: x in {-1.25, 0, 1.25}, k in {-0.625, 0, 0.625, 1.25}
  std::vector<ProbePoint> probes;
  std::vector<double> reference;
  for (int di : {-4, 0, 4}) {
    for (int dj : {-4, 0, 4, 8}) {
      const auto i = static_cast<std::size_t>(64 + di), j = static_cast<std::size_t>(128 + dj);
      probes.push_back({g.x(i), g.k(j)});
      reference.push_back(exact.at(i, j));
    }
  }
  const double grad = std::exp(-0.5) / width;
  const LevySampler sampler(kernel, 1e-8);
  const auto mc = levy_mc_solution(w0f, sampler, t, probes, 100000, 606, 1, grad, grad);
  double worst = 0.0, min_se = 1e300;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto& e = mc.estimates[i];
    const double z = std::abs(e.value - reference[i]) / e.std_error;
    worst = std::max(worst, z);
    min_se = std::min(min_se, e.std_error);
    if (z > 3.0) ++bad;
  }
  const bool bias_ok = mc.bias_bound < min_se / 3.0;
  return {bad == 0 && bias_ok,
          fmt("%zu/12 probes outside 3 SE, worst |z| = %.2f; delta-bias bound %.2e vs SE/3 %.2e; rate %.1f", bad, worst,
              mc.bias_bound, min_se / 3.0, mc.rate)};
}

// 7: mean of the stochastic Wigner limit against fractional diffusion
Outcome bridge() {
  const ModelParams p;
  const double t = 0.5;
  const auto nodes = brownian_nodes(p.theta());
  PhaseGrid g;
  g.nx = 16;
  g.dx = 0.5;
  g.x0 = -4.0;
  g.nk = 256;
  g.dk = 0.1;
  g.k0 = -12.8;
  auto w0 = WignerGrid::zeros(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) w0.at(i, j) = std::exp(-0.5 * g.x(i) * g.x(i) - g.k(j) * g.k(j));
  }
  const double sigma = jump_symbol_coefficient(p);
  const auto ref = frac_diffusion_evolve(w0, sigma, p.theta(), t);
  const double gc = brownian_coupling(p, sigma);
  const std::vector<std::size_t> rows{4, 8, 11};
  const std::vector<std::size_t> cols{98, 118, 128, 133, 148};
  const double times[] = {t};
  std::vector<stats::RunningStats> acc(rows.size() * cols.size());
  double norm_err = 0.0;
  std::vector<double> n0(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < g.nk; ++j) n0[r] += w0.at(rows[r], j) * w0.at(rows[r], j);
    n0[r] = std::sqrt(n0[r] * g.dk);
  }
  const std::size_t n_real = 1000;
  for (std::size_t k = 0; k < n_real; ++k) {
    const auto path = brownian_field_sample(p, nodes, times, 707, k);
    std::vector<double> norms;
    const auto w = stochastic_wigner_sample(w0, path, 0, gc, rows, &norms);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      norm_err = std::max(norm_err, std::abs(norms[r] / n0[r] - 1.0));
      for (std::size_t c = 0; c < cols.size(); ++c) acc[r * cols.size() + c].add(w.at(rows[r], cols[c]));
    }
  }
  double worst = 0.0;
  std::size_t bad = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto& s = acc[r * cols.size() + c];
      const double z = std::abs(s.mean() - ref.at(rows[r], cols[c])) / s.std_error();
      worst = std::max(worst, z);
      if (z > 3.0) ++bad;
    }
  }
  return {bad == 0 && norm_err <= 1e-10,
          fmt("%zu/%zu probes outside 3 SE, worst |z| = %.2f; max row-norm drift %.2e (tol 1e-10)", bad, acc.size(), worst,
              norm_err)};
}

// 8: Hurst index of the tracked phase at s = 1/(2 kappa_gamma)
Outcome phase() {
  const auto plan = plan_phase_default();
  const auto rep = phase_experiment(plan);
  const auto& row = rep.rows.back();
  const bool ok = !row.degenerate && std::abs(row.kappa_hat - rep.kappa0) <= 0.07 && row.modulus_drift < 0.10;
  return {ok, fmt("eps %.3g: kappa_hat %.4f (CI %.3f..%.3f) vs kappa0 %.2f (tol 0.07); modulus drift %.4f (tol 0.10); "
                  "%zu unwrap flags",
                  row.epsilon, row.kappa_hat, row.ci_low, row.ci_high, rep.kappa0, row.modulus_drift, row.unwrap_flags)};
}

// 9: weak distance to the fractional-diffusion limit along the epsilon ladder
Outcome decoherence() {
  const auto plan = plan_frac_default();
  const auto rep = decoherence_convergence(plan);
  std::string rows;
  for (const auto& r : rep.rows) rows += fmt(" [eps %.2f median %.5f iqr %.5f]", r.epsilon, r.median, r.iqr);
  return {rep.distances_decreasing && rep.spread_shrinking,
          fmt("decreasing %s, spread shrinking %s;", rep.distances_decreasing ? "yes" : "no",
              rep.spread_shrinking ? "yes" : "no") +
              rows};
}

// 10: smoothing by the long-range kernel, high-frequency floor of a capped control
Outcome regularity() {
  const auto g = centred_grid(64, 20.0, 256, 20.0);
  auto w0 = WignerGrid::zeros(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) w0.at(i, j) = (std::abs(g.x(i)) < 3.0 && std::abs(g.k(j)) < 2.0) ? 1.0 : 0.0;
  }
  const double times[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  const double cut = 20.0;
  const PsiTable psi(JumpKernel(ModelParams{}), 4.0 * required_psi_extent(g, 1.0));
  const auto rows = regularity_probe(w0, psi, times, cut);
  bool decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) decreasing = decreasing && rows[i].seminorms[4] < rows[i - 1].seminorms[4];

  const JumpKernel capped(ModelParams{}, 5.0);
  const PsiTable cpsi(capped, 4.0 * required_psi_extent(g, 1.0));
  const auto crows = regularity_probe(w0, cpsi, times, cut);
  const double lambda = capped.rate_beyond(0.0);
  double margin = 1e300;
  for (const auto& r : crows) margin = std::min(margin, r.tail_norm / (std::exp(-r.t * lambda) * r.transport_tail_norm));
  const bool floor = margin >= 1.0;
  return {decreasing && floor,
          fmt("H4 seminorm %.3e -> %.3e (%s); capped tail / floor min ratio %.4f (need >= 1), Lambda %.3f",
              rows.front().seminorms[4], rows.back().seminorms[4], decreasing ? "decreasing" : "NOT decreasing", margin,
              lambda)};
}

// 11: every subcommand replayed from its manifest with another worker count
Outcome reproducibility() {
  const auto dir = fs::temp_directory_path() / "wdl_acceptance_11";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = (dir / "small.ini").string();
  std::ofstream(cfg) << "[model]\ngamma = 0.25\n\n[solver]\nT = 0.1\nsnapshots = 2\ngrid_N = 256\nepsilon = 0.3\n\n"
                        "[experiment]\nplan = frac_default\nladder = 0.3, 0.25\nrealizations = 3\ngrid_N = 256\n"
                        "t1 = 0.05\nprop1_samples = 5000\ncov_realizations = 40\ncov_grid_N = 64\ncov_box_L = 32\n";
  struct Case {
    std::string name;
    std::vector<std::string> args;
  };
  const std::vector<Case> cases{
      {"synthesize", {"synthesize"}},
      {"propagate", {"propagate"}},
      {"wigner", {"wigner", "--slice", "0"}},
      {"limit_frac", {"limit", "--model", "frac"}},
      {"limit_transfer", {"limit", "--model", "transfer"}},
      {"sample_direction", {"sample", "--model", "direction", "--count", "500"}},
      {"sample_fbm", {"sample", "--model", "fbm", "--count", "512"}},
      {"sample_levy", {"sample", "--model", "levy", "--count", "300"}},
      {"experiment", {"experiment"}},
      {"validate", {"validate"}},
  };
  std::size_t bad = 0;
  std::string failed;
  for (const auto& c : cases) {
    auto args = c.args;
    args.insert(args.end(), {"--config", cfg, "--seed", "9", "--jobs", "1", "--out"});
    args.push_back((dir / c.name / "a").string());
    std::ostringstream o, e;
    const int first = app::run(args, o, e);
    const auto manifest = dir / c.name / "a" / "manifest.json";
    bool ok = (first == app::kExitOk || first == app::kExitChecksFailed) && fs::exists(manifest);
    for (const char* jobs : {"3", "2"}) {
      if (!ok) break;
      std::ostringstream o2, e2;
      const int again = app::run({"replay", "--manifest", manifest.string(), "--out",
                                  (dir / c.name / (std::string("jobs") + jobs)).string(), "--jobs", jobs},
                                 o2, e2);
      ok = again == first;
    }
    if (ok) {
      const auto m = RunManifest::read(manifest);
      ok = !m.outputs.empty();
    }
    if (!ok) {
      ++bad;
      failed += " " + c.name;
    }
  }
  return {bad == 0, fmt("%zu subcommand runs replayed under jobs 3 and 2, %zu mismatched", cases.size(), bad) + failed};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>>& registry() {
  static const std::map<int, std::pair<const char*, std::function<Outcome()>>> r{
      {1, {"unitarity", unitarity}},
      {2, {"OU mode regression", prop1}},
      {3, {"covariance oracle", covariance}},
      {4, {"Wigner identities", wigner_identities}},
      {5, {"coefficient oracles", coefficients}},
      {6, {"Levy MC vs closed form", levy_cross}},
      {7, {"stochastic limit vs fractional diffusion", bridge}},
      {8, {"phase Hurst index", phase}},
      {9, {"decoherence trend", decoherence}},
      {10, {"regularization probe", regularity}},
      {11, {"reproducibility", reproducibility}},
  };
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::stoi(argv[++i]));
    } else if (a == "--all") {
      for (const auto& [n, _] : registry()) selected.push_back(n);
    } else {
      std::cerr << "usage: wdl_acceptance --criterion N [--criterion M ...] | --all\n";
      return 2;
    }
  }
  if (selected.empty()) {
    std::cerr << "usage: wdl_acceptance --criterion N [--criterion M ...] | --all\n";
    return 2;
  }
  int failures = 0;
  for (int n : selected) {
    const auto it = registry().find(n);
    if (it == registry().end()) {
      std::cerr << "unknown criterion " << n << "\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << it->second.first << ": " << o.detail
              << "  (" << fmt("%.1f", secs) << " s)\n"
              << std::flush;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
