#include "wdl/harness.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wdl/errors.hpp"
#include "wdl/fbm.hpp"
#include "wdl/limit.hpp"
#include "wdl/parallel.hpp"
#include "wdl/quadrature.hpp"
#include "wdl/rng.hpp"
#include "wdl/stats.hpp"
#include "wdl/wigner.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::size_t step_count(double t, double dt) {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(t / dt)));
}

ScalingRegime regime_of(const ExperimentPlan& plan, double eps) { return {eps, plan.s, plan.s_c}; }

std::uint64_t medium_seed(const ExperimentPlan& plan, double eps, std::uint64_t realization) {
  // The ladder index is folded in so each epsilon sees fresh media.
  const auto rung = static_cast<std::uint64_t>(std::llround(eps * 1e9));
  return derive_seed(derive_seed(plan.seed, rung), realization);
}

}  // namespace

double TestPacket::operator()(double x, double k) const {
  const double a = (x - x_center) / x_width, b = (k - k_center) / k_width;
  return amplitude * std::exp(-0.5 * (a * a + b * b));
}

TestFamily TestFamily::standard(double radius) {
  TestFamily f;
  f.version_ = "tf16-v1";
  const double centres[4] = {-3.0, -1.0, 1.0, 3.0};
  std::vector<std::pair<double, double>> c;
  for (double x : centres) {
    for (double k : centres) c.emplace_back(x, k);
  }
  std::stable_sort(c.begin(), c.end(), [](const auto& a, const auto& b) {
    return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second;
  });
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double w = j % 2 == 0 ? 1.0 : 2.0;
    // ||g||^2 = A^2 pi w_x w_k
    const double amp = radius / std::sqrt(kPi * w * w);
    f.packets_.push_back({c[j].first, c[j].second, w, w, amp, std::ldexp(1.0, -static_cast<int>(j + 1))});
  }
  return f;
}

std::vector<double> TestFamily::pairings(const WignerGrid& w) const {
  const auto& g = w.grid;
  std::vector<double> out;
  out.reserve(packets_.size());
  for (const auto& p : packets_) {
    // Separable packet: precompute both factors.
    std::vector<double> gx(g.nx), gk(g.nk);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double a = (g.x(i) - p.x_center) / p.x_width;
      gx[i] = std::exp(-0.5 * a * a);
    }
    for (std::size_t j = 0; j < g.nk; ++j) {
      const double b = (g.k(j) - p.k_center) / p.k_width;
      gk[j] = std::exp(-0.5 * b * b);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (gx[i] < 1e-300) continue;
      double row = 0.0;
      for (std::size_t j = 0; j < g.nk; ++j) row += w.at(i, j) * gk[j];
      s += gx[i] * row;
    }
    out.push_back(p.amplitude * s * g.cell_area());
  }
  return out;
}

double weak_distance(const WignerGrid& a, const WignerGrid& b, const TestFamily& family) {
  if (!(a.grid == b.grid)) throw DomainError("weak_distance: grid mismatch");
  WignerGrid diff = a;
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.values[i];
  const auto p = family.pairings(diff);
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) d += family.packets()[j].weight * std::abs(p[j]);
  return d;
}

void ExperimentPlan::validate() const {
  params.validate();
  if (ladder.empty()) throw ConfigError("plan '" + name + "': empty epsilon ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0 && ladder[i] < 1.0)) throw ConfigError("plan '" + name + "': epsilon must lie in (0, 1)");
    if (i > 0 && !(ladder[i] < ladder[i - 1])) {
      throw ConfigError("plan '" + name + "': epsilon ladder must be strictly decreasing");
    }
  }
  if (!(dt > 0.0) || !(t1 > 0.0)) throw ConfigError("plan '" + name + "': need dt > 0 and t1 > 0");
  if (grid.d != 1 || params.d != 1) throw ConfigError("plan '" + name + "': experiments run in d = 1");
  if (realizations < 1) throw ConfigError("plan '" + name + "': need at least one realization");
  const auto ex = derived_exponents(params);
  std::ostringstream msg;
  msg.precision(12);
  switch (kind) {
    case PlanKind::kFracDiffusion: {
      const double lo = 1.0 / (1.0 + ex.theta);
      if (!(s > lo && s < 1.0)) {
        msg << "plan '" << name << "': fractional-diffusion limit needs 1/(1+theta) < s < 1, i.e. "
            << lo << " < s < 1, got s = " << s;
        throw ConfigError(msg.str());
      }
      const double sc = coherence_scale(s, ex.theta);
      if (!close(s_c, sc)) {
        msg << "plan '" << name << "': fractional-diffusion limit needs s_c = (1-s)/theta = " << sc
            << ", got " << s_c;
        throw ConfigError(msg.str());
      }
      break;
    }
    case PlanKind::kTransfer:
      if (!close(s, 1.0) || !close(s_c, 0.0) || !(params.gamma > 0.0)) {
        msg << "plan '" << name << "': transfer limit needs s = 1, s_c = 0 and gamma > 0, got s = " << s
            << ", s_c = " << s_c << ", gamma = " << params.gamma;
        throw ConfigError(msg.str());
      }
      break;
    case PlanKind::kPhase: {
      const double target = 1.0 / (2.0 * ex.kappa_gamma);
      if (!close(s, target, 1e-6)) {
        msg << "plan '" << name << "': phase limit needs s = 1/(2 kappa_gamma) = " << target << ", got " << s;
        throw ConfigError(msg.str());
      }
      if (phase_samples < 64 || phase_samples * realizations < 1024) {
        throw ConfigError("plan '" + name + "': phase runs need >= 64 samples per path and >= 1024 in total");
      }
      break;
    }
  }
}

double ExperimentPlan::limit_sigma() const { return jump_symbol_coefficient(params); }

ExperimentPlan plan_frac_default() {
  ExperimentPlan p;
  p.name = "frac_default";
  p.kind = PlanKind::kFracDiffusion;
  p.ladder = {0.3, 0.2, 0.1};
  p.s = 0.8;
  p.s_c = 0.4;
  p.t1 = 0.5;
  // Wide packet: the k-smearing of the initial Wigner function (~ eps^s_c / width) must
  // stay small against mu, or the limit datum itself drifts along the ladder.
  p.packet_width = 3.0;
  p.grid = {1, 2048, 40.0};
  p.dt = 0.0025;
  p.x_stride = 4;
  p.realizations = 16;
  p.mixture = MixtureRule::kLatticeQuadrature;
  p.seed = 20240601;
  return p;
}

ExperimentPlan plan_transfer_default() {
  ExperimentPlan p;
  p.name = "transfer_default";
  p.kind = PlanKind::kTransfer;
  p.ladder = {0.2, 0.14, 0.1};
  p.s = 1.0;
  p.s_c = 0.0;
  p.t1 = 0.25;
  p.grid = {1, 4096, 40.0};
  p.dt = 0.001;
  p.x_stride = 8;
  p.realizations = 8;
  p.mixture = MixtureRule::kLatticeQuadrature;
  p.seed = 20240602;
  return p;
}

ExperimentPlan plan_phase_default() {
  ExperimentPlan p;
  p.name = "phase_default";
  p.kind = PlanKind::kPhase;
  const auto ex = derived_exponents(p.params);
  p.s = 1.0 / (2.0 * ex.kappa_gamma);
  p.s_c = p.s;
  // Sample spacing ~ 20 eps^(s+gamma), the decorrelation time of the modes that carry
  // the fBm scaling; the packet is narrow so that its k = 0 component still sees them.
  p.ladder = {1e-4};
  p.grid = {1, 8192, 40.0};
  p.dt = 1e-4;
  p.phase_samples = 64;
  p.sample_stride = 92;
  p.t1 = p.dt * static_cast<double>(p.phase_samples * p.sample_stride);
  p.packet_width = 0.01;
  p.realizations = 64;
  p.mu = DirectionLaw::point(0.0);
  p.seed = 20240603;
  return p;
}

ExperimentPlan plan_by_name(const std::string& name) {
  if (name == "frac_default") return plan_frac_default();
  if (name == "transfer_default") return plan_transfer_default();
  if (name == "phase_default") return plan_phase_default();
  throw ConfigError("unknown plan '" + name + "' (frac_default, transfer_default, phase_default)");
}

DirectionSet direction_set(const ExperimentPlan& plan, double epsilon, std::uint64_t realization) {
  DirectionSet set;
  const auto& mu = plan.mu;
  if (mu.is_point()) {
    set.zeta = {mu.mean};
    set.weight = {1.0};
    return set;
  }
  if (plan.mixture == MixtureRule::kMonteCarlo) {
    const std::uint64_t seed = medium_seed(plan, epsilon, realization);
    for (std::size_t i = 0; i < plan.directions; ++i) {
      set.zeta.push_back(sample_direction(mu, 1, seed, i)[0]);
      set.weight.push_back(1.0 / static_cast<double>(plan.directions));
    }
    return set;
  }
  // Trapezoid on a sublattice of the carrier lattice 2 pi h / L.
  const double h = regime_of(plan, epsilon).correlation_scale();
  const double lattice = 2.0 * kPi * h / plan.grid.length;
  const double spacing = lattice * std::max(1.0, std::round(plan.quadrature_spacing / lattice));
  const double reach = mu.kind == DirectionLaw::Kind::kGaussian ? 7.0 * mu.scale : mu.scale;
  const double centre = std::round(mu.mean / spacing) * spacing;
  const auto m = static_cast<long>(std::ceil(reach / spacing));
  double total = 0.0;
  for (long i = -m; i <= m; ++i) {
    const double z = centre + static_cast<double>(i) * spacing;
    const double w = mu.density(z);
    if (w <= 0.0) continue;
    set.zeta.push_back(z);
    set.weight.push_back(w);
    total += w;
  }
  for (double& w : set.weight) w /= total;
  return set;
}

namespace {

WignerGrid mixture_at(const ExperimentPlan& plan, double epsilon, std::uint64_t realization, double t,
                      double* alias) {
  const auto regime = regime_of(plan, epsilon);
  const auto dirs = direction_set(plan, epsilon, realization);
  const GaussianPacket packet{{}, plan.packet_width};
  std::vector<WaveField> fields;
  fields.reserve(dirs.zeta.size());
  for (double z : dirs.zeta) fields.push_back(initial_condition(packet, std::span<const double>(&z, 1), regime, plan.grid));

  const std::size_t steps = t > 0.0 ? step_count(t, plan.dt) : 0;
  WignerAccumulator acc;
  WignerOptions opt;
  opt.x_stride = plan.x_stride;
  opt.alias_tolerance = 1.0;  // reported, not enforced, inside experiments
  double worst = 0.0;
  auto observe = [&](std::size_t, const std::vector<WaveField>& fs) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      worst = std::max(worst, alias_fraction(fs[i]));
      acc.add(wigner_transform(fs[i], opt), dirs.weight[i]);
    }
  };
  if (steps == 0) {
    observe(0, fields);
  } else {
    ModeSet modes = ModeSet::build(plan.params, plan.grid, regime.wave_scale(),
                                   medium_seed(plan, epsilon, realization));
    StochasticPotential potential(std::move(modes));
    Propagator prop(plan.grid, regime, plan.params, t / static_cast<double>(steps));
    prop.run(fields, potential, {steps}, observe);
  }
  if (alias) *alias = worst;
  return acc.mean();
}

}  // namespace

WignerGrid simulated_wigner(const ExperimentPlan& plan, double epsilon, std::uint64_t realization,
                            double* alias) {
  return mixture_at(plan, epsilon, realization, plan.t1, alias);
}

WignerGrid limit_wigner(const ExperimentPlan& plan, double epsilon) {
  const auto regime = regime_of(plan, epsilon);
  const GaussianPacket packet{{}, plan.packet_width};
  const auto w0 = initial_wigner(packet, plan.mu, regime, plan.grid, plan.x_stride);
  switch (plan.kind) {
    case PlanKind::kFracDiffusion:
      return frac_diffusion_evolve(w0, plan.limit_sigma(), plan.params.theta(), plan.t1);
    case PlanKind::kTransfer: {
      const auto& g = w0.grid;
      const double diameter = 2.0 * std::hypot(kPi / g.dk, kPi / g.dx);
      const double extent = std::max(4.0 * diameter, required_psi_extent(g, plan.t1));
      const PsiTable psi(JumpKernel(plan.params), extent, 4000, plan.jobs);
      return radiative_closed_form(w0, psi, plan.t1);
    }
    case PlanKind::kPhase:
      break;
  }
  throw ConfigError("plan '" + plan.name + "': phase plans have no phase-space limit");
}

ConvergenceReport decoherence_convergence(const ExperimentPlan& plan, const Progress& progress) {
  plan.validate();
  if (plan.kind == PlanKind::kPhase) {
    throw ConfigError("decoherence_convergence: plan '" + plan.name + "' targets the phase limit");
  }
  const auto family = TestFamily::standard();
  if (family.version() != plan.family) throw ConfigError("unknown test family '" + plan.family + "'");
  ConvergenceReport report;
  for (double eps : plan.ladder) {
    if (progress) progress("eps = " + std::to_string(eps) + ": limit model");
    ConvergenceRow row;
    row.epsilon = eps;
    const auto limit = limit_wigner(plan, eps);
    {
      // The t = 0 pairing gap of the mixed initial datum.
      auto w0 = mixture_at(plan, eps, 0, 0.0, nullptr);
      const GaussianPacket packet{{}, plan.packet_width};
      row.initial_gap = weak_distance(w0, initial_wigner(packet, plan.mu, regime_of(plan, eps), plan.grid, plan.x_stride), family);
    }
    row.distances.assign(plan.realizations, 0.0);
    std::vector<double> alias(plan.realizations, 0.0);
    parallel_for(plan.realizations, plan.jobs, [&](std::size_t r) {
      const auto w = simulated_wigner(plan, eps, r, &alias[r]);
      row.distances[r] = weak_distance(w, limit, family);
    });
    row.alias_fraction = *std::max_element(alias.begin(), alias.end());
    row.median = stats::median(row.distances);
    row.q25 = stats::quantile(row.distances, 0.25);
    row.q75 = stats::quantile(row.distances, 0.75);
    row.iqr = row.q75 - row.q25;
    if (progress) {
      std::ostringstream msg;
      msg << "eps = " << eps << ": median distance " << row.median << ", IQR " << row.iqr;
      progress(msg.str());
    }
    report.rows.push_back(std::move(row));
  }
  report.distances_decreasing = true;
  report.spread_shrinking = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    report.distances_decreasing = report.distances_decreasing && report.rows[i].median < report.rows[i - 1].median;
    report.spread_shrinking = report.spread_shrinking && report.rows[i].iqr < report.rows[i - 1].iqr;
  }
  return report;
}

std::vector<double> tracked_phase(const ExperimentPlan& plan, double epsilon, std::uint64_t realization,
                                  bool zero_potential, std::vector<double>* modulus, std::size_t* flags) {
  const auto regime = regime_of(plan, epsilon);
  const double z0 = plan.mu.is_point() ? plan.mu.mean : 0.0;
  const GaussianPacket packet{{}, plan.packet_width};
  std::vector<WaveField> fields{initial_condition(packet, std::span<const double>(&z0, 1), regime, plan.grid)};
  const double h = regime.correlation_scale();
  const double kappa = plan.track_k / h;
  const double prefactor = std::pow(epsilon, -(regime.s - regime.s_c));
  const double dispersion = 0.5 * plan.track_k * plan.track_k / std::pow(epsilon, regime.s - 2.0 * regime.s_c);
  const auto& g = plan.grid;
  std::vector<cplx> basis(g.n);
  for (std::size_t i = 0; i < g.n; ++i) basis[i] = std::polar(g.dx(), -kappa * g.coordinate(i));

  std::vector<std::size_t> marks;
  for (std::size_t i = 0; i <= plan.phase_samples; ++i) marks.push_back(i * plan.sample_stride);
  std::vector<double> phase;
  phase.reserve(marks.size());
  if (modulus) modulus->clear();
  std::size_t bad = 0;
  double prev = 0.0;
  auto observe = [&](std::size_t, const std::vector<WaveField>& fs) {
    const auto& f = fs.front();
    cplx z{};
    for (std::size_t i = 0; i < g.n; ++i) z += basis[i] * f.values[i];
    z *= prefactor * std::polar(1.0, dispersion * f.time);
    const double a = std::arg(z);
    if (phase.empty()) {
      phase.push_back(a);
    } else {
      double d = a - prev;
      d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
      if (std::abs(d) > 0.5 * kPi) ++bad;
      phase.push_back(phase.back() + d);
    }
    prev = a;
    if (modulus) modulus->push_back(std::abs(z));
  };
  Propagator prop(g, regime, plan.params, plan.dt);
  if (zero_potential) {
    ZeroPotential v;
    prop.run(fields, v, marks, observe);
  } else {
    StochasticPotential v(ModeSet::build(plan.params, g, regime.wave_scale(), medium_seed(plan, epsilon, realization)));
    prop.run(fields, v, marks, observe);
  }
  if (flags) *flags = bad;
  return phase;
}

PhaseReport phase_experiment(const ExperimentPlan& plan, const Progress& progress) {
  plan.validate();
  if (plan.kind != PlanKind::kPhase) throw ConfigError("phase_experiment: plan '" + plan.name + "' is not a phase plan");
  PhaseReport report;
  report.kappa0 = derived_exponents(plan.params).kappa0;
  for (double eps : plan.ladder) {
    const std::size_t n = plan.realizations;
    std::vector<std::vector<double>> phases(n), moduli(n);
    std::vector<std::size_t> flags(n, 0);
    parallel_for(n, plan.jobs, [&](std::size_t r) {
      phases[r] = tracked_phase(plan, eps, r, false, &moduli[r], &flags[r]);
    });
    PhaseRow row;
    row.epsilon = eps;
    const auto est = hurst_estimate(phases, 6, 200, plan.seed);
    row.kappa_hat = est.kappa;
    row.ci_low = est.ci_low;
    row.ci_high = est.ci_high;
    row.degenerate = est.degenerate;
    row.unwrap_flags = std::accumulate(flags.begin(), flags.end(), std::size_t{0});
    const std::size_t len = moduli.front().size();
    for (std::size_t i = 0; i < len; ++i) {
      double m = 0.0;
      for (std::size_t r = 0; r < n; ++r) m += moduli[r][i] / moduli[r][0];
      row.modulus_drift = std::max(row.modulus_drift, std::abs(m / static_cast<double>(n) - 1.0));
    }
    std::vector<double> final_phase;
    for (const auto& p : phases) final_phase.push_back(p.back() - p.front());
    if (n >= 8) {
      const double sd = std::sqrt(stats::variance(final_phase));
      const double mean = stats::mean(final_phase);
      row.ks_p_value = stats::ks_one_sample(final_phase, [&](double v) { return stats::normal_cdf(v, mean, sd); }).p_value;
    }
    const auto control = tracked_phase(plan, eps, 0, true);
    for (double v : control) row.control_phase = std::max(row.control_phase, std::abs(v - control.front()));
    if (progress) {
      std::ostringstream msg;
      msg << "eps = " << eps << ": kappa_hat " << row.kappa_hat << " [" << row.ci_low << ", "
          << row.ci_high << "], modulus drift " << row.modulus_drift;
      progress(msg.str());
    }
    report.rows.push_back(row);
  }
  return report;
}

namespace {

// (2pi)^{-1} int over the lattice cell of R0, independent of the ModeSet tables.
double expected_stationary_variance(const ModeSet& modes, std::size_t pair) {
  const auto& params = modes.params();
  const double h = modes.lattice_spacing();
  const auto p = modes.wavevector(2 * pair);
  if (modes.dimension() == 1) {
    auto f = [&](double q) { return spatial_spectrum(params, q); };
    const double c = std::abs(p[0]);
    return quad::gauss_kronrod(f, c - 0.5 * h, c + 0.5 * h, 1e-12).value / (2.0 * kPi);
  }
  auto inner = [&](double q0) {
    auto f = [&](double q1) { return spatial_spectrum(params, std::hypot(q0, q1)); };
    return quad::gauss_kronrod(f, p[1] - 0.5 * h, p[1] + 0.5 * h, 1e-10).value;
  };
  return quad::gauss_kronrod(inner, p[0] - 0.5 * h, p[0] + 0.5 * h, 1e-10).value / (4.0 * kPi * kPi);
}

}  // namespace

std::vector<SuiteVerdict> prop1_suite(const ModeSet& modes, const Prop1Config& config) {
  std::vector<SuiteVerdict> out;
  std::vector<std::size_t> pairs;
  for (std::size_t j : config.pairs) {
    if (j < modes.pair_count()) pairs.push_back(j);
  }
  for (std::size_t j : pairs) {
    ModeSet chain = modes.subset(std::span<const std::size_t>(&j, 1));
    const double g = chain.gap(0);
    const double h = -std::log(config.correlation) / g;
    const double expected_var = expected_stationary_variance(modes, j);
    std::vector<double> x, y;
    x.reserve(2 * config.samples);
    y.reserve(2 * config.samples);
    cplx prev = chain.states()[0];
    for (std::size_t n = 0; n < config.samples; ++n) {
      chain.advance(h);
      const cplx cur = chain.states()[0];
      x.push_back(prev.real());
      x.push_back(prev.imag());
      y.push_back(cur.real());
      y.push_back(cur.imag());
      prev = cur;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rss += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
    // per-component residual variance; the complex variance is twice that
    const double residual = 2.0 * rss / static_cast<double>(x.size() - 1);
    const double slope_ref = std::exp(-g * h);
    const double residual_ref = expected_var * -std::expm1(-2.0 * g * h);

    std::ostringstream tag;
    tag << "mode " << j << " |p|=" << chain.wavenumber_norm(0) << " h=" << h;
    out.push_back({"slope " + tag.str(), std::abs(slope / slope_ref - 1.0) <= config.slope_tol, slope,
                   slope_ref, config.slope_tol, "relative"});
    out.push_back({"residual " + tag.str(), std::abs(residual / residual_ref - 1.0) <= config.residual_tol,
                   residual, residual_ref, config.residual_tol, "relative"});
  }
  {
    // h = 0: the chain does not move.
    std::size_t j = pairs.empty() ? 0 : pairs.front();
    ModeSet chain = modes.subset(std::span<const std::size_t>(&j, 1));
    const cplx before = chain.states()[0];
    chain.advance(0.0);
    const cplx after = chain.states()[0];
    const double slope = before.real() != 0.0 ? after.real() / before.real() : 1.0;
    const double residual = std::norm(after - before);
    out.push_back({"slope h=0", std::abs(slope - 1.0) <= config.slope_tol, slope, 1.0, config.slope_tol, "relative"});
    out.push_back({"residual h=0", residual <= 1e-30, residual, 0.0, 1e-30, "absolute"});
  }
  return out;
}

CovarianceConfig default_covariance_config() {
  CovarianceConfig c;
  c.lags = {{0, {0}}, {0, {2}}, {0, {6}}, {1, {0}}, {2, {3}}};
  return c;
}

std::vector<SuiteVerdict> covariance_suite(const ModelParams& params, const Grid& grid,
                                           const CovarianceConfig& config, std::uint64_t seed) {
  if (config.realizations < 2) throw DomainError("covariance_suite: need >= 2 realizations");
  std::size_t series_len = 1;
  for (const auto& l : config.lags) series_len = std::max(series_len, l.time_steps + 1);
  CovarianceAccumulator acc(grid, config.lags);

  const ModeSet probe = ModeSet::build(params, grid, 1.0, seed);
  double p_lo = std::numeric_limits<double>::infinity(), p_hi = 0.0;
  for (std::size_t m = 0; m < probe.size(); m += 2) {
    p_lo = std::min(p_lo, probe.wavenumber_norm(m));
    p_hi = std::max(p_hi, probe.wavenumber_norm(m));
  }
  const double h = probe.lattice_spacing();

  std::vector<std::vector<double>> samples(config.realizations);
  parallel_for(config.realizations, config.jobs, [&](std::size_t r) {
    ModeSet modes = probe;
    modes.reseed(derive_seed(seed, r));
    std::vector<std::vector<double>> series(series_len);
    for (std::size_t s = 0; s < series_len; ++s) {
      if (s > 0) modes.advance(config.dt);
      series[s] = evaluate(modes);
    }
    samples[r] = acc.lag_means(series);
  });
  for (const auto& s : samples) acc.add_sample(s);
  const auto est = acc.estimates();

  std::vector<SuiteVerdict> out;
  for (std::size_t l = 0; l < config.lags.size(); ++l) {
    const auto& lag = config.lags[l];
    double x2 = 0.0;
    for (long v : lag.shift) x2 += static_cast<double>(v * v);
    const double x = std::sqrt(x2) * grid.dx();
    const double t = static_cast<double>(lag.time_steps) * config.dt;
    const double ref = band_covariance(params, t, x, p_lo - 0.5 * h, p_hi + 0.5 * h);
    const double z = (est[l].value - ref) / est[l].std_error;
    std::ostringstream name, detail;
    name << "covariance t=" << t << " x=" << x;
    detail << "estimate " << est[l].value << " +- " << est[l].std_error << ", z=" << z;
    out.push_back({name.str(), std::abs(z) <= config.sigma_tol, est[l].value, ref,
                   config.sigma_tol * est[l].std_error, detail.str()});
  }
  return out;
}

}  // namespace wdl
