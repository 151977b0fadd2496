#include "wdl/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "wdl/errors.hpp"
#include "wdl/rng.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> fft_shape(const Grid& g) { return std::vector<int>(g.d, static_cast<int>(g.n)); }

std::vector<double> grid_k2(const Grid& g) {
  std::vector<double> k2(g.size(), 0.0);
  for (std::size_t idx = 0; idx < k2.size(); ++idx) {
    std::size_t rem = idx;
    double s = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double k = g.wavenumber(rem % g.n);
      s += k * k;
      rem /= g.n;
    }
    k2[idx] = s;
  }
  return k2;
}

void point_coords(const Grid& g, std::size_t idx, std::vector<double>& x) {
  x.resize(g.d);
  // Last axis varies fastest (row-major).
  for (int a = g.d - 1; a >= 0; --a) {
    x[a] = g.coordinate(idx % g.n);
    idx /= g.n;
  }
}

std::size_t next_pow2(std::size_t v) {
  std::size_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

double WaveField::mass() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * grid.cell_volume();
}

double WaveField::l2_norm() const { return std::sqrt(mass()); }

cplx GaussianPacket::operator()(std::span<const double> x) const {
  const int d = static_cast<int>(x.size());
  double r2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double c = center.empty() ? 0.0 : center[i];
    r2 += (x[i] - c) * (x[i] - c);
  }
  return std::pow(kPi * width * width, -0.25 * d) * std::exp(-0.5 * r2 / (width * width));
}

double DirectionLaw::density(double z) const {
  switch (kind) {
    case Kind::kGaussian:
      return std::exp(-0.5 * (z - mean) * (z - mean) / (scale * scale)) /
             (scale * std::sqrt(2.0 * kPi));
    case Kind::kUniform:
      return std::abs(z - mean) <= scale ? 0.5 / scale : 0.0;
    case Kind::kPoint:
      break;
  }
  throw DomainError("point-mass direction law has no density");
}

double DirectionLaw::cdf(double z) const {
  switch (kind) {
    case Kind::kGaussian:
      return 0.5 * std::erfc(-(z - mean) / (scale * std::sqrt(2.0)));
    case Kind::kUniform:
      return std::clamp((z - mean + scale) / (2.0 * scale), 0.0, 1.0);
    case Kind::kPoint:
      return z >= mean ? 1.0 : 0.0;
  }
  return 0.0;
}

cplx DirectionLaw::characteristic(double y) const {
  const cplx carrier = std::polar(1.0, y * mean);
  switch (kind) {
    case Kind::kGaussian:
      return carrier * std::exp(-0.5 * scale * scale * y * y);
    case Kind::kUniform: {
      const double z = scale * y;
      return carrier * (std::abs(z) < 1e-8 ? 1.0 - z * z / 6.0 : std::sin(z) / z);
    }
    case Kind::kPoint:
      break;
  }
  return carrier;
}

std::string DirectionLaw::name() const {
  switch (kind) {
    case Kind::kGaussian: return "gaussian";
    case Kind::kUniform: return "uniform";
    case Kind::kPoint: return "point";
  }
  return "?";
}

std::vector<double> sample_direction(const DirectionLaw& mu, int d, std::uint64_t seed,
                                     std::uint64_t index) {
  if (d < 1 || d > 2) throw DomainError("sample_direction: d must be 1 or 2");
  std::vector<double> z(d, mu.mean);
  if (mu.is_point()) return z;
  CounterRng rng(seed, stream_id(StreamTag::kDirection), index);
  if (mu.kind == DirectionLaw::Kind::kGaussian) {
    const auto g = rng.normal_pair();
    for (int i = 0; i < d; ++i) z[i] += mu.scale * g[i];
  } else {
    for (int i = 0; i < d; ++i) z[i] += mu.scale * (2.0 * rng.uniform() - 1.0);
  }
  return z;
}

WaveField initial_condition(const InitialEnvelope& phi0, std::span<const double> zeta,
                            const ScalingRegime& regime, const Grid& grid,
                            InitialConditionReport* report) {
  regime.validate();
  if (static_cast<int>(zeta.size()) != grid.d) {
    throw DomainError("initial_condition: zeta dimension does not match grid");
  }
  const double h = regime.correlation_scale();
  const double spacing = 2.0 * kPi / grid.length;
  InitialConditionReport rep;
  for (int a = 0; a < grid.d; ++a) {
    const double kappa = zeta[a] / h;
    const double m = std::round(kappa / spacing);
    if (std::abs(m) >= 0.5 * static_cast<double>(grid.n)) {
      const auto need = next_pow2(static_cast<std::size_t>(2.0 * std::abs(m)) + 2);
      throw DomainError("initial_condition: carrier wavenumber " + std::to_string(kappa) +
                        " exceeds the grid Nyquist limit; need grid_N >= " +
                        std::to_string(need));
    }
    rep.requested.push_back(kappa);
    rep.applied.push_back(m * spacing);
  }

  WaveField f;
  f.grid = grid;
  f.regime = regime;
  f.values.resize(grid.size());
  std::vector<double> x;
  for (std::size_t idx = 0; idx < f.values.size(); ++idx) {
    point_coords(grid, idx, x);
    double phase = 0.0;
    for (int a = 0; a < grid.d; ++a) phase += rep.applied[a] * x[a];
    f.values[idx] = phi0(x) * std::polar(1.0, phase);
  }
  if (report) *report = std::move(rep);
  return f;
}

void ZeroPotential::sample(double, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
}

void StochasticPotential::sample(double micro_time, std::vector<double>& out) {
  const double lag = micro_time - modes_.time();
  if (lag < -1e-12 * std::max(1.0, std::abs(micro_time))) {
    throw DomainError("StochasticPotential: time must be non-decreasing");
  }
  if (lag > 0.0) modes_.advance(lag);
  evaluate(modes_, out);
}

void FunctionPotential::sample(double micro_time, std::vector<double>& out) {
  out.resize(grid_.size());
  std::vector<double> x;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    point_coords(grid_, idx, x);
    for (double& xi : x) xi /= wave_scale_;
    out[idx] = fn_(micro_time, x);
  }
}

Propagator::Propagator(const Grid& grid, const ScalingRegime& regime, const ModelParams& params,
                       double dt)
    : grid_(grid), regime_(regime), dt_(dt) {
  if (!(dt > 0.0)) throw DomainError("Propagator: dt must be positive");
  regime.validate();
  const double eps = regime.epsilon;
  coupling_ = std::pow(eps, 0.5 * (1.0 - params.gamma) - regime.s);
  time_unit_ = std::pow(eps, regime.s + params.gamma);
  k2_ = grid_k2(grid);
  const double ws = regime.wave_scale();
  const double inv_n = 1.0 / static_cast<double>(grid.size());
  half_.resize(k2_.size());
  full_.resize(k2_.size());
  double kmax = 0.0;
  for (std::size_t i = 0; i < k2_.size(); ++i) {
    half_[i] = std::polar(inv_n, -0.25 * ws * k2_[i] * dt);
    full_[i] = std::polar(inv_n, -0.5 * ws * k2_[i] * dt);
    kmax = std::max(kmax, k2_[i]);
  }
  diag_.max_kinetic_phase = 0.5 * ws * kmax * dt;
  v_.resize(grid.size());
}

void Propagator::kinetic(std::vector<cplx>& v, const std::vector<cplx>& multiplier) {
  const auto shape = fft_shape(grid_);
  cached_plan(shape, FftDirection::kForward).execute(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= multiplier[i];
  cached_plan(shape, FftDirection::kBackward).execute(v);
}

void Propagator::sample_potential(PotentialSource& potential, double t_mid) {
  potential.sample(t_mid / time_unit_, v_);
  if (v_.size() != grid_.size()) throw DomainError("potential does not match the grid");
  double worst = 0.0;
  for (double v : v_) worst = std::max(worst, std::abs(coupling_ * v * dt_));
  diag_.max_potential_phase = std::max(diag_.max_potential_phase, worst);
  if (worst > 0.25 * kPi) ++diag_.phase_warnings;
  ++diag_.steps;
}

void Propagator::apply_potential(WaveField& field) {
  for (std::size_t i = 0; i < v_.size(); ++i) field.values[i] *= std::polar(1.0, -coupling_ * v_[i] * dt_);
}

void Propagator::step(WaveField& field, PotentialSource& potential) {
  if (!(field.grid == grid_)) throw DomainError("Propagator: field grid mismatch");
  kinetic(field.values, half_);
  sample_potential(potential, field.time + 0.5 * dt_);
  apply_potential(field);
  kinetic(field.values, half_);
  field.time += dt_;
}

void Propagator::run(std::vector<WaveField>& fields, PotentialSource& potential,
                     std::vector<std::size_t> marks, const Observer& observe) {
  if (fields.empty()) return;
  const double t0 = fields.front().time;
  for (const auto& f : fields) {
    if (!(f.grid == grid_)) throw DomainError("Propagator: field grid mismatch");
    if (std::abs(f.time - t0) > 1e-12 * std::max(1.0, std::abs(t0))) {
      throw DomainError("Propagator::run: fields must share the current time");
    }
  }
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::size_t next = 0;
  if (!marks.empty() && marks[0] == 0) {
    observe(0, fields);
    ++next;
  }
  const std::size_t total = marks.empty() ? 0 : marks.back();
  bool kicked = false;
  for (std::size_t n = 0; n < total; ++n) {
    if (!kicked) {
      for (auto& f : fields) kinetic(f.values, half_);
    }
    sample_potential(potential, t0 + (static_cast<double>(n) + 0.5) * dt_);
    const bool record = marks[next] == n + 1;
    kicked = !record && n + 1 != total;
    for (auto& f : fields) {
      apply_potential(f);
      kinetic(f.values, kicked ? full_ : half_);
      f.time = t0 + static_cast<double>(n + 1) * dt_;
    }
    if (record) {
      observe(n + 1, fields);
      ++next;
    }
  }
}

std::vector<WaveField> Propagator::propagate(WaveField field, PotentialSource& potential,
                                             const std::vector<double>& snapshots) {
  const double t0 = field.time;
  std::vector<std::size_t> marks;
  for (double t : snapshots) {
    if (t < t0 - 1e-12) throw DomainError("propagate: snapshot before the initial time");
    marks.push_back(static_cast<std::size_t>(std::llround((t - t0) / dt_)));
  }
  std::sort(marks.begin(), marks.end());
  std::vector<WaveField> out;
  std::vector<WaveField> fields{std::move(field)};
  run(fields, potential, marks, [&](std::size_t step, const std::vector<WaveField>& f) {
    const auto copies = std::count(marks.begin(), marks.end(), step);
    for (long c = 0; c < copies; ++c) out.push_back(f.front());
  });
  return out;
}

void Propagator::free_flow(WaveField& field, double t) const {
  const double ws = regime_.wave_scale();
  const double inv_n = 1.0 / static_cast<double>(grid_.size());
  const auto shape = fft_shape(grid_);
  cached_plan(shape, FftDirection::kForward).execute(field.values);
  for (std::size_t i = 0; i < k2_.size(); ++i) {
    field.values[i] *= std::polar(inv_n, -0.5 * ws * k2_[i] * t);
  }
  cached_plan(shape, FftDirection::kBackward).execute(field.values);
  field.time += t;
}

std::vector<WaveField> propagate(const WaveField& field, PotentialSource& potential,
                                 const ModelParams& params, const SolverConfig& config,
                                 StepDiagnostics* diagnostics) {
  Propagator prop(field.grid, field.regime, params, config.dt);
  std::vector<WaveField> out;
  if (config.fuse_kinetic) {
    out = prop.propagate(field, potential, config.snapshots);
  } else {
    std::vector<double> times = config.snapshots;
    std::sort(times.begin(), times.end());
    WaveField f = field;
    std::size_t n = 0;
    for (double t : times) {
      const auto mark = static_cast<std::size_t>(std::llround((t - field.time) / config.dt));
      for (; n < mark; ++n) prop.step(f, potential);
      out.push_back(f);
    }
  }
  if (diagnostics) *diagnostics = prop.diagnostics();
  return out;
}

double suggest_dt(const WaveField& field, const ModelParams& params, double max_abs_potential,
                  double tail) {
  const auto& g = field.grid;
  std::vector<cplx> spec = field.values;
  cached_plan(fft_shape(g), FftDirection::kForward).execute(spec);
  const auto k2 = grid_k2(g);
  std::vector<std::size_t> order(k2.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return k2[a] > k2[b]; });
  double total = 0.0;
  for (const auto& v : spec) total += std::norm(v);
  double acc = 0.0, k2_eff = 0.0;
  for (std::size_t i : order) {
    acc += std::norm(spec[i]);
    if (acc > tail * total) {
      k2_eff = k2[i];
      break;
    }
  }
  const double eps = field.regime.epsilon;
  double dt = std::numeric_limits<double>::infinity();
  const double ws = field.regime.wave_scale();
  if (k2_eff > 0.0) dt = std::min(dt, 0.25 * kPi / (ws * k2_eff));
  const double coupling = std::pow(eps, 0.5 * (1.0 - params.gamma) - field.regime.s);
  if (max_abs_potential > 0.0) dt = std::min(dt, 0.125 * kPi / (coupling * max_abs_potential));
  if (!std::isfinite(dt)) throw DomainError("suggest_dt: no time scale in the problem");
  return dt;
}

double inner_mass_fraction(const WaveField& field) {
  const auto& g = field.grid;
  double inner = 0.0, total = 0.0;
  std::vector<double> x;
  for (std::size_t idx = 0; idx < field.values.size(); ++idx) {
    point_coords(g, idx, x);
    const double m = std::norm(field.values[idx]);
    total += m;
    bool in = true;
    for (double xi : x) in = in && std::abs(xi) < 0.25 * g.length;
    if (in) inner += m;
  }
  return total > 0.0 ? inner / total : 0.0;
}

}  // namespace wdl
