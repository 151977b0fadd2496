#include "wdl/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wdl/errors.hpp"
#include "wdl/quadrature.hpp"
#include "wdl/rng.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre 8-point nodes/weights on [-1, 1].
constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

// (2pi)^{-d} int over the lattice cell centred at p of R0.
double cell_variance(const ModelParams& params, std::span<const double> p, double h) {
  const int d = static_cast<int>(p.size());
  if (d == 1) {
    auto f = [&](double q) { return spatial_spectrum(params, q); };
    const double c = std::abs(p[0]);
    const auto res = quad::gauss_kronrod(f, c - 0.5 * h, c + 0.5 * h, 1e-13, 15);
    return res.value / (2.0 * kPi);
  }
  if (d == 2) {
    double sum = 0.0;
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) {
        const double q0 = p[0] + 0.5 * h * kGlX[a];
        const double q1 = p[1] + 0.5 * h * kGlX[b];
        sum += kGlW[a] * kGlW[b] * spatial_spectrum(params, std::hypot(q0, q1));
      }
    }
    return sum * 0.25 * h * h / (4.0 * kPi * kPi);
  }
  double norm = 0.0;
  for (double x : p) norm += x * x;
  return spatial_spectrum(params, std::sqrt(norm)) * std::pow(h, d) / std::pow(2.0 * kPi, d);
}

std::uint64_t pack_id(std::span<const long> m) {
  std::uint64_t id = 0;
  for (long v : m) id = id * 0x100000001B3ull + static_cast<std::uint64_t>(v + (1l << 30));
  return id;
}

}  // namespace

double SpectralNodes::norm(std::size_t j) const {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += wavevectors[j * d + i] * wavevectors[j * d + i];
  return std::sqrt(s);
}

ModeSet ModeSet::build(const ModelParams& params, const Grid& grid, double wavenumber_scale,
                       std::uint64_t seed) {
  const double h = wavenumber_scale * 2.0 * kPi / grid.length;
  double p_max = wavenumber_scale * grid.nyquist();
  if (params.envelope.decays()) p_max = std::min(p_max, params.envelope.support_radius(1e-16));
  return build(params, grid, wavenumber_scale, h, p_max, seed);
}

ModeSet ModeSet::build(const ModelParams& params, const Grid& grid, double wavenumber_scale,
                       double p_min, double p_max, std::uint64_t seed) {
  params.validate();
  if (!(p_min > 0.0)) throw DomainError("build_mode_set: p_min must be positive (spectral pole at 0)");
  if (!(p_max > p_min)) throw DomainError("build_mode_set: need p_min < p_max");
  if (!(wavenumber_scale > 0.0)) throw DomainError("build_mode_set: wavenumber scale must be positive");
  if (grid.d != params.d) throw DomainError("build_mode_set: grid and model dimension differ");
  if (grid.d < 1 || grid.d > 2) throw DomainError("build_mode_set: d = 1 or 2 supported");

  ModeSet ms;
  ms.params_ = params;
  ms.grid_ = grid;
  ms.scale_ = wavenumber_scale;
  ms.seed_ = seed;
  const double h = ms.lattice_spacing();
  ms.weight_ = std::pow(h, grid.d);

  const long half = static_cast<long>(grid.n) / 2;
  // all |m_i| < n/2 so that -m is a distinct representable index
  auto consider = [&](std::vector<long> m) {
    std::vector<double> p(m.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      p[i] = h * static_cast<double>(m[i]);
      norm += p[i] * p[i];
    }
    norm = std::sqrt(norm);
    if (norm < p_min * (1.0 - 1e-12) || norm > p_max * (1.0 + 1e-12)) return;
    ms.wavevectors_.insert(ms.wavevectors_.end(), p.begin(), p.end());
    ms.indices_.insert(ms.indices_.end(), m.begin(), m.end());
    ms.ids_.push_back(pack_id(m));
    ms.norms_.push_back(norm);
    ms.gaps_.push_back(spectral_gap(params, norm));
    ms.var_.push_back(cell_variance(params, p, h));
  };
  if (grid.d == 1) {
    for (long m = 1; m < half; ++m) consider({m});
  } else {
    for (long a = 0; a < half; ++a) {
      for (long b = -half + 1; b < half; ++b) {
        if (a == 0 && b <= 0) continue;
        consider({a, b});
      }
    }
  }
  if (ms.norms_.empty()) {
    std::ostringstream msg;
    msg << "build_mode_set: no lattice modes in [" << p_min << ", " << p_max
        << "] (lattice spacing " << h << ")";
    throw DomainError(msg.str());
  }
  ms.states_.assign(2 * ms.norms_.size(), cplx{});
  ms.redraw(0);
  return ms;
}

double ModeSet::lattice_spacing() const { return scale_ * 2.0 * kPi / grid_.length; }

std::span<const double> ModeSet::wavevector(std::size_t mode) const {
  return {wavevectors_.data() + (mode / 2) * grid_.d, static_cast<std::size_t>(grid_.d)};
}

std::span<const long> ModeSet::lattice_index(std::size_t mode) const {
  return {indices_.data() + (mode / 2) * grid_.d, static_cast<std::size_t>(grid_.d)};
}

void ModeSet::redraw(std::uint64_t draw) {
  for (std::size_t j = 0; j < pair_count(); ++j) {
    CounterRng rng(seed_, stream_id(StreamTag::kModeInit, ids_[j]), draw);
    const auto z = rng.normal_pair();
    const double s = std::sqrt(0.5 * var_[j]);
    states_[2 * j] = cplx(s * z[0], s * z[1]);
    states_[2 * j + 1] = std::conj(states_[2 * j]);
  }
}

void ModeSet::reseed(std::uint64_t seed) {
  seed_ = seed;
  time_ = 0.0;
  steps_ = 0;
  redraw(0);
}

void ModeSet::advance(double dt) {
  if (dt < 0.0) throw DomainError("advance: dt must be nonnegative");
  for (std::size_t j = 0; j < pair_count(); ++j) {
    const double decay = std::exp(-gaps_[j] * dt);
    const double noise_var = var_[j] * -std::expm1(-2.0 * gaps_[j] * dt);
    CounterRng rng(seed_, stream_id(StreamTag::kModeNoise, ids_[j]), steps_);
    const auto z = rng.normal_pair();
    const double s = std::sqrt(0.5 * noise_var);
    states_[2 * j] = decay * states_[2 * j] + cplx(s * z[0], s * z[1]);
    states_[2 * j + 1] = std::conj(states_[2 * j]);
  }
  ++steps_;
  time_ += dt;
}

ModeSet ModeSet::subset(std::span<const std::size_t> pairs) const {
  ModeSet out;
  out.params_ = params_;
  out.grid_ = grid_;
  out.scale_ = scale_;
  out.seed_ = seed_;
  out.time_ = time_;
  out.steps_ = steps_;
  out.weight_ = weight_;
  const auto d = static_cast<std::size_t>(grid_.d);
  for (std::size_t j : pairs) {
    if (j >= pair_count()) throw DomainError("ModeSet::subset: pair index out of range");
    out.wavevectors_.insert(out.wavevectors_.end(), wavevectors_.begin() + j * d,
                            wavevectors_.begin() + (j + 1) * d);
    out.indices_.insert(out.indices_.end(), indices_.begin() + j * d,
                        indices_.begin() + (j + 1) * d);
    out.ids_.push_back(ids_[j]);
    out.norms_.push_back(norms_[j]);
    out.gaps_.push_back(gaps_[j]);
    out.var_.push_back(var_[j]);
    out.states_.push_back(states_[2 * j]);
    out.states_.push_back(states_[2 * j + 1]);
  }
  return out;
}

SpectralNodes ModeSet::nodes() const {
  SpectralNodes n;
  n.d = grid_.d;
  n.wavevectors = wavevectors_;
  n.weights.assign(pair_count(), weight_);
  return n;
}

void ModeSet::check_symmetry(double rel_tol) const {
  for (std::size_t j = 0; j < pair_count(); ++j) {
    const cplx a = states_[2 * j];
    const cplx b = states_[2 * j + 1];
    if (std::abs(b - std::conj(a)) > rel_tol * std::max(std::abs(a), 1e-300)) {
      std::ostringstream msg;
      msg << "Hermitian symmetry violated at mode pair " << j << " (|p| = " << norms_[j] << ")";
      throw NumericalError(msg.str());
    }
  }
}

void evaluate(const ModeSet& modes, std::vector<double>& out) {
  modes.check_symmetry();
  const Grid& g = modes.grid();
  const auto n = static_cast<long>(g.n);
  std::vector<cplx> buf(g.size(), cplx{});
  auto wrap = [n](long m) { return static_cast<std::size_t>(((m % n) + n) % n); };
  for (std::size_t j = 0; j < modes.pair_count(); ++j) {
    const auto m = modes.lattice_index(2 * j);
    std::size_t pos = 0, neg = 0;
    long parity = 0;
    for (int i = 0; i < g.d; ++i) {
      pos = pos * g.n + wrap(m[i]);
      neg = neg * g.n + wrap(-m[i]);
      parity += m[i];
    }
    // grid starts at -L/2: e^{i kappa x_0} = (-1)^{sum m}
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    buf[pos] += sign * modes.states()[2 * j];
    buf[neg] += sign * modes.states()[2 * j + 1];
  }
  std::vector<int> shape(static_cast<std::size_t>(g.d), static_cast<int>(g.n));
  cached_plan(shape, FftDirection::kBackward).execute(buf);
  out.resize(buf.size());
  double re2 = 0.0, im_max = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out[i] = buf[i].real();
    re2 += out[i] * out[i];
    im_max = std::max(im_max, std::abs(buf[i].imag()));
  }
  const double rms = std::sqrt(re2 / static_cast<double>(buf.size()));
  if (im_max > 1e-12 * std::max(rms, 1e-300) && im_max > 1e-300) {
    throw NumericalError("evaluate: imaginary residue exceeds 1e-12 of the field norm");
  }
}

std::vector<double> evaluate(const ModeSet& modes) {
  std::vector<double> out;
  evaluate(modes, out);
  return out;
}

double long_range_sum(const ModeSet& modes) {
  double s = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double p = modes.wavenumber_norm(m);
    s += modes.weight(m) * spatial_spectrum(modes.params(), p) / spectral_gap(modes.params(), p);
  }
  return s;
}

// ---------------------------------------------------------------------------

CovarianceAccumulator::CovarianceAccumulator(Grid grid, std::vector<Lag> lags)
    : grid_(grid), lags_(std::move(lags)), mean_(lags_.size(), 0.0), m2_(lags_.size(), 0.0) {
  for (const auto& lag : lags_) {
    if (static_cast<int>(lag.shift.size()) != grid_.d) {
      throw DomainError("CovarianceAccumulator: lag shift dimension mismatch");
    }
  }
}

void CovarianceAccumulator::add(const std::vector<std::vector<double>>& series) {
  add_sample(lag_means(series));
}

void CovarianceAccumulator::add_sample(const std::vector<double>& means) {
  if (means.size() != lags_.size()) throw DomainError("CovarianceAccumulator: sample size mismatch");
  ++count_;
  for (std::size_t l = 0; l < lags_.size(); ++l) {
    const double delta = means[l] - mean_[l];
    mean_[l] += delta / static_cast<double>(count_);
    m2_[l] += delta * (means[l] - mean_[l]);
  }
}

std::vector<double> CovarianceAccumulator::lag_means(
    const std::vector<std::vector<double>>& series) const {
  const std::size_t size = grid_.size();
  const auto n = static_cast<long>(grid_.n);
  std::vector<double> out(lags_.size());
  for (std::size_t l = 0; l < lags_.size(); ++l) {
    const Lag& lag = lags_[l];
    if (lag.time_steps >= series.size()) {
      throw DomainError("CovarianceAccumulator: time lag exceeds series length");
    }
    double sum = 0.0;
    std::size_t terms = 0;
    for (std::size_t s = 0; s + lag.time_steps < series.size(); ++s) {
      const auto& a = series[s + lag.time_steps];
      const auto& b = series[s];
      if (a.size() != size || b.size() != size) throw DomainError("CovarianceAccumulator: size mismatch");
      for (std::size_t y = 0; y < size; ++y) {
        // shifted flat index
        std::size_t rem = y, idx = 0, stride = size;
        for (int i = 0; i < grid_.d; ++i) {
          stride /= grid_.n;
          const long c = static_cast<long>(rem / stride);
          rem %= stride;
          const long sc = ((c + lag.shift[i]) % n + n) % n;
          idx += static_cast<std::size_t>(sc) * stride;
        }
        sum += a[idx] * b[y];
      }
      terms += size;
    }
    out[l] = sum / static_cast<double>(terms);
  }
  return out;
}

std::vector<Estimate> CovarianceAccumulator::estimates() const {
  if (count_ < 2) throw DomainError("empirical_covariance: at least 2 realizations required");
  std::vector<Estimate> out(lags_.size());
  for (std::size_t l = 0; l < lags_.size(); ++l) {
    const double var = m2_[l] / static_cast<double>(count_ - 1);
    out[l].value = mean_[l];
    out[l].std_error = std::sqrt(var / static_cast<double>(count_));
    out[l].n = count_;
  }
  return out;
}

std::vector<Estimate> empirical_covariance(
    const std::vector<std::vector<std::vector<double>>>& ensemble, const Grid& grid,
    const std::vector<Lag>& lags) {
  if (ensemble.size() < 2) throw DomainError("empirical_covariance: at least 2 realizations required");
  CovarianceAccumulator acc(grid, lags);
  for (const auto& series : ensemble) acc.add(series);
  return acc.estimates();
}

}  // namespace wdl
