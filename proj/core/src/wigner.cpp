#include "wdl/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "wdl/errors.hpp"
#include "wdl/fft.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

bool same_scale(double s, double s_c) { return std::abs(s - s_c) <= 1e-12; }

// Transform of the rows of `phi` with per-lag weights chi (empty = none).
WignerGrid transform_rows(const std::vector<cplx>& phi, const Grid& grid, double h,
                          std::size_t stride, const std::vector<cplx>& lag_weight,
                          double* imag_residue) {
  const std::size_t n = grid.n;
  if (n % 2 != 0) throw DomainError("wigner_transform: grid_N must be even");
  WignerGrid w = WignerGrid::zeros(wigner_phase_grid(grid, h, stride));
  const double c = 2.0 * grid.dx() / (2.0 * kPi * h);
  const auto& plan = cached_plan({static_cast<int>(n)}, FftDirection::kBackward);
  std::vector<cplx> row(n);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t r = 0; r < w.grid.nx; ++r) {
    const std::size_t i = r * stride;
    for (std::size_t m = 0; m < n; ++m) {
      // signed lag; pairs that leave the box are dropped rather than wrapped, so the
      // periodic images of a packet do not produce a ghost at half a period
      const long l = m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
      const long a = static_cast<long>(i) - l, b = static_cast<long>(i) + l;
      if (a < 0 || b < 0 || a >= static_cast<long>(n) || b >= static_cast<long>(n)) {
        row[m] = 0.0;
        continue;
      }
      cplx v = phi[static_cast<std::size_t>(a)] * std::conj(phi[static_cast<std::size_t>(b)]);
      if (!lag_weight.empty()) v *= lag_weight[m];
      row[m] = (m % 2 == 0) ? v : -v;
    }
    plan.execute(row);
    for (std::size_t j = 0; j < n; ++j) {
      const double re = c * row[j].real();
      max_re = std::max(max_re, std::abs(re));
      max_im = std::max(max_im, std::abs(c * row[j].imag()));
      w.at(r, j) = re;
    }
  }
  if (imag_residue) *imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  return w;
}

std::vector<cplx> sample_envelope(const InitialEnvelope& phi0, const Grid& grid) {
  std::vector<cplx> v(grid.n);
  double x[1];
  for (std::size_t i = 0; i < grid.n; ++i) {
    x[0] = grid.coordinate(i);
    v[i] = phi0(std::span<const double>(x, 1));
  }
  return v;
}

void require_1d(const Grid& g, const char* what) {
  if (g.d != 1) throw DomainError(std::string(what) + ": phase-space transforms need d = 1");
}

}  // namespace

PhaseGrid wigner_phase_grid(const Grid& grid, double h, std::size_t x_stride) {
  if (x_stride == 0 || grid.n % x_stride != 0) {
    throw DomainError("wigner: x_stride must divide grid_N");
  }
  PhaseGrid g;
  g.x0 = grid.coordinate(0);
  g.dx = grid.dx() * static_cast<double>(x_stride);
  g.nx = grid.n / x_stride;
  g.dk = kPi * h / grid.length;
  g.nk = grid.n;
  g.k0 = -0.5 * static_cast<double>(grid.n) * g.dk;
  g.x_period = grid.length;
  return g;
}

double alias_fraction(const WaveField& field) {
  const auto& g = field.grid;
  std::vector<cplx> spec = field.values;
  cached_plan(std::vector<int>(g.d, static_cast<int>(g.n)), FftDirection::kForward).execute(spec);
  double total = 0.0, high = 0.0;
  const double cut = 0.5 * g.nyquist();
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    std::size_t rem = idx;
    bool above = false;
    for (int a = 0; a < g.d; ++a) {
      above = above || std::abs(g.wavenumber(rem % g.n)) > cut;
      rem /= g.n;
    }
    const double p = std::norm(spec[idx]);
    total += p;
    if (above) high += p;
  }
  return total > 0.0 ? high / total : 0.0;
}

WignerGrid wigner_transform(const WaveField& field, const WignerOptions& options,
                            double* imag_residue) {
  require_1d(field.grid, "wigner_transform");
  const double alias = alias_fraction(field);
  if (alias > options.alias_tolerance) {
    throw NumericalError("wigner_transform: " + std::to_string(alias) +
                         " of the spectral mass lies above Nyquist/2; the correlation scale is "
                         "under-resolved (increase grid_N)");
  }
  const double h = field.regime.correlation_scale();
  WignerGrid w = transform_rows(field.values, field.grid, h, options.x_stride, {}, imag_residue);
  w.regime = field.regime;
  w.time = field.time;
  w.provenance = LimitProvenance::kWigner;
  return w;
}

void WignerAccumulator::add(const WignerGrid& w, double weight) {
  if (n_ == 0) {
    sum_ = WignerGrid::zeros(w.grid, w.regime);
    sum_.time = w.time;
    sum_.provenance = w.provenance;
  } else if (!(w.grid == sum_.grid)) {
    throw DomainError("mixture_average: phase grid mismatch");
  }
  for (std::size_t i = 0; i < w.values.size(); ++i) sum_.values[i] += weight * w.values[i];
  weight_ += weight;
  ++n_;
}

WignerGrid WignerAccumulator::mean() const {
  if (n_ == 0 || weight_ == 0.0) throw DomainError("mixture_average: no samples");
  WignerGrid m = sum_;
  for (double& v : m.values) v /= weight_;
  return m;
}

WignerGrid mixture_average(std::span<const WignerGrid> samples) {
  WignerAccumulator acc;
  for (const auto& w : samples) acc.add(w);
  return acc.mean();
}

WignerGrid mixed_wigner(const InitialEnvelope& phi0, const DirectionLaw& mu,
                        const ScalingRegime& regime, const Grid& grid,
                        const WignerOptions& options) {
  require_1d(grid, "mixed_wigner");
  const double h = regime.correlation_scale();
  const auto phi = sample_envelope(phi0, grid);
  const std::size_t n = grid.n;
  std::vector<cplx> chi(n);
  for (std::size_t m = 0; m < n; ++m) {
    const long mc = m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
    const double y = 2.0 * static_cast<double>(mc) * grid.dx() / h;
    chi[m] = mu.characteristic(-y);
  }
  WignerGrid w = transform_rows(phi, grid, h, options.x_stride, chi, nullptr);
  w.regime = regime;
  w.provenance = LimitProvenance::kWigner;
  return w;
}

WignerGrid initial_wigner(const InitialEnvelope& phi0, const DirectionLaw& mu,
                          const ScalingRegime& regime, const Grid& grid, std::size_t x_stride) {
  require_1d(grid, "initial_wigner");
  regime.validate();
  if (same_scale(regime.s, regime.s_c)) {
    WignerOptions opt;
    opt.x_stride = x_stride;
    return mixed_wigner(phi0, mu, regime, grid, opt);
  }
  if (regime.s_c > regime.s) throw DomainError("initial_wigner: need s_c <= s");
  WignerGrid w = WignerGrid::zeros(wigner_phase_grid(grid, regime.correlation_scale(), x_stride),
                                   regime);
  std::vector<double> mu_k(w.grid.nk, 0.0);
  if (mu.is_point()) {
    const double f = (mu.mean - w.grid.k0) / w.grid.dk;
    const auto j = static_cast<long>(std::llround(f));
    if (j < 0 || j >= static_cast<long>(w.grid.nk)) throw DomainError("initial_wigner: point mass outside k grid");
    mu_k[static_cast<std::size_t>(j)] = 1.0 / w.grid.dk;
  } else {
    for (std::size_t j = 0; j < w.grid.nk; ++j) mu_k[j] = mu.density(w.grid.k(j));
  }
  double x[1];
  for (std::size_t i = 0; i < w.grid.nx; ++i) {
    x[0] = w.grid.x(i);
    const double rho = std::norm(phi0(std::span<const double>(x, 1)));
    for (std::size_t j = 0; j < w.grid.nk; ++j) w.at(i, j) = rho * mu_k[j];
  }
  w.provenance = LimitProvenance::kWigner;
  return w;
}

std::vector<double> k_marginal(const WignerGrid& w) {
  std::vector<double> out(w.grid.nx, 0.0);
  for (std::size_t i = 0; i < w.grid.nx; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.grid.nk; ++j) s += w.at(i, j);
    out[i] = s * w.grid.dk;
  }
  return out;
}

double l2_norm(const WignerGrid& w) {
  double s = 0.0;
  for (double v : w.values) s += v * v;
  return std::sqrt(s * w.grid.cell_area());
}

double total_mass(const WignerGrid& w) {
  double s = 0.0;
  for (double v : w.values) s += v;
  return s * w.grid.cell_area();
}

void write_slice_csv(std::ostream& os, const WignerGrid& w, double x) {
  const auto& g = w.grid;
  double f = (x - g.x0) / g.dx;
  if (g.x_period > 0.0) {
    const double period = g.x_period / g.dx;
    f = std::fmod(std::fmod(f, period) + period, period);
  }
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::round(f))) % g.nx,
                                       g.nx - 1);
  os << "k,w\n";
  os.precision(17);
  for (std::size_t j = 0; j < g.nk; ++j) os << g.k(j) << ',' << w.at(i, j) << '\n';
}

}  // namespace wdl
