#include "wdl/limit.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wdl/errors.hpp"
#include "wdl/fft.hpp"
#include "wdl/parallel.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

double axis_frequency(std::size_t i, std::size_t n, double period) {
  const auto ni = static_cast<long>(n), ii = static_cast<long>(i);
  return 2.0 * kPi * static_cast<double>(ii < ni / 2 ? ii : ii - ni) / period;
}

bool is_nyquist(std::size_t i, std::size_t n) { return n % 2 == 0 && i == n / 2; }

std::vector<cplx> spectrum2d(const WignerGrid& w) {
  std::vector<cplx> a(w.values.begin(), w.values.end());
  cached_plan({static_cast<int>(w.grid.nx), static_cast<int>(w.grid.nk)}, FftDirection::kForward)
      .execute(a);
  return a;
}

}  // namespace

WignerGrid frac_diffusion_evolve(const WignerGrid& w0, double sigma, double theta, double t) {
  if (t < 0.0) throw DomainError("frac_diffusion_evolve: t must be nonnegative");
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("frac_diffusion_evolve: theta in (0, 1]");
  WignerGrid out = w0;
  out.time = w0.time + t;
  out.provenance = LimitProvenance::kFracDiffusion;
  if (t == 0.0) return out;
  const auto& g = w0.grid;
  const double period = static_cast<double>(g.nk) * g.dk;
  const double inv_n = 1.0 / static_cast<double>(g.nk);
  std::vector<double> mult(g.nk);
  for (std::size_t b = 0; b < g.nk; ++b) {
    mult[b] = inv_n * std::exp(-sigma * std::pow(std::abs(axis_frequency(b, g.nk, period)), theta) * t);
  }
  const int n = static_cast<int>(g.nk), rows = static_cast<int>(g.nx);
  FftPlan fwd(n, rows, 1, n, FftDirection::kForward);
  FftPlan bwd(n, rows, 1, n, FftDirection::kBackward);
  std::vector<cplx> a(w0.values.begin(), w0.values.end());
  fwd.execute(a);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t b = 0; b < g.nk; ++b) a[g.index(i, b)] *= mult[b];
  }
  bwd.execute(a);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i].real();
  return out;
}

WignerGrid frac_diffusion_evolve(const WignerGrid& w0, const ModelParams& params, double t,
                                 SigmaConvention convention) {
  return frac_diffusion_evolve(w0, diffusion_coefficient(params, convention), params.theta(), t);
}

double stable_density(double theta, double sigma, double t, double k) {
  using namespace boost::math::quadrature;
  if (!(t > 0.0)) throw DomainError("stable_density: t must be positive (t = 0 is a point mass)");
  if (!(theta > 0.0 && theta <= 2.0) || !(sigma > 0.0)) throw DomainError("stable_density: bad parameters");
  const double c = sigma * t;
  auto f = [&](double q) { return std::exp(-c * std::pow(q, theta)); };
  k = std::abs(k);
  if (k == 0.0) {
    thread_local exp_sinh<double> es;
    return es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14) / kPi;
  }
  // The q^theta cusp at the origin is handled by tanh-sinh on [0, a]; the
  // oscillatory remainder by Ooura's double-exponential rule.
  thread_local tanh_sinh<double> ts;
  thread_local ooura_fourier_cos<double> oc(1e-14, 12);
  thread_local ooura_fourier_sin<double> os(1e-14, 12);
  const double a = std::pow(c, -1.0 / theta);
  const double head = ts.integrate([&](double q) { return f(q) * std::cos(k * q); }, 0.0, a, 1e-14);
  auto shifted = [&](double q) { return f(q + a); };
  const double tail =
      std::cos(k * a) * oc.integrate(shifted, k).first - std::sin(k * a) * os.integrate(shifted, k).first;
  return (head + tail) / kPi;
}

PsiTable::PsiTable(const JumpKernel& kernel, double q_max, std::size_t nodes, unsigned jobs)
    : q_max_(q_max) {
  if (!(q_max > 0.0) || nodes < 2) throw DomainError("PsiTable: need q_max > 0 and >= 2 nodes");
  nodes_.resize(nodes + 1);
  values_.resize(nodes + 1);
  for (std::size_t i = 0; i <= nodes; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(nodes);
    nodes_[i] = q_max * u * u;
  }
  parallel_for(nodes + 1, jobs, [&](std::size_t i) { values_[i] = kernel.exponent(nodes_[i]); });
  cumulative_.assign(nodes + 1, 0.0);
  for (std::size_t i = 1; i <= nodes; ++i) {
    cumulative_[i] =
        cumulative_[i - 1] + 0.5 * (nodes_[i] - nodes_[i - 1]) * (values_[i] + values_[i - 1]);
  }
}

PsiTable PsiTable::zero(double q_max) {
  PsiTable t;
  t.q_max_ = q_max;
  t.nodes_ = {0.0, q_max};
  t.values_ = {0.0, 0.0};
  t.cumulative_ = {0.0, 0.0};
  return t;
}

double PsiTable::locate(double q_abs, std::size_t& i) const {
  if (q_abs > q_max_ * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "PsiTable: |q| = " << q_abs << " exceeds the tabulated range " << q_max_;
    throw DomainError(msg.str());
  }
  const std::size_t n = nodes_.size() - 1;
  i = std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * std::sqrt(q_abs / q_max_)));
  while (i > 0 && nodes_[i] > q_abs) --i;
  while (i + 1 < n && nodes_[i + 1] < q_abs) ++i;
  const double w = (q_abs - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double PsiTable::operator()(double q) const {
  std::size_t i;
  return locate(std::abs(q), i);
}

double PsiTable::antiderivative(double q) const {
  std::size_t i;
  const double qa = std::abs(q);
  const double v = locate(qa, i);
  const double c = cumulative_[i] + 0.5 * (qa - nodes_[i]) * (values_[i] + v);
  return q < 0.0 ? -c : c;
}

double PsiTable::time_integral(double q, double y, double t) const {
  if (t == 0.0) return 0.0;
  const double b = q + t * y;
  if (std::abs(t * y) < 1e-6 * std::max(1.0, std::abs(q))) {
    return t * ((*this)(q) + 4.0 * (*this)(0.5 * (q + b)) + (*this)(b)) / 6.0;
  }
  return (antiderivative(b) - antiderivative(q)) / y;
}

double required_psi_extent(const PhaseGrid& grid, double t) {
  return kPi / grid.dk + std::abs(t) * kPi / grid.dx;
}

WignerGrid radiative_closed_form(const WignerGrid& w0, const PsiTable& psi, double t,
                                 double* imag_residue) {
  if (t < 0.0) throw DomainError("radiative_closed_form: t must be nonnegative");
  const auto& g = w0.grid;
  const double need = required_psi_extent(g, t);
  if (need > psi.q_max() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "radiative_closed_form: exponent table covers |q| <= " << psi.q_max()
        << " but the grid needs " << need;
    throw DomainError(msg.str());
  }
  WignerGrid out = w0;
  out.time = w0.time + t;
  out.provenance = LimitProvenance::kRadiativeClosedForm;
  if (imag_residue) *imag_residue = 0.0;
  if (t == 0.0) return out;

  const std::size_t nx = g.nx, nk = g.nk;
  const double px = static_cast<double>(nx) * g.dx, pk = static_cast<double>(nk) * g.dk;
  std::vector<cplx> a(w0.values.begin(), w0.values.end());

  // Shear x -> x - t k by a phase on the x-transform of each k column.
  FftPlan fx(static_cast<int>(nx), static_cast<int>(nk), static_cast<int>(nk), 1, FftDirection::kForward);
  fx.execute(a);
  for (std::size_t i = 0; i < nx; ++i) {
    const double y = axis_frequency(i, nx, px);
    for (std::size_t j = 0; j < nk; ++j) {
      const double ph = y * t * g.k(j);
      a[g.index(i, j)] *= is_nyquist(i, nx) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, -ph);
    }
  }
  FftPlan fk(static_cast<int>(nk), static_cast<int>(nx), 1, static_cast<int>(nk), FftDirection::kForward);
  fk.execute(a);

  const double inv_n = 1.0 / static_cast<double>(nx * nk);
  for (std::size_t i = 0; i < nx; ++i) {
    const double y = axis_frequency(i, nx, px);
    const bool ny = is_nyquist(i, nx);
    for (std::size_t j = 0; j < nk; ++j) {
      const double q = axis_frequency(j, nk, pk);
      const bool nq = is_nyquist(j, nk);
      // On Nyquist rows/columns -y (or -q) aliases to the same node; average the
      // sign choices so the multiplier keeps Hermitian symmetry.
      double m = 0.0;
      int count = 0;
      for (int sy = 1; sy >= (ny ? -1 : 1); sy -= 2) {
        for (int sq = 1; sq >= (nq ? -1 : 1); sq -= 2) {
          m += std::exp(psi.time_integral(sq * q, sy * y, t));
          ++count;
        }
      }
      a[g.index(i, j)] *= inv_n * m / count;
    }
  }
  cached_plan({static_cast<int>(nx), static_cast<int>(nk)}, FftDirection::kBackward).execute(a);
  double max_re = 0.0, max_im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.values[i] = a[i].real();
    max_re = std::max(max_re, std::abs(a[i].real()));
    max_im = std::max(max_im, std::abs(a[i].imag()));
  }
  if (imag_residue) *imag_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  return out;
}

std::vector<double> sobolev_seminorms(const WignerGrid& w, int max_order) {
  const auto& g = w.grid;
  const auto a = spectrum2d(w);
  const double px = static_cast<double>(g.nx) * g.dx, pk = static_cast<double>(g.nk) * g.dk;
  std::vector<double> s(static_cast<std::size_t>(max_order) + 1, 0.0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double y = axis_frequency(i, g.nx, px);
    for (std::size_t j = 0; j < g.nk; ++j) {
      const double q = axis_frequency(j, g.nk, pk);
      const double r2 = y * y + q * q;
      double wgt = std::norm(a[g.index(i, j)]);
      for (auto& v : s) {
        v += wgt;
        wgt *= r2;
      }
    }
  }
  const double scale = g.cell_area() / static_cast<double>(g.size());
  for (auto& v : s) v = std::sqrt(v * scale);
  return s;
}

double high_frequency_norm(const WignerGrid& w, double cut) {
  const auto& g = w.grid;
  const auto a = spectrum2d(w);
  const double px = static_cast<double>(g.nx) * g.dx, pk = static_cast<double>(g.nk) * g.dk;
  double s = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double y = axis_frequency(i, g.nx, px);
    for (std::size_t j = 0; j < g.nk; ++j) {
      const double q = axis_frequency(j, g.nk, pk);
      if (y * y + q * q > cut * cut) s += std::norm(a[g.index(i, j)]);
    }
  }
  return std::sqrt(s * g.cell_area() / static_cast<double>(g.size()));
}

std::vector<RegularityRow> regularity_probe(const WignerGrid& w0, const PsiTable& psi,
                                            std::span<const double> times, double tail_cut) {
  const auto free = PsiTable::zero(psi.q_max());
  std::vector<RegularityRow> rows;
  for (double t : times) {
    RegularityRow r;
    r.t = t;
    const auto w = radiative_closed_form(w0, psi, t);
    r.seminorms = sobolev_seminorms(w);
    r.tail_norm = high_frequency_norm(w, tail_cut);
    r.transport_tail_norm = high_frequency_norm(radiative_closed_form(w0, free, t), tail_cut);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace wdl
