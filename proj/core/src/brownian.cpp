#include "wdl/brownian.hpp"

#include <cmath>
#include <numbers>

#include "wdl/errors.hpp"
#include "wdl/fft.hpp"
#include "wdl/rng.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;

// int_a^b p^{-1-theta} dp
double power_cell(double a, double b, double theta) {
  return (std::pow(a, -theta) - std::pow(b, -theta)) / theta;
}

}  // namespace

SpectralNodes brownian_nodes(double theta, const BrownianNodeSpec& spec) {
  if (!(spec.p_min > 0.0 && spec.p_min < spec.p_lo && spec.p_lo < spec.p_hi && spec.p_hi < spec.p_max)) {
    throw DomainError("brownian_nodes: need 0 < p_min < p_lo < p_hi < p_max");
  }
  std::vector<double> edges;
  auto log_edges = [&](double a, double b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      edges.push_back(a * std::pow(b / a, static_cast<double>(i) / static_cast<double>(n)));
    }
  };
  log_edges(spec.p_min, spec.p_lo, spec.log_cells_low);
  const auto n_uniform = static_cast<std::size_t>(std::llround((spec.p_hi - spec.p_lo) / spec.uniform_step));
  for (std::size_t i = 0; i < n_uniform; ++i) {
    edges.push_back(spec.p_lo + static_cast<double>(i) * (spec.p_hi - spec.p_lo) / static_cast<double>(n_uniform));
  }
  log_edges(spec.p_hi, spec.p_max, spec.log_cells_high);
  edges.push_back(spec.p_max);

  SpectralNodes nodes;
  nodes.d = 1;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i], b = edges[i + 1];
    const double p = 0.5 * (a + b);
    nodes.wavevectors.push_back(p);
    nodes.weights.push_back(power_cell(a, b, theta) * std::pow(p, 1.0 + theta));
  }
  return nodes;
}

double BrownianFieldPath::variance_density(std::size_t j) const {
  return nodes.weights[j] / std::pow(nodes.norm(j), nodes.d + theta);
}

BrownianFieldPath brownian_field_sample(const ModelParams& params, const SpectralNodes& nodes,
                                        std::span<const double> times, std::uint64_t seed,
                                        std::uint64_t index) {
  params.validate();
  BrownianFieldPath path;
  path.nodes = nodes;
  path.theta = params.theta();
  path.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) {
      throw DomainError("brownian_field_sample: times must be nonnegative and non-decreasing");
    }
  }
  const std::size_t m = nodes.size();
  std::vector<cplx> state(m, cplx{});
  std::vector<double> scale(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (!(nodes.norm(j) > 0.0)) throw DomainError("brownian_field_sample: p_min must be positive");
    scale[j] = std::sqrt(0.5 * path.variance_density(j));
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double dt = times[i] - prev;
    prev = times[i];
    if (dt > 0.0) {
      const double s = std::sqrt(dt);
      CounterRng rng(seed, stream_id(StreamTag::kBrownian, index, i));
      for (std::size_t j = 0; j < m; ++j) {
        const auto z = rng.normal_pair();
        state[j] += s * scale[j] * cplx(z[0], z[1]);
      }
    }
    path.values.push_back(state);
  }
  return path;
}

cplx pair_with(const BrownianFieldPath& path, std::size_t time_index,
               const std::function<cplx(double)>& phi) {
  const auto& b = path.values.at(time_index);
  cplx s{};
  for (std::size_t j = 0; j < b.size(); ++j) {
    const double p = path.nodes.wavevectors[j];
    s += b[j] * phi(p) + std::conj(b[j]) * phi(-p);
  }
  return s;
}

double test_function_variance(const SpectralNodes& nodes, double theta, double t,
                              const std::function<cplx(double)>& phi) {
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double p = nodes.wavevectors[j];
    const double v = nodes.weights[j] / std::pow(std::abs(p), nodes.d + theta);
    s += v * (std::norm(phi(p)) + std::norm(phi(-p)));
  }
  return t * s;
}

double brownian_coupling(const ModelParams& params, double sigma) {
  const double theta = params.theta();
  if (params.d != 1) throw DomainError("brownian_coupling: d = 1 only");
  // int_R (1 - cos u) |u|^{-1-theta} du
  const double k = 2.0 * std::tgamma(1.0 - theta) * std::cos(0.5 * kPi * theta) / theta;
  return std::sqrt(sigma / k);
}

WignerGrid stochastic_wigner_sample(const WignerGrid& w0, const BrownianFieldPath& path,
                                    std::size_t ti, double coupling,
                                    std::span<const std::size_t> rows,
                                    std::vector<double>* row_norms) {
  const auto& g = w0.grid;
  const std::size_t nk = g.nk;
  if (nk % 2 != 0) throw DomainError("stochastic_wigner_sample: nk must be even");
  const auto& b = path.values.at(ti);
  const std::size_t m = b.size();
  WignerGrid out = WignerGrid::zeros(g, w0.regime);
  out.time = path.times.at(ti);
  out.provenance = LimitProvenance::kStochastic;
  if (row_norms) row_norms->clear();

  const double dq = 2.0 * kPi / (static_cast<double>(nk) * g.dk);
  // z_l = x + (l - nk/2) dq / 2, l = 0..nk, covers x -+ q/2 for every lattice q.
  std::vector<cplx> step(m);
  for (std::size_t j = 0; j < m; ++j) step[j] = std::polar(1.0, path.nodes.wavevectors[j] * 0.5 * dq);
  const auto& fwd = cached_plan({static_cast<int>(nk)}, FftDirection::kForward);
  const auto& bwd = cached_plan({static_cast<int>(nk)}, FftDirection::kBackward);
  std::vector<double> f(nk + 1);
  std::vector<cplx> row(nk);
  const auto half = static_cast<long>(nk / 2);

  for (std::size_t r : rows) {
    if (r >= g.nx) throw DomainError("stochastic_wigner_sample: row out of range");
    const double x = g.x(r);
    std::fill(f.begin(), f.end(), 0.0);
    const double z0 = x - 0.5 * static_cast<double>(half) * dq;
    for (std::size_t j = 0; j < m; ++j) {
      cplx c = b[j] * std::polar(1.0, path.nodes.wavevectors[j] * z0);
      for (std::size_t l = 0; l <= nk; ++l) {
        f[l] += 2.0 * c.real();
        c *= step[j];
      }
    }
    for (std::size_t a = 0; a < nk; ++a) row[a] = w0.at(r, a);
    fwd.execute(row);
    // The q index along the transform is ii (signed); q = ii dq and x -+ q/2 sit at l = half -+ ii.
    for (std::size_t a = 0; a < nk; ++a) {
      const long ii = a < nk / 2 ? static_cast<long>(a) : static_cast<long>(a) - static_cast<long>(nk);
      if (ii == -half) continue;  // Nyquist: no Hermitian partner, multiplier 1
      const double phi = f[static_cast<std::size_t>(half - ii)] - f[static_cast<std::size_t>(half + ii)];
      row[a] *= std::polar(1.0 / static_cast<double>(nk), coupling * phi);
    }
    row[nk / 2] /= static_cast<double>(nk);
    bwd.execute(row);
    double norm = 0.0;
    for (std::size_t a = 0; a < nk; ++a) {
      out.at(r, a) = row[a].real();
      norm += row[a].real() * row[a].real();
    }
    if (row_norms) row_norms->push_back(std::sqrt(norm * g.dk));
  }
  return out;
}

}  // namespace wdl
