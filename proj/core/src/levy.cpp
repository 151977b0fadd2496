#include "wdl/levy.hpp"

#include <cmath>
#include <numbers>

#include "wdl/errors.hpp"
#include "wdl/parallel.hpp"
#include "wdl/rng.hpp"

namespace wdl {

LevySampler::LevySampler(const JumpKernel& kernel, double delta) : kernel_(kernel), delta_(delta) {
  if (!(delta > 0.0)) throw DomainError("levy_sample: cutoff delta must be positive");
  if (kernel.dimension() < 1 || kernel.dimension() > 2) throw DomainError("levy_sample: d = 1 or 2");
  if (kernel.is_zero()) return;
  const double theta = kernel.params().theta();
  rate_ = kernel.rate_beyond(delta);
  moment_ = kernel.small_jump_moment(delta);
  if (!(std::isfinite(rate_) && rate_ >= 0.0)) throw NumericalError("levy_sample: Lambda(delta) quadrature failed");
  majorant_c_ = kernel.majorant_constant();
  majorant_rate_ = sphere_area(kernel.dimension()) * majorant_c_ * std::pow(delta, -theta) / theta;
}

template <class OnJump>
void LevySampler::run(double t, std::uint64_t seed, std::uint64_t index, OnJump&& on_jump) const {
  if (t < 0.0) throw DomainError("levy_sample: t must be nonnegative");
  if (kernel_.is_zero() || t == 0.0) return;
  const int d = kernel_.dimension();
  const double theta = kernel_.params().theta();
  CounterRng rng(seed, stream_id(StreamTag::kLevy, index));
  double time = 0.0;
  for (;;) {
    time += -std::log(rng.uniform()) / majorant_rate_;
    if (time > t) break;
    const double r = delta_ * std::pow(rng.uniform(), -1.0 / theta);
    const double accept = kernel_.density(r) / (majorant_c_ * std::pow(r, -d - theta));
    const double u = rng.uniform();
    const double v = rng.uniform();
    if (u >= accept) continue;
    double dir[2];
    if (d == 1) {
      dir[0] = v < 0.5 ? -1.0 : 1.0;
    } else {
      const double phi = 2.0 * std::numbers::pi * v;
      dir[0] = std::cos(phi);
      dir[1] = std::sin(phi);
    }
    on_jump(time, r, dir);
  }
}

LevyPath LevySampler::sample(double t, std::uint64_t seed, std::uint64_t index) const {
  const int d = kernel_.dimension();
  LevyPath p;
  p.t = t;
  p.delta = delta_;
  p.position.assign(d, 0.0);
  p.integral.assign(d, 0.0);
  run(t, seed, index, [&](double tau, double r, const double* dir) {
    p.jump_times.push_back(tau);
    for (int a = 0; a < d; ++a) {
      p.jumps.push_back(r * dir[a]);
      p.position[a] += r * dir[a];
      // L is piecewise constant, so each jump contributes J (t - tau) to the integral.
      p.integral[a] += r * dir[a] * (t - tau);
    }
  });
  return p;
}

LevyEndpoint LevySampler::endpoint(double t, std::uint64_t seed, std::uint64_t index) const {
  if (kernel_.dimension() != 1) throw DomainError("LevySampler::endpoint: d = 1 only");
  LevyEndpoint e;
  run(t, seed, index, [&](double tau, double r, const double* dir) {
    e.position += r * dir[0];
    e.integral += r * dir[0] * (t - tau);
    ++e.jumps;
  });
  return e;
}

double levy_bias_bound(double grad_k_sup, double grad_x_sup, double t, double small_jump_moment) {
  return grad_k_sup * t * small_jump_moment + grad_x_sup * t * t * small_jump_moment / 2.0;
}

LevyMcResult levy_mc_solution(const PhaseFunction& w0, const LevySampler& sampler, double t,
                              std::span<const ProbePoint> probes, std::size_t n_paths,
                              std::uint64_t seed, unsigned jobs, double grad_k_sup,
                              double grad_x_sup) {
  if (n_paths < 2) throw DomainError("levy_mc_solution: need at least 2 paths");
  const std::size_t np = probes.size();
  // Fixed-size blocks so the reduction order does not depend on `jobs`.
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (n_paths + kBlock - 1) / kBlock;
  std::vector<double> sums(blocks * np, 0.0), squares(blocks * np, 0.0);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(n_paths, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      const auto e = sampler.endpoint(t, seed, i);
      for (std::size_t p = 0; p < np; ++p) {
        const double v = w0(probes[p].x - t * probes[p].k - e.integral, probes[p].k + e.position);
        sums[b * np + p] += v;
        squares[b * np + p] += v * v;
      }
    }
  });
  LevyMcResult res;
  res.rate = sampler.rate();
  res.bias_bound = levy_bias_bound(grad_k_sup, grad_x_sup, t, sampler.small_jump_moment());
  const double n = static_cast<double>(n_paths);
  for (std::size_t p = 0; p < np; ++p) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      s += sums[b * np + p];
      s2 += squares[b * np + p];
    }
    const double mean = s / n;
    const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
    res.estimates.push_back({probes[p], mean, std::sqrt(var / n), n_paths, sampler.delta()});
  }
  return res;
}

}  // namespace wdl
