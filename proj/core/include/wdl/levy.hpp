#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wdl/field.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

struct LevyPath {
  double t = 0.0;
  double delta = 0.0;
  std::vector<double> jump_times;
  std::vector<double> jumps;  // d per jump
  std::vector<double> position;  // L_t
  std::vector<double> integral;  // int_0^t L_s ds
};

struct LevyEndpoint {
  double position = 0.0;  // L_t (d = 1)
  double integral = 0.0;  // int_0^t L_s ds
  std::size_t jumps = 0;
};

/// Compound Poisson process with jump density sigma restricted to |p| >= delta.
/// Jumps are drawn by thinning the dominating Pareto law C r^{-d-theta} (exact
/// in law, no inverse CDF needed).
class LevySampler {
 public:
  LevySampler(const JumpKernel& kernel, double delta);

  double delta() const { return delta_; }
  /// Lambda(delta).
  double rate() const { return rate_; }
  /// int_{|p| < delta} |p| sigma(p) dp.
  double small_jump_moment() const { return moment_; }
  int dimension() const { return kernel_.dimension(); }

  LevyPath sample(double t, std::uint64_t seed, std::uint64_t index) const;
  /// Endpoint summary without storing jumps; d = 1.
  LevyEndpoint endpoint(double t, std::uint64_t seed, std::uint64_t index) const;

 private:
  template <class OnJump>
  void run(double t, std::uint64_t seed, std::uint64_t index, OnJump&& on_jump) const;

  JumpKernel kernel_;
  double delta_;
  double rate_ = 0.0;
  double moment_ = 0.0;
  double majorant_rate_ = 0.0;
  double majorant_c_ = 0.0;
};

struct ProbePoint {
  double x = 0.0;
  double k = 0.0;
};

struct ProbeEstimate {
  ProbePoint probe;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double delta = 0.0;
};

struct LevyMcResult {
  std::vector<ProbeEstimate> estimates;
  double bias_bound = 0.0;
  double rate = 0.0;
};

using PhaseFunction = std::function<double(double, double)>;

/// Bound on |E W0(...) - E W0(...)_delta| from the dropped small jumps:
///   ||d_k W0|| t m1 + ||d_x W0|| t^2 m1 / 2.
double levy_bias_bound(double grad_k_sup, double grad_x_sup, double t, double small_jump_moment);

/// E W0(x - t k - int_0^t L ds, k + L_t) at each probe.  Paths are shared across
/// probes; `jobs` workers, merged by path index.
LevyMcResult levy_mc_solution(const PhaseFunction& w0, const LevySampler& sampler, double t,
                              std::span<const ProbePoint> probes, std::size_t n_paths,
                              std::uint64_t seed, unsigned jobs = 1, double grad_k_sup = 0.0,
                              double grad_x_sup = 0.0);

}  // namespace wdl
