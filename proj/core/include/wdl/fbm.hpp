#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wdl/fft.hpp"

namespace wdl {

struct FbmPath {
  double hurst = 0.5;
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // B(0) = 0, ..., B(n dt)
};

/// Davies-Harte circulant embedding of fractional Gaussian noise.  The
/// eigenvalues are computed once; each sample costs one FFT of the embedding.
class FbmSampler {
 public:
  FbmSampler(double hurst, std::size_t n_steps, double dt);

  /// Path `index` of the stream for `seed`.
  FbmPath sample(std::uint64_t seed, std::uint64_t index = 0) const;

  std::size_t embedding_size() const { return sqrt_eig_.size(); }
  int enlargements() const { return enlargements_; }

 private:
  double hurst_, dt_;
  std::size_t n_;
  int enlargements_ = 0;
  std::vector<double> sqrt_eig_;
};

FbmPath fbm_sample(double hurst, std::size_t n_steps, double dt, std::uint64_t seed,
                   std::uint64_t index = 0);

/// Autocovariance of unit-step fractional Gaussian noise at lag h.
double fgn_autocovariance(double hurst, double h);

/// zeta0 exp(i sqrt(D) B(t)).
std::vector<cplx> phase_limit_sample(double d_coefficient, const FbmPath& path, cplx zeta0);

struct HurstEstimate {
  double kappa = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  std::vector<std::size_t> lags;
  std::vector<double> mean_square;  // per lag
  bool degenerate = false;
};

/// Slope / 2 of log E|X(t + l) - X(t)|^2 against log l over dyadic lags.  The
/// confidence interval is a percentile bootstrap over paths; a single path is
/// split into 8 segments for that purpose.  An ensemble needs 2^10 samples in total and
/// paths at least twice the largest lag.
HurstEstimate hurst_estimate(std::span<const std::vector<double>> paths, std::size_t lag_count = 6,
                             std::size_t bootstrap = 200, std::uint64_t seed = 1);
HurstEstimate hurst_estimate(const std::vector<double>& path, std::size_t lag_count = 6);

}  // namespace wdl
