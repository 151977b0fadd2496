#include "wdl/fbm.hpp"

#include <algorithm>
#include <cmath>

#include "wdl/errors.hpp"
#include "wdl/rng.hpp"
#include "wdl/stats.hpp"

namespace wdl {

double fgn_autocovariance(double hurst, double h) {
  h = std::abs(h);
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(h + 1.0, e) + std::pow(std::abs(h - 1.0), e) - 2.0 * std::pow(h, e));
}

FbmSampler::FbmSampler(double hurst, std::size_t n_steps, double dt)
    : hurst_(hurst), dt_(dt), n_(n_steps) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("fbm_sample: Hurst index must lie in (0, 1)");
  if (n_steps == 0 || !(dt > 0.0)) throw DomainError("fbm_sample: need n_steps >= 1 and dt > 0");
  std::size_t m = 1;
  while (m < n_steps) m <<= 1;
  for (;; m <<= 1) {
    const std::size_t size = 2 * m;
    std::vector<cplx> c(size);
    for (std::size_t j = 0; j <= m; ++j) {
      const double g = fgn_autocovariance(hurst, static_cast<double>(j));
      c[j] = g;
      if (j > 0 && j < m) c[size - j] = g;
    }
    cached_plan({static_cast<int>(size)}, FftDirection::kForward).execute(c);
    double lo = 0.0, hi = 0.0;
    for (const auto& v : c) {
      lo = std::min(lo, v.real());
      hi = std::max(hi, v.real());
    }
    if (lo >= -1e-10 * hi) {
      sqrt_eig_.resize(size);
      for (std::size_t j = 0; j < size; ++j) {
        sqrt_eig_[j] = std::sqrt(std::max(0.0, c[j].real()) / static_cast<double>(size));
      }
      return;
    }
    if (++enlargements_ > 8) {
      throw NumericalError("fbm_sample: circulant embedding not positive definite after 8 enlargements");
    }
  }
}

FbmPath FbmSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  const std::size_t size = sqrt_eig_.size();
  CounterRng rng(seed, stream_id(StreamTag::kFbm, index));
  std::vector<cplx> z(size);
  for (std::size_t j = 0; j < size; ++j) {
    const auto g = rng.normal_pair();
    z[j] = sqrt_eig_[j] * cplx(g[0], g[1]);
  }
  cached_plan({static_cast<int>(size)}, FftDirection::kForward).execute(z);
  FbmPath p;
  p.hurst = hurst_;
  p.dt = dt_;
  p.seed = seed;
  p.values.resize(n_ + 1);
  const double scale = std::pow(dt_, hurst_);
  double acc = 0.0;
  p.values[0] = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    acc += z[i].real();
    p.values[i + 1] = scale * acc;
  }
  return p;
}

FbmPath fbm_sample(double hurst, std::size_t n_steps, double dt, std::uint64_t seed,
                   std::uint64_t index) {
  return FbmSampler(hurst, n_steps, dt).sample(seed, index);
}

std::vector<cplx> phase_limit_sample(double d_coefficient, const FbmPath& path, cplx zeta0) {
  if (d_coefficient < 0.0) throw DomainError("phase_limit_sample: D must be nonnegative");
  const double a = std::sqrt(d_coefficient);
  std::vector<cplx> out(path.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = zeta0 * std::polar(1.0, a * path.values[i]);
  return out;
}

namespace {

struct LagSums {
  std::vector<double> sum;      // sum of squared increments per lag
  std::vector<double> sum_inc;  // sum of increments per lag
  std::vector<double> count;
};

LagSums lag_sums(const std::vector<double>& x, const std::vector<std::size_t>& lags) {
  LagSums s{std::vector<double>(lags.size()), std::vector<double>(lags.size()),
            std::vector<double>(lags.size())};
  for (std::size_t a = 0; a < lags.size(); ++a) {
    const std::size_t l = lags[a];
    for (std::size_t i = 0; i + l < x.size(); ++i) {
      const double d = x[i + l] - x[i];
      s.sum[a] += d * d;
      s.sum_inc[a] += d;
      s.count[a] += 1.0;
    }
  }
  return s;
}

double slope_of(const std::vector<std::size_t>& lags, const std::vector<double>& ms) {
  std::vector<double> lx, ly;
  for (std::size_t a = 0; a < lags.size(); ++a) {
    if (!(ms[a] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    lx.push_back(std::log(static_cast<double>(lags[a])));
    ly.push_back(std::log(ms[a]));
  }
  return 0.5 * stats::fit_line(lx, ly).slope;
}

}  // namespace

HurstEstimate hurst_estimate(std::span<const std::vector<double>> paths, std::size_t lag_count,
                             std::size_t bootstrap, std::uint64_t seed) {
  if (paths.empty()) throw DomainError("hurst_estimate: no paths");
  if (lag_count < 5) throw DomainError("hurst_estimate: need at least 5 dyadic lags");
  std::size_t len = paths.front().size(), total = 0;
  for (const auto& p : paths) {
    len = std::min(len, p.size());
    total += p.size();
  }
  if (total < 1024) throw DomainError("hurst_estimate: need at least 2^10 samples in the ensemble");

  HurstEstimate est;
  for (std::size_t a = 0; a < lag_count; ++a) est.lags.push_back(std::size_t{1} << a);
  if (est.lags.back() * 2 > len) throw DomainError("hurst_estimate: path too short for the lag range");

  std::vector<LagSums> per_path;
  per_path.reserve(paths.size());
  for (const auto& p : paths) per_path.push_back(lag_sums(p, est.lags));

  auto mean_square = [&](const std::vector<std::size_t>& pick) {
    std::vector<double> ms(est.lags.size(), 0.0), cnt(est.lags.size(), 0.0);
    for (std::size_t i : pick) {
      for (std::size_t a = 0; a < est.lags.size(); ++a) {
        ms[a] += per_path[i].sum[a];
        cnt[a] += per_path[i].count[a];
      }
    }
    for (std::size_t a = 0; a < ms.size(); ++a) ms[a] /= cnt[a];
    return ms;
  };

  std::vector<std::size_t> all(paths.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  est.mean_square = mean_square(all);
  est.kappa = slope_of(est.lags, est.mean_square);

  // Centered increment variance at the smallest lag: zero for a deterministic ramp.
  double s1 = 0.0, s2 = 0.0, n = 0.0;
  for (const auto& ps : per_path) {
    s1 += ps.sum_inc[0];
    s2 += ps.sum[0];
    n += ps.count[0];
  }
  const double centered = s2 / n - (s1 / n) * (s1 / n);
  est.degenerate = !(centered > 1e-12 * (s2 / n)) || !(est.kappa < 0.999);

  if (paths.size() >= 2 && bootstrap > 0) {
    CounterRng rng(seed, stream_id(StreamTag::kTest, 0x4855u));
    std::vector<double> ks;
    std::vector<std::size_t> pick(paths.size());
    for (std::size_t b = 0; b < bootstrap; ++b) {
      for (auto& v : pick) {
        v = std::min(paths.size() - 1,
                     static_cast<std::size_t>(rng.uniform() * static_cast<double>(paths.size())));
      }
      const double k = slope_of(est.lags, mean_square(pick));
      if (std::isfinite(k)) ks.push_back(k);
    }
    if (!ks.empty()) {
      est.ci_low = stats::quantile(ks, 0.025);
      est.ci_high = stats::quantile(ks, 0.975);
    }
  } else {
    est.ci_low = est.ci_high = est.kappa;
  }
  return est;
}

HurstEstimate hurst_estimate(const std::vector<double>& path, std::size_t lag_count) {
  if (path.size() < 1024) throw DomainError("hurst_estimate: need at least 2^10 samples");
  const std::size_t seg = path.size() / 8;
  std::vector<std::vector<double>> parts;
  // Segments only feed the bootstrap; the point estimate uses the whole path.
  for (std::size_t s = 0; s < 8; ++s) {
    parts.emplace_back(path.begin() + static_cast<long>(s * seg),
                       path.begin() + static_cast<long>((s + 1) * seg));
  }
  HurstEstimate whole = hurst_estimate(std::span<const std::vector<double>>(&path, 1), lag_count, 0);
  if (seg >= 1024 && (std::size_t{1} << (lag_count - 1)) * 8 <= seg) {
    const auto boot = hurst_estimate(parts, lag_count);
    whole.ci_low = boot.ci_low;
    whole.ci_high = boot.ci_high;
  }
  return whole;
}

}  // namespace wdl
