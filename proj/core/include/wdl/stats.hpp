#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace wdl::stats {

class RunningStats {
 public:
  void add(double x);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased
  double std_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);
double iqr(std::vector<double> x);
double correlation(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Kolmogorov limiting survival function P(K > x).
double kolmogorov_sf(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};
/// Pearson test of observed counts against expected probabilities; bins with
/// expected count below `min_expected` are pooled into their neighbours.
ChiSquareResult chi_square_gof(std::span<const double> observed,
                               std::span<const double> probabilities, double min_expected = 5.0);

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);

}  // namespace wdl::stats
