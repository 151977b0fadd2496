#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wdl/brownian.hpp"
#include "wdl/errors.hpp"
#include "wdl/fbm.hpp"
#include "wdl/levy.hpp"
#include "wdl/limit.hpp"
#include "wdl/stats.hpp"

namespace {

using namespace wdl;
constexpr double kPi = std::numbers::pi;

TEST(Fbm, AutocovarianceEdgeCases) {
  EXPECT_DOUBLE_EQ(fgn_autocovariance(0.75, 0.0), 1.0);
  EXPECT_NEAR(fgn_autocovariance(0.5, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(fgn_autocovariance(0.75, 1.0), std::pow(2.0, 0.5) - 1.0, 1e-14);
}

TEST(Fbm, EndpointVarianceAndReproducibility) {
  const double H = 0.7, dt = 0.01;
  const std::size_t n = 256;
  FbmSampler s(H, n, dt);
  stats::RunningStats end;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const auto p = s.sample(17, i);
    ASSERT_EQ(p.values.size(), n + 1);
    ASSERT_EQ(p.values[0], 0.0);
    end.add(p.values[n]);
  }
  const double expect = std::pow(n * dt, 2.0 * H);
  // Var of a sample variance is about 2 sigma^4 / N
  EXPECT_NEAR(end.variance(), expect, 4.0 * expect * std::sqrt(2.0 / 4000.0));
  EXPECT_EQ(s.sample(17, 3).values, s.sample(17, 3).values);
  EXPECT_NE(s.sample(17, 3).values, s.sample(17, 4).values);
}

TEST(Fbm, HurstEstimatorRecoversTheIndex) {
  for (double H : {0.3, 0.5, 0.75}) {
    FbmSampler s(H, 2048, 1.0);
    std::vector<std::vector<double>> paths;
    for (std::uint64_t i = 0; i < 64; ++i) paths.push_back(s.sample(5, i).values);
    const auto est = hurst_estimate(paths, 6, 200, 9);
    EXPECT_NEAR(est.kappa, H, 0.02) << H;
    EXPECT_LE(est.ci_low, est.kappa);
    EXPECT_GE(est.ci_high, est.kappa);
  }
}

TEST(Fbm, PhaseLimitKeepsTheModulus) {
  const auto path = fbm_sample(0.75, 128, 0.01, 3);
  const auto z = phase_limit_sample(1.5, path, cplx(0.6, 0.8));
  for (const auto& v : z) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  EXPECT_EQ(z.front(), cplx(0.6, 0.8));
}

TEST(Fbm, RejectsBadHurst) {
  EXPECT_THROW(FbmSampler(0.0, 16, 1.0), DomainError);
  EXPECT_THROW(FbmSampler(1.0, 16, 1.0), DomainError);
}

TEST(Levy, RateAndMomentComeFromTheKernel) {
  const JumpKernel k(ModelParams{});
  const LevySampler s(k, 1e-3);
  EXPECT_DOUBLE_EQ(s.rate(), k.rate_beyond(1e-3));
  EXPECT_DOUBLE_EQ(s.small_jump_moment(), k.small_jump_moment(1e-3));
}

TEST(Levy, CharacteristicFunctionOfTheEndpoint) {
  const JumpKernel k(ModelParams{});
  const double delta = 1e-2, t = 0.5;
  const LevySampler s(k, delta);
  const std::size_t n = 40000;
  for (double q : {0.5, 2.0}) {
    stats::RunningStats c;
    for (std::uint64_t i = 0; i < n; ++i) c.add(std::cos(q * s.endpoint(t, 21, i).position));
    const double expect = std::exp(t * k.exponent_truncated(q, delta));
    EXPECT_NEAR(c.mean(), expect, 4.0 * c.std_error()) << q;
  }
}

TEST(Levy, JumpCountIsPoisson) {
  const JumpKernel k(ModelParams{});
  const LevySampler s(k, 0.05);
  const double t = 0.3;
  stats::RunningStats c;
  for (std::uint64_t i = 0; i < 20000; ++i) c.add(static_cast<double>(s.endpoint(t, 2, i).jumps));
  EXPECT_NEAR(c.mean(), s.rate() * t, 4.0 * c.std_error());
  EXPECT_NEAR(c.variance(), s.rate() * t, 0.05 * s.rate() * t);
}

TEST(Levy, PathAndEndpointAgree) {
  const JumpKernel k(ModelParams{});
  const LevySampler s(k, 0.05);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto p = s.sample(0.4, 8, i);
    const auto e = s.endpoint(0.4, 8, i);
    EXPECT_NEAR(p.position.back(), e.position, 1e-12);
    EXPECT_NEAR(p.integral.back(), e.integral, 1e-12);
    EXPECT_EQ(p.jump_times.size(), e.jumps);
  }
}

TEST(Levy, McSolutionOfAConstantAndTheBias) {
  const JumpKernel k(ModelParams{});
  const LevySampler s(k, 0.05);
  const ProbePoint probes[] = {{0.0, 0.0}, {1.0, -1.0}};
  const auto r = levy_mc_solution([](double, double) { return 2.5; }, s, 0.5, probes, 100, 4, 1, 1.0, 2.0);
  for (const auto& e : r.estimates) {
    EXPECT_DOUBLE_EQ(e.value, 2.5);
    EXPECT_NEAR(e.std_error, 0.0, 1e-14);
  }
  EXPECT_DOUBLE_EQ(r.bias_bound, levy_bias_bound(1.0, 2.0, 0.5, s.small_jump_moment()));
  EXPECT_DOUBLE_EQ(levy_bias_bound(1.0, 2.0, 0.5, 0.1), 0.5 * 0.1 + 2.0 * 0.25 * 0.1 / 2.0);
}

TEST(Levy, McSolutionIndependentOfJobs) {
  const JumpKernel k(ModelParams{});
  const LevySampler s(k, 0.05);
  auto w0 = [](double x, double kk) { return std::exp(-x * x - kk * kk); };
  const ProbePoint probes[] = {{0.0, 0.0}, {0.5, 0.5}};
  const auto a = levy_mc_solution(w0, s, 0.5, probes, 3000, 4, 1);
  const auto b = levy_mc_solution(w0, s, 0.5, probes, 3000, 4, 3);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a.estimates[i].value, b.estimates[i].value);
}

TEST(Brownian, NodeWeightsIntegrateThePowerLaw) {
  const double theta = 0.5;
  BrownianNodeSpec spec;
  const auto nodes = brownian_nodes(theta, spec);
  double s = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) s += nodes.weights[j] * std::pow(nodes.norm(j), -1.0 - theta);
  const double exact = (std::pow(spec.p_min, -theta) - std::pow(spec.p_max, -theta)) / theta;
  EXPECT_NEAR(s, exact, 1e-10 * exact);
}

TEST(Brownian, TestFunctionVarianceMatchesSamples) {
  const ModelParams p;
  BrownianNodeSpec spec;
  spec.log_cells_low = 40;
  spec.log_cells_high = 80;
  spec.uniform_step = 0.05;
  const auto nodes = brownian_nodes(p.theta(), spec);
  const double times[] = {0.5, 1.0};
  auto phi = [](double q) { return cplx(std::exp(-q * q), 0.0); };
  stats::RunningStats re;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const auto path = brownian_field_sample(p, nodes, times, 6, i);
    re.add(std::norm(pair_with(path, 1, phi)));
  }
  const double v = test_function_variance(nodes, p.theta(), 1.0, phi);
  EXPECT_NEAR(re.mean(), v, 4.0 * re.std_error());
}

TEST(Brownian, StochasticWignerConservesRowNorms) {
  const ModelParams p;
  BrownianNodeSpec spec;
  spec.log_cells_low = 40;
  spec.log_cells_high = 80;
  spec.uniform_step = 0.05;
  const auto nodes = brownian_nodes(p.theta(), spec);
  PhaseGrid g;
  g.nx = 16;
  g.dx = 0.5;
  g.x0 = -4.0;
  g.nk = 256;
  g.dk = 0.1;
  g.k0 = -12.8;
  auto w0 = WignerGrid::zeros(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) w0.at(i, j) = std::exp(-g.x(i) * g.x(i) - g.k(j) * g.k(j));
  }
  const double times[] = {0.5};
  const auto path = brownian_field_sample(p, nodes, times, 1, 0);
  std::vector<std::size_t> rows{0, 5, 8, 15};
  std::vector<double> norms;
  const double gc = brownian_coupling(p, jump_symbol_coefficient(p));
  const auto w = stochastic_wigner_sample(w0, path, 0, gc, rows, &norms);
  ASSERT_EQ(norms.size(), rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double n0 = 0.0;
    for (std::size_t j = 0; j < g.nk; ++j) n0 += w0.at(rows[r], j) * w0.at(rows[r], j);
    EXPECT_NEAR(norms[r], std::sqrt(n0 * g.dk), 1e-10 * norms[r]);
  }
  for (std::size_t j = 0; j < g.nk; ++j) EXPECT_EQ(w.at(1, j), 0.0);
}

TEST(Stats, RunningMomentsAndQuantiles) {
  std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8};
  stats::RunningStats r;
  for (double v : x) r.add(v);
  EXPECT_DOUBLE_EQ(r.mean(), 4.5);
  EXPECT_DOUBLE_EQ(r.variance(), 6.0);
  EXPECT_DOUBLE_EQ(stats::median(x), 4.5);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 1.0), 8.0);
  EXPECT_GT(stats::iqr(x), 0.0);
  const std::vector<double> y{3, 5, 7, 9, 11, 13, 15, 17};
  const auto fit = stats::fit_line(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-13);
  EXPECT_NEAR(stats::correlation(x, y), 1.0, 1e-14);
}

TEST(Stats, DistributionTests) {
  EXPECT_NEAR(stats::normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(stats::normal_cdf(1.96), 0.9750021048517795, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_sf(1.36), 0.0494, 1e-3);
  std::vector<double> u;
  for (int i = 0; i < 1000; ++i) u.push_back((i + 0.5) / 1000.0);
  const auto ks = stats::ks_one_sample(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(ks.statistic, 0.0005, 1e-12);
  EXPECT_GT(ks.p_value, 0.99);
  const double obs[] = {25, 25, 25, 25};
  const double prob[] = {0.25, 0.25, 0.25, 0.25};
  const auto chi = stats::chi_square_gof(obs, prob);
  EXPECT_NEAR(chi.statistic, 0.0, 1e-14);
  EXPECT_EQ(chi.dof, 3);
}

}  // namespace
