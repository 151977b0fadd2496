#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wdl/errors.hpp"
#include "wdl/schrodinger.hpp"
#include "wdl/stats.hpp"
#include "wdl/wigner.hpp"

namespace {

using namespace wdl;
constexpr double kPi = std::numbers::pi;

// Exact free evolution of a modulated Gaussian under d_t phi = i (a/2) phi''.
cplx free_gaussian(double x, double t, double a, double w, double kappa) {
  const cplx s = 1.0 + cplx(0.0, a * t / (w * w));
  const double xm = x - a * kappa * t;
  return std::pow(kPi * w * w, -0.25) / std::sqrt(s) *
         std::exp(-xm * xm / (2.0 * w * w * s) + cplx(0.0, kappa * x - 0.5 * a * kappa * kappa * t));
}

double relative_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

TEST(InitialCondition, ZeroDirectionIsTheEnvelope) {
  const Grid g{1, 256, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const GaussianPacket pk{{}, 1.5};
  const double z = 0.0;
  const auto f = initial_condition(pk, std::span<const double>(&z, 1), r, g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = g.coordinate(i);
    EXPECT_EQ(f.values[i], pk(std::span<const double>(&x, 1)));
  }
}

TEST(InitialCondition, ModulationShiftsTheSpectrumAndKeepsTheNorm) {
  const Grid g{1, 512, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const GaussianPacket pk{{}, 1.0};
  const double z = 0.7;
  const double z0 = 0.0;
  InitialConditionReport rep;
  const auto f = initial_condition(pk, std::span<const double>(&z, 1), r, g, &rep);
  const auto f0 = initial_condition(pk, std::span<const double>(&z0, 1), r, g);
  EXPECT_NEAR(f.mass(), f0.mass(), 1e-14);
  const double kappa = rep.applied[0];
  EXPECT_NEAR(kappa, z / r.correlation_scale(), 0.5 * 2.0 * kPi / g.length);
  const long m = std::lround(kappa * g.length / (2.0 * kPi));
  auto F = f.values, F0 = f0.values;
  cached_plan({static_cast<int>(g.n)}, FftDirection::kForward).execute(F);
  cached_plan({static_cast<int>(g.n)}, FftDirection::kForward).execute(F0);
  for (std::size_t j = 0; j < g.n; ++j) {
    const std::size_t src = (j + g.n - static_cast<std::size_t>(m)) % g.n;
    // the grid origin contributes a constant phase exp(i kappa x0)
    EXPECT_NEAR(std::abs(F[j]), std::abs(F0[src]), 1e-12 * std::abs(F0[0]));
  }
}

TEST(InitialCondition, CarrierBeyondNyquistNamesTheGrid) {
  const Grid g{1, 64, 40.0};
  const ScalingRegime r{0.01, 0.8, 0.4};
  const GaussianPacket pk{{}, 1.0};
  const double z = 3.0;
  try {
    initial_condition(pk, std::span<const double>(&z, 1), r, g);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("grid_N"), std::string::npos);
  }
}

TEST(Propagator, FreeGaussianMatchesClosedForm) {
  const Grid g{1, 1024, 60.0};
  const ScalingRegime r{0.2, 0.8, 0.4};
  const double a = std::pow(r.epsilon, r.s);
  const double w = 1.0, z = 0.5;
  InitialConditionReport rep;
  WaveField f = initial_condition(GaussianPacket{{}, w}, std::span<const double>(&z, 1), r, g, &rep);
  const double kappa = rep.applied[0];
  ZeroPotential v;
  Propagator p(g, r, ModelParams{}, 0.01);
  for (int i = 0; i < 100; ++i) p.step(f, v);
  std::vector<cplx> exact(g.n);
  for (std::size_t i = 0; i < g.n; ++i) exact[i] = free_gaussian(g.coordinate(i), 1.0, a, w, kappa);
  EXPECT_LT(relative_l2(f.values, exact), 1e-8);
}

TEST(Propagator, UnitaryOverThousandRandomSteps) {
  const Grid g{1, 1024, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.0;
  WaveField f = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  const double m0 = f.mass();
  StochasticPotential v(ModeSet::build(params, g, r.wave_scale(), 5));
  Propagator p(g, r, params, 1e-3);
  for (int i = 0; i < 1000; ++i) p.step(f, v);
  EXPECT_LT(std::abs(f.mass() / m0 - 1.0), 1e-10);
}

TEST(Propagator, StrangStepHalvingSlope) {
  const Grid g{1, 512, 40.0};
  const ScalingRegime r{0.3, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.5;
  const WaveField f0 = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  // smooth time-dependent potential: V = cos(y + t)
  auto make = [&] {
    return FunctionPotential(g, r.wave_scale(), [](double t, std::span<const double> y) { return std::cos(0.3 * y[0] + t); });
  };
  std::vector<double> dts, errs;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) {
    WaveField one = f0, two = f0;
    auto v1 = make();
    Propagator p1(g, r, params, dt);
    p1.step(one, v1);
    auto v2 = make();
    Propagator p2(g, r, params, 0.5 * dt);
    p2.step(two, v2);
    p2.step(two, v2);
    dts.push_back(std::log(dt));
    errs.push_back(std::log(relative_l2(one.values, two.values)));
  }
  EXPECT_NEAR(stats::fit_line(dts, errs).slope, 3.0, 0.2);
}

TEST(Propagator, ZeroTimeAndSnapshotSchedule) {
  const Grid g{1, 256, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const double z = 0.0;
  const WaveField f0 = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  ZeroPotential v;
  SolverConfig c;
  c.dt = 0.01;
  c.snapshots = {0.0};
  auto out = propagate(f0, v, ModelParams{}, c);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].values, f0.values);
  c.snapshots = {0.034, 0.1, 0.257};
  out = propagate(f0, v, ModelParams{}, c);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(out[i].time - c.snapshots[i]), 0.5 * c.dt + 1e-12);
}

TEST(Propagator, ReverseFreeFlowRecoversTheField) {
  const Grid g{1, 512, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const double z = 1.0;
  const WaveField f0 = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  Propagator p(g, r, ModelParams{}, 0.01);
  WaveField f = f0;
  p.free_flow(f, 0.8);
  p.free_flow(f, -0.8);
  EXPECT_LT(relative_l2(f.values, f0.values), 1e-10);
}

TEST(Propagator, GaugeCovarianceLeavesWignerUnchanged) {
  const Grid g{1, 512, 40.0};
  const ScalingRegime r{0.2, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.3;
  const WaveField f0 = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  auto base = [](double t, std::span<const double> y) { return 0.3 * std::cos(y[0] + 0.2 * t); };
  FunctionPotential v1(g, r.wave_scale(), base);
  FunctionPotential v2(g, r.wave_scale(), [&](double t, std::span<const double> y) { return base(t, y) + 0.7; });
  WaveField a = f0, b = f0;
  Propagator p1(g, r, params, 0.005), p2(g, r, params, 0.005);
  for (int i = 0; i < 100; ++i) {
    p1.step(a, v1);
    p2.step(b, v2);
  }
  const auto wa = wigner_transform(a), wb = wigner_transform(b);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < wa.values.size(); ++i) {
    worst = std::max(worst, std::abs(wa.values[i] - wb.values[i]));
    scale = std::max(scale, std::abs(wa.values[i]));
  }
  EXPECT_LT(worst, 1e-10 * scale);
  // the phase is global and deterministic
  const cplx ratio = b.values[g.n / 2] / a.values[g.n / 2];
  for (std::size_t i = g.n / 4; i < 3 * g.n / 4; i += 17) {
    if (std::abs(a.values[i]) < 1e-3 * std::abs(a.values[g.n / 2])) continue;
    EXPECT_NEAR(std::abs(b.values[i] / a.values[i] - ratio), 0.0, 1e-9);
  }
}

TEST(Propagator, ShiftEquivariance) {
  const Grid g{1, 256, 40.0};
  const ScalingRegime r{0.2, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.3;
  const std::size_t shift = 9;
  const WaveField f0 = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  WaveField f1 = f0;
  for (std::size_t i = 0; i < g.n; ++i) f1.values[(i + shift) % g.n] = f0.values[i];
  const double dx = g.dx() / r.wave_scale();
  auto pot = [](double t, std::span<const double> y) { return 0.4 * std::sin(0.9 * y[0] - t); };
  FunctionPotential v0(g, r.wave_scale(), pot);
  FunctionPotential v1(g, r.wave_scale(), [&](double t, std::span<const double> y) {
    const double ys = y[0] - static_cast<double>(shift) * dx;
    return pot(t, std::span<const double>(&ys, 1));
  });
  WaveField a = f0, b = f1;
  Propagator p(g, r, params, 0.01), q(g, r, params, 0.01);
  for (int i = 0; i < 50; ++i) {
    p.step(a, v0);
    q.step(b, v1);
  }
  for (std::size_t i = 0; i < g.n; ++i) EXPECT_NEAR(std::abs(b.values[(i + shift) % g.n] - a.values[i]), 0.0, 1e-11);
}

TEST(Propagator, InnerMassStaysInsideTheBox) {
  const Grid g{1, 2048, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.0;
  WaveField f = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  StochasticPotential v(ModeSet::build(params, g, r.wave_scale(), 3));
  Propagator p(g, r, params, 0.0025);
  for (int i = 0; i < 200; ++i) p.step(f, v);
  EXPECT_GT(inner_mass_fraction(f), 1.0 - 1e-6);
}

TEST(Propagator, PhaseWarningWhenPotentialStepTooLarge) {
  const Grid g{1, 128, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const double z = 0.0;
  WaveField f = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  FunctionPotential v(g, r.wave_scale(), [](double, std::span<const double>) { return 5.0; });
  Propagator p(g, r, ModelParams{}, 0.1);
  p.step(f, v);
  EXPECT_EQ(p.diagnostics().phase_warnings, 1u);
}

TEST(Propagator, SuggestedStepKeepsPhasesSmall) {
  const Grid g{1, 1024, 40.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  const double z = 0.5;
  WaveField f = initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
  const double dt = suggest_dt(f, params, 2.0);
  FunctionPotential v(g, r.wave_scale(), [](double, std::span<const double>) { return 2.0; });
  Propagator p(g, r, params, dt);
  p.step(f, v);
  EXPECT_LE(p.diagnostics().max_potential_phase, kPi / 8 + 1e-12);
}

TEST(Directions, PointMassIsConstant) {
  const auto mu = DirectionLaw::point(0.37);
  for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(sample_direction(mu, 1, 3, i)[0], 0.37);
}

TEST(Directions, SampleMeanAndKs) {
  const auto mu = DirectionLaw::gaussian(0.5, 2.0);
  stats::RunningStats s;
  for (std::uint64_t i = 0; i < 10000; ++i) s.add(sample_direction(mu, 1, 17, i)[0]);
  EXPECT_NEAR(s.mean(), 0.5, 4.0 * s.std_error());
  std::vector<double> x(100000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = sample_direction(mu, 1, 19, i)[0];
  EXPECT_GT(stats::ks_one_sample(x, [&](double v) { return mu.cdf(v); }).p_value, 0.01);
  const auto u = DirectionLaw::uniform(-1.0, 0.5);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = sample_direction(u, 1, 23, i)[0];
  EXPECT_GT(stats::ks_one_sample(x, [&](double v) { return u.cdf(v); }).p_value, 0.01);
}

TEST(Directions, DeterministicPerSeed) {
  const auto mu = DirectionLaw::gaussian();
  EXPECT_EQ(sample_direction(mu, 1, 5, 42), sample_direction(mu, 1, 5, 42));
  EXPECT_NE(sample_direction(mu, 1, 5, 42), sample_direction(mu, 1, 6, 42));
}

}  // namespace
