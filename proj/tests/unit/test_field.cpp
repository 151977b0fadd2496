#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wdl/errors.hpp"
#include "wdl/field.hpp"
#include "wdl/quadrature.hpp"
#include "wdl/stats.hpp"

namespace {

using namespace wdl;

TEST(ModeSet, PairsAreHermitianPartners) {
  const Grid g{1, 512, 40.0};
  const auto ms = ModeSet::build(ModelParams{}, g, 0.5, 7);
  ASSERT_EQ(ms.size() % 2, 0u);
  for (std::size_t j = 0; j < ms.size(); j += 2) {
    EXPECT_EQ(ms.wavevector(j)[0], ms.wavevector(j + 1)[0]);
    EXPECT_GT(ms.wavevector(j)[0], 0.0);
    EXPECT_EQ(ms.states()[j], std::conj(ms.states()[j + 1]));
  }
  EXPECT_NO_THROW(ms.check_symmetry());
  auto bad = ms;
  bad.states()[2] *= 1.5;
  EXPECT_THROW(bad.check_symmetry(), NumericalError);
}

TEST(ModeSet, PotentialIsRealAndAdvanceKeepsSymmetry) {
  const Grid g{1, 256, 40.0};
  auto ms = ModeSet::build(ModelParams{}, g, 1.0, 11);
  for (int i = 0; i < 20; ++i) ms.advance(0.1);
  EXPECT_NO_THROW(ms.check_symmetry());
  EXPECT_NEAR(ms.time(), 2.0, 1e-12);
  const auto v = evaluate(ms);
  ASSERT_EQ(v.size(), g.n);
  for (double x : v) EXPECT_TRUE(std::isfinite(x));
}

TEST(ModeSet, RejectsBadBands) {
  const Grid g{1, 256, 40.0};
  EXPECT_THROW(ModeSet::build(ModelParams{}, g, 1.0, 0.0, 1.0, 1), DomainError);
  EXPECT_THROW(ModeSet::build(ModelParams{}, g, 1.0, 1.0, 0.5, 1), DomainError);
  EXPECT_THROW(ModeSet::build(ModelParams{}, g, -1.0, 1), DomainError);
}

TEST(ModeSet, ReseedMatchesAFreshBuild) {
  const Grid g{1, 256, 40.0};
  auto a = ModeSet::build(ModelParams{}, g, 1.0, 3);
  a.advance(0.7);
  a.reseed(99);
  const auto b = ModeSet::build(ModelParams{}, g, 1.0, 99);
  EXPECT_EQ(a.states(), b.states());
  EXPECT_EQ(a.time(), 0.0);
  a.advance(0.3);
  auto c = b;
  c.advance(0.3);
  EXPECT_EQ(a.states(), c.states());
}

TEST(ModeSet, StepsAreReproducibleAndSplitInvariantInLaw) {
  const Grid g{1, 128, 40.0};
  auto a = ModeSet::build(ModelParams{}, g, 1.0, 5);
  auto b = ModeSet::build(ModelParams{}, g, 1.0, 5);
  for (int i = 0; i < 10; ++i) {
    a.advance(0.05);
    b.advance(0.05);
  }
  EXPECT_EQ(a.states(), b.states());
}

TEST(ModeSet, VarianceMatchesCellIntegral) {
  const Grid g{1, 256, 40.0};
  const auto ms = ModeSet::build(ModelParams{}, g, 1.0, 1);
  double total = 0.0, p_top = 0.0;
  for (std::size_t j = 0; j < ms.size(); ++j) {
    total += ms.stationary_variance(j);
    p_top = std::max(p_top, ms.wavenumber_norm(j));
  }
  // the cells tile h/2 < |p| < p_top + h/2; the p = 0 cell is excluded
  const double h = ms.lattice_spacing();
  auto r0 = [](double p) { return spatial_spectrum(ModelParams{}, p); };
  const double centre = 2.0 * quad::tanh_sinh(r0, 0.0, 0.5 * h).value / (2.0 * std::numbers::pi);
  const double top = 2.0 * quad::gauss_kronrod(r0, p_top + 0.5 * h, 40.0).value / (2.0 * std::numbers::pi);
  EXPECT_NEAR(total, 0.57703373861647 - centre - top, 1e-9);
}

TEST(ModeSet, LongRangeSumDivergesWithExponentTheta) {
  // lattice spacing 1e-5 so the Riemann sums resolve p near p_min
  const double L = 2.0 * std::numbers::pi * 1e5;
  const Grid g{1, 1u << 17, L};
  const ModelParams p;
  auto sum = [&](double p_min) { return long_range_sum(ModeSet::build(p, g, 1.0, p_min, 0.2, 1)); };
  const double s1 = sum(1e-3), s2 = sum(1e-2), s3 = sum(1e-1);
  const double ratio = (s1 - s2) / (s2 - s3);
  const double slope = std::log10(ratio);
  EXPECT_NEAR(slope, p.theta(), 0.05 * p.theta());
}

TEST(CovarianceAccumulator, ConstantSeriesGivesItsSquare) {
  const Grid g{1, 16, 16.0};
  CovarianceAccumulator acc(g, {Lag{0, {0}}, Lag{1, {3}}});
  std::vector<std::vector<double>> series(4, std::vector<double>(g.n, 2.0));
  acc.add(series);
  acc.add(series);
  const auto est = acc.estimates();
  EXPECT_DOUBLE_EQ(est[0].value, 4.0);
  EXPECT_DOUBLE_EQ(est[1].value, 4.0);
  EXPECT_EQ(acc.realizations(), 2u);
}

TEST(CovarianceAccumulator, ShiftedCosine) {
  const Grid g{1, 64, 64.0};
  CovarianceAccumulator acc(g, {Lag{0, {0}}, Lag{0, {8}}, Lag{0, {16}}});
  std::vector<std::vector<double>> series(1, std::vector<double>(g.n));
  const double k = 2.0 * std::numbers::pi / 32.0;
  for (std::size_t i = 0; i < g.n; ++i) series[0][i] = std::cos(k * static_cast<double>(i));
  acc.add(series);
  acc.add(series);
  const auto est = acc.estimates();
  EXPECT_NEAR(est[0].value, 0.5, 1e-14);
  EXPECT_NEAR(est[1].value, 0.0, 1e-14);
  EXPECT_NEAR(est[2].value, -0.5, 1e-14);
}

}  // namespace
