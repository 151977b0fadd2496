#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wdl/errors.hpp"
#include "wdl/quadrature.hpp"
#include "wdl/spectrum.hpp"

namespace {

using namespace wdl;

ModelParams defaults() { return ModelParams{}; }

TEST(Spectrum, DerivedExponentsOfDefaults) {
  const auto ex = derived_exponents(defaults());
  EXPECT_DOUBLE_EQ(ex.theta, 0.5);
  EXPECT_DOUBLE_EQ(ex.kappa0, 0.75);
  EXPECT_NEAR(ex.kappa_gamma, 0.75 / 0.875, 1e-15);
}

TEST(Spectrum, DerivedExponentExamples) {
  ModelParams p;
  p.gamma = 0.0;
  EXPECT_DOUBLE_EQ(derived_exponents(p).kappa_gamma, 0.75);
  p.gamma = 0.5;
  EXPECT_NEAR(derived_exponents(p).kappa_gamma, 1.0, 1e-15);
}

TEST(Spectrum, ExponentRangesOnRandomDraws) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0;
  while (accepted < 10000) {
    ModelParams p;
    p.beta = 0.5 * (1.0 - u(gen));
    const double lo = std::max(0.5, 1.0 - p.beta);
    p.alpha = lo + (1.0 - lo) * u(gen);
    p.gamma = u(gen);
    if (!(p.alpha + p.beta > 1.0) || p.alpha >= 1.0 || p.gamma * (p.alpha + p.beta - 1.0) / p.beta >= 1.0) continue;
    ++accepted;
    ASSERT_NO_THROW(p.validate());
    const auto ex = derived_exponents(p);
    ASSERT_GT(ex.theta, 0.0);
    ASSERT_LT(ex.theta, 1.0);
    ASSERT_GT(ex.kappa0, 0.5);
    ASSERT_LT(ex.kappa0, 1.0);
    ASSERT_GE(ex.kappa_gamma, ex.kappa0);
  }
}

TEST(Spectrum, RejectsInvalidParameters) {
  ModelParams p;
  p.alpha = 0.2;  // theta < 0
  EXPECT_THROW(p.validate(), DomainError);
  p = defaults();
  p.nu = 0.0;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(Spectrum, CoherenceScale) {
  EXPECT_NEAR(coherence_scale(0.8, 0.5), 0.4, 1e-15);
  EXPECT_NEAR(coherence_scale(1.0, 0.5), 0.0, 1e-15);
  EXPECT_THROW(coherence_scale(0.5, 0.5), DomainError);
}

TEST(Spectrum, SymmetricInPAndOmega) {
  const auto p = defaults();
  for (double q : {0.1, 0.7, 2.5}) {
    const double a[1] = {q}, b[1] = {-q};
    EXPECT_EQ(spatial_spectrum(p, std::span<const double>(a, 1)), spatial_spectrum(p, std::span<const double>(b, 1)));
    EXPECT_EQ(space_time_spectrum(p, 0.3, q), space_time_spectrum(p, -0.3, q));
  }
}

TEST(Spectrum, SigmaThetaClosedForm) {
  // d = 1, theta = 1/2, a(0) = 1
  EXPECT_NEAR(sigma_theta(defaults()), 1.0 / std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(sphere_moment(1, 0.5), sphere_moment_quadrature(1, 0.5), 1e-12);
  EXPECT_NEAR(sphere_moment(2, 0.5), sphere_moment_quadrature(2, 0.5), 1e-11);
}

TEST(Spectrum, JumpSymbolCoefficient) {
  EXPECT_NEAR(jump_symbol_coefficient(defaults()), 1.595769121605731, 1e-12);
}

TEST(Spectrum, ConstantEnvelopeGivesPurePowerLaw) {
  auto p = defaults();
  p.envelope = Envelope::parse("constant", 1.0);
  const double c = jump_symbol_coefficient(p);
  for (double q : {0.5, 3.0, 40.0}) {
    EXPECT_NEAR(levy_exponent(p, q) / (-c * std::pow(q, 0.5)), 1.0, 1e-8) << q;
  }
}

TEST(Spectrum, LevyExponentFrozenValues) {
  const auto p = defaults();
  const double q[] = {10, 30, 100, 300, 1000};
  const double psi[] = {-3.47315013, -7.17770547, -14.39704319, -26.07920618, -48.90238882};
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(levy_exponent(p, q[i]), psi[i], 2e-8 * std::abs(psi[i])) << q[i];
  EXPECT_EQ(levy_exponent(p, 3.0), levy_exponent(p, -3.0));
}

TEST(Spectrum, CovarianceFrozenValues) {
  const auto p = defaults();
  EXPECT_NEAR(covariance(p, 0.0, 0.0), 0.57703373861647, 1e-10);
  EXPECT_NEAR(covariance(p, 1.0, 0.0), 0.435583796700012, 1e-10);
  EXPECT_NEAR(covariance(p, 0.0, 3.0), 0.273792077323532, 1e-10);
  EXPECT_EQ(covariance(p, 0.5, 1.0), covariance(p, -0.5, -1.0));
}

TEST(Spectrum, SlowTemporalDecay) {
  const auto p = defaults();
  auto R = [&](double t) { return std::abs(covariance(p, t, 0.0)); };
  double prev = 0.0, prev_gain = 0.0;
  double lo = 0.0;
  for (double T : {1e2, 1e3, 1e4}) {
    const double v = prev + quad::gauss_kronrod(R, lo, T, 1e-8).value;
    EXPECT_GT(v, prev);
    if (prev > 0.0) {
      // no sign of saturation: each decade adds at least as much as a tenth of the previous total
      EXPECT_GT(v - prev, 0.1 * prev);
      prev_gain = v - prev;
    }
    prev = v;
    lo = T;
  }
  EXPECT_GT(prev_gain, 0.0);
}

TEST(Spectrum, DCoefficient) {
  EXPECT_NEAR(d_coefficient(defaults()), 1.50450555612735, 1e-9);
  EXPECT_NEAR(d_coefficient(defaults()), d_coefficient_closed_form(defaults()), 1e-9);
}

TEST(Spectrum, JumpKernelTables) {
  const JumpKernel k(defaults());
  EXPECT_NEAR(k.rate_beyond(1e-6), 1271.679296, 1e-5);
  EXPECT_NEAR(k.small_jump_moment(1e-6), 0.00127324, 1e-8);
  EXPECT_GE(k.majorant_constant() * std::pow(0.3, -1.5), k.density(0.3));
}

TEST(Spectrum, LevyRatioAtHundredIsTheEnvelopeCorrection) {
  // Against the generator-consistent constant the ratio approaches 1 as q grows.
  const auto p = defaults();
  const double c = jump_symbol_coefficient(p);
  double prev = 0.0;
  for (double q : {10.0, 100.0, 1000.0}) {
    const double r = levy_exponent(p, q) / (-c * std::sqrt(q));
    EXPECT_GT(r, prev);
    EXPECT_LT(r, 1.0);
    prev = r;
  }
}

}  // namespace
