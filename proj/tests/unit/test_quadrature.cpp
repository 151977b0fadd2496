#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wdl/errors.hpp"
#include "wdl/quadrature.hpp"

namespace {

using namespace wdl;
constexpr double kPi = std::numbers::pi;

TEST(Quadrature, GaussKronrodSmoothAndPeaked) {
  EXPECT_NEAR(quad::gauss_kronrod([](double x) { return std::sin(x); }, 0.0, kPi).value, 2.0, 1e-13);
  // narrow Lorentzian forces refinement
  const double w = 1e-4;
  auto f = [w](double x) { return w / (x * x + w * w); };
  EXPECT_NEAR(quad::gauss_kronrod(f, -1.0, 1.0, 1e-12, 30).value, 2.0 * std::atan(1.0 / w), 1e-9);
}

TEST(Quadrature, EndpointSingularities) {
  // int_0^1 x^{-1/2} = 2
  EXPECT_NEAR(quad::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0).value, 2.0, 1e-10);
  // int_0^inf e^{-x} x^{-1/2} = sqrt(pi)
  EXPECT_NEAR(quad::exp_sinh([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0).value, std::sqrt(kPi), 1e-10);
  // int_0^10 r^{-0.7} cos r
  const auto r = quad::singular_power([](double x) { return std::cos(x); }, 0.7, 0.0, 10.0, 1.0);
  const auto ref = quad::tanh_sinh([](double x) { return std::pow(x, -0.7) * std::cos(x); }, 0.0, 10.0, 1e-13);
  EXPECT_NEAR(r.value, ref.value, 1e-9);
}

TEST(Quadrature, PanelsOnOscillatoryIntegrand) {
  // int_0^{200 pi} sin^2 x = 100 pi
  const auto r = quad::panels([](double x) { return std::sin(x) * std::sin(x); }, 0.0, 200.0 * kPi, kPi);
  EXPECT_NEAR(r.value, 100.0 * kPi, 1e-9);
}

TEST(Quadrature, RequireThrowsOnLooseResult) {
  quad::Result r{1.0, 0.5};
  EXPECT_THROW(quad::require(r, 1e-8, 0.0, "test"), NumericalError);
  quad::Result ok{1.0, 1e-12};
  EXPECT_NO_THROW(quad::require(ok, 1e-8, 0.0, "test"));
}

}  // namespace
