#pragma once

#include <functional>

namespace wdl::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (31 point) on a finite interval.
Result gauss_kronrod(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                     unsigned max_depth = 18);
/// tanh-sinh on a finite interval; tolerates integrable endpoint singularities.
Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-12);
/// exp-sinh on [a, inf).
Result exp_sinh(const Integrand& f, double a, double rel_tol = 1e-12);

/// int_a^b f over consecutive panels of width `panel` (oscillatory integrands).
Result panels(const Integrand& f, double a, double b, double panel, double rel_tol = 1e-12);

/// int_lo^hi r^{-c} g(r) dr for 0 <= lo, c < 1, g smooth.  The piece below r = 1
/// is mapped by r = u^{1/(1-c)} to remove the endpoint singularity; the rest is
/// integrated in panels of width `panel`.
Result singular_power(const Integrand& g, double c, double lo, double hi, double panel,
                      double rel_tol = 1e-12);

/// Throws NumericalError if the error estimate exceeds rel_tol * |value| + abs_floor.
const Result& require(const Result& r, double rel_tol, double abs_floor, const char* what);

}  // namespace wdl::quad
