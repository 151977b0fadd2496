#include "wdl/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "wdl/errors.hpp"

namespace wdl::quad {

namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 31-point Kronrod panel.  The integrand is mapped to [-1, 1] first: the
// library's own error estimate is not scale-aware on short intervals.
Panel kronrod_panel(const Integrand& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto g = [&](double u) { return f(mid + half * u); };
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, -1.0, 1.0, 0, 0.0, &err);
  return {a, b, half * v, std::abs(half) * err};
}

}  // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, double rel_tol,
                     unsigned max_depth) {
  Result r;
  if (a == b) return r;
  std::priority_queue<Panel> heap;
  heap.push(kronrod_panel(f, a, b));
  double value = heap.top().value, error = heap.top().error;
  const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 16u);
  while (error > rel_tol * std::abs(value) && error > 1e-300 && heap.size() < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod_panel(f, worst.a, mid);
    const Panel right = kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // re-sum to drop the drift of the incremental updates
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  r.value = value;
  r.error = error;
  return r;
}

Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol) {
  Result r;
  if (a == b) return r;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &l1);
  return r;
}

Result exp_sinh(const Integrand& f, double a, double rel_tol) {
  Result r;
  thread_local boost::math::quadrature::exp_sinh<double> integrator(12);
  double l1 = 0.0;
  r.value = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol,
                                 &r.error, &l1);
  return r;
}

Result panels(const Integrand& f, double a, double b, double panel, double rel_tol) {
  Result total;
  if (b <= a) return total;
  if (!(panel > 0.0) || !std::isfinite(panel)) panel = b - a;
  const auto count = static_cast<long>(std::ceil((b - a) / panel));
  // Kahan summation: long oscillatory sums cancel heavily.
  double comp = 0.0;
  for (long i = 0; i < count; ++i) {
    const double lo = a + static_cast<double>(i) * panel;
    const double hi = std::min(b, lo + panel);
    const Result piece = gauss_kronrod(f, lo, hi, rel_tol, 10);
    const double y = piece.value - comp;
    const double t = total.value + y;
    comp = (t - total.value) - y;
    total.value = t;
    total.error += piece.error;
  }
  return total;
}

Result singular_power(const Integrand& g, double c, double lo, double hi, double panel,
                      double rel_tol) {
  Result total;
  if (hi <= lo) return total;
  const double split = std::min(hi, 1.0);
  if (lo < split) {
    const double m = 1.0 / (1.0 - c);
    auto mapped = [&](double u) {
      const double r = std::pow(u, m);
      return m * g(r);
    };
    const double u_lo = std::pow(lo, 1.0 - c);
    const double u_hi = std::pow(split, 1.0 - c);
    const Result near = gauss_kronrod(mapped, u_lo, u_hi, rel_tol, 20);
    total.value += near.value;
    total.error += near.error;
  }
  const double start = std::max(lo, split);
  if (hi > start) {
    auto plain = [&](double r) { return std::pow(r, -c) * g(r); };
    const Result far = panels(plain, start, hi, panel, rel_tol);
    total.value += far.value;
    total.error += far.error;
  }
  return total;
}

const Result& require(const Result& r, double rel_tol, double abs_floor, const char* what) {
  if (!std::isfinite(r.value) || r.error > rel_tol * std::abs(r.value) + abs_floor) {
    std::ostringstream msg;
    msg << what << ": quadrature did not converge (value " << r.value << ", error estimate "
        << r.error << ")";
    throw NumericalError(msg.str());
  }
  return r;
}

}  // namespace wdl::quad
