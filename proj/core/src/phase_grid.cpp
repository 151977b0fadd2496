#include "wdl/phase_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wdl/errors.hpp"

namespace wdl {
namespace {

// Cubic Lagrange weights for nodes -1, 0, 1, 2 at fractional offset u in [0, 1).
std::array<double, 4> lagrange4(double u) {
  return {-u * (u - 1.0) * (u - 2.0) / 6.0, (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
          -(u + 1.0) * u * (u - 2.0) / 2.0, (u + 1.0) * u * (u - 1.0) / 6.0};
}

}  // namespace

bool PhaseGrid::contains(double xv, double kv) const {
  const bool in_x = x_period > 0.0 || (xv >= x0 && xv <= x_max());
  return in_x && kv >= k0 && kv <= k_max();
}

bool PhaseGrid::operator==(const PhaseGrid& o) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  return nx == o.nx && nk == o.nk && close(x0, o.x0) && close(dx, o.dx) && close(k0, o.k0) &&
         close(dk, o.dk) && close(x_period, o.x_period);
}

std::string provenance_name(LimitProvenance p) {
  switch (p) {
    case LimitProvenance::kNone: return "none";
    case LimitProvenance::kWigner: return "wigner";
    case LimitProvenance::kFracDiffusion: return "frac_diffusion";
    case LimitProvenance::kRadiativeClosedForm: return "radiative_closed_form";
    case LimitProvenance::kStochastic: return "stochastic_wigner";
    case LimitProvenance::kLevyMc: return "levy_mc";
  }
  return "?";
}

WignerGrid WignerGrid::zeros(const PhaseGrid& g, const ScalingRegime& regime) {
  WignerGrid w;
  w.grid = g;
  w.regime = regime;
  w.values.assign(g.size(), 0.0);
  return w;
}

PhaseInterpolator::PhaseInterpolator(const WignerGrid& w, bool zero_outside_k)
    : w_(&w), zero_outside_k_(zero_outside_k) {
  if (w.grid.nx < 4 || w.grid.nk < 4) throw DomainError("PhaseInterpolator: need >= 4 nodes per axis");
}

double PhaseInterpolator::operator()(double x, double k) const {
  const auto& g = w_->grid;
  const double fk = (k - g.k0) / g.dk;
  const auto nk = static_cast<long>(g.nk);
  if (fk < 0.0 || fk > static_cast<double>(nk - 1)) {
    if (zero_outside_k_) return 0.0;
    throw DomainError("PhaseInterpolator: k outside the grid");
  }
  double fx = (x - g.x0) / g.dx;
  const auto nx = static_cast<long>(g.nx);
  const bool periodic = g.x_period > 0.0;
  if (periodic) {
    const double period_nodes = g.x_period / g.dx;
    fx = std::fmod(fx, period_nodes);
    if (fx < 0.0) fx += period_nodes;
  } else if (fx < 0.0 || fx > static_cast<double>(nx - 1)) {
    throw DomainError("PhaseInterpolator: x outside the grid");
  }

  // Stencil base clamped so that non-periodic axes stay inside.
  auto base = [](double f, long n, bool wrap, long& b, double& u) {
    b = static_cast<long>(std::floor(f));
    if (!wrap) b = std::clamp(b, 1l, n - 3);
    u = f - static_cast<double>(b);
  };
  long bx, bk;
  double ux, uk;
  base(fx, nx, periodic, bx, ux);
  base(fk, nk, false, bk, uk);
  const auto wx = lagrange4(ux);
  const auto wk = lagrange4(uk);
  double s = 0.0;
  for (int a = 0; a < 4; ++a) {
    long ix = bx - 1 + a;
    if (periodic) ix = ((ix % nx) + nx) % nx;
    double row = 0.0;
    for (int b = 0; b < 4; ++b) {
      row += wk[b] * w_->at(static_cast<std::size_t>(ix), static_cast<std::size_t>(bk - 1 + b));
    }
    s += wx[a] * row;
  }
  return s;
}

}  // namespace wdl
