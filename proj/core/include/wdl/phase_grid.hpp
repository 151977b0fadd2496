#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wdl/spectrum.hpp"

namespace wdl {

/// Uniform (x, k) lattice; values are stored x-major: index = i * nk + j.
struct PhaseGrid {
  double x0 = 0.0, dx = 1.0;
  std::size_t nx = 0;
  double k0 = 0.0, dk = 1.0;
  std::size_t nk = 0;
  /// Period in x when the x-axis samples a periodic box (0 = not periodic).
  double x_period = 0.0;

  std::size_t size() const { return nx * nk; }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
  double k(std::size_t j) const { return k0 + static_cast<double>(j) * dk; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nk + j; }
  double cell_area() const { return dx * dk; }
  double x_max() const { return x(nx - 1); }
  double k_max() const { return k(nk - 1); }
  bool contains(double x, double k) const;
  bool operator==(const PhaseGrid& o) const;
};

enum class LimitProvenance { kNone, kWigner, kFracDiffusion, kRadiativeClosedForm, kStochastic, kLevyMc };
std::string provenance_name(LimitProvenance p);

/// Real phase-space array: a Wigner transform or a limit-model solution.
struct WignerGrid {
  PhaseGrid grid;
  ScalingRegime regime;
  double time = 0.0;
  LimitProvenance provenance = LimitProvenance::kNone;
  std::vector<double> values;

  double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  static WignerGrid zeros(const PhaseGrid& g, const ScalingRegime& regime = {});
};

/// Bicubic Lagrange interpolation of a WignerGrid.  x wraps when the grid is
/// periodic; outside the k range the value is zero if `zero_outside_k`, else an
/// error.
class PhaseInterpolator {
 public:
  explicit PhaseInterpolator(const WignerGrid& w, bool zero_outside_k = true);
  double operator()(double x, double k) const;

 private:
  const WignerGrid* w_;
  bool zero_outside_k_;
};

}  // namespace wdl
