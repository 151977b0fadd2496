#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace wdl {

/// Periodic cubic box [-L/2, L/2)^d sampled with n points per dimension,
/// stored row-major.
struct Grid {
  int d = 1;
  std::size_t n = 256;
  double length = 40.0;

  std::size_t size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= n;
    return s;
  }
  double dx() const { return length / static_cast<double>(n); }
  double coordinate(std::size_t i) const { return -0.5 * length + static_cast<double>(i) * dx(); }
  /// Signed FFT index of position i along one axis.
  long frequency_index(std::size_t i) const {
    const auto ni = static_cast<long>(n);
    const auto ii = static_cast<long>(i);
    return ii < ni / 2 ? ii : ii - ni;
  }
  double wavenumber(std::size_t i) const {
    return 2.0 * std::numbers::pi * static_cast<double>(frequency_index(i)) / length;
  }
  double nyquist() const { return std::numbers::pi / dx(); }
  double cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= dx();
    return v;
  }
  bool operator==(const Grid& o) const { return d == o.d && n == o.n && length == o.length; }
};

}  // namespace wdl
