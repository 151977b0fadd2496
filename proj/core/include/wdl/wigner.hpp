#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "wdl/phase_grid.hpp"
#include "wdl/schrodinger.hpp"

namespace wdl {

struct WignerOptions {
  /// Keep every x_stride-th x row (the k axis is always complete).
  std::size_t x_stride = 1;
  /// Largest tolerated fraction of spectral mass above half the Nyquist wavenumber.
  double alias_tolerance = 1e-6;
};

/// Phase grid of the discrete transform of a field on `grid` at correlation scale h:
/// x rows at grid points, k_j = (j - N/2) pi h / L.
PhaseGrid wigner_phase_grid(const Grid& grid, double h, std::size_t x_stride = 1);

/// W(x_n, k_j) = (2pi)^{-1} (2 dx / h) sum_m e^{i k_j 2 m dx / h} phi_{n-m} conj(phi_{n+m}),
/// h = eps^(s - s_c), indices periodic.  d = 1 only.
/// `imag_residue` receives max|Im| / max|Re| before the imaginary part is dropped.
WignerGrid wigner_transform(const WaveField& field, const WignerOptions& options = {},
                            double* imag_residue = nullptr);

/// Fraction of the field's spectral mass above half the Nyquist wavenumber.
double alias_fraction(const WaveField& field);

/// Weighted running mean of Wigner grids on a common phase grid.
class WignerAccumulator {
 public:
  void add(const WignerGrid& w, double weight = 1.0);
  std::size_t count() const { return n_; }
  WignerGrid mean() const;

 private:
  WignerGrid sum_;
  double weight_ = 0.0;
  std::size_t n_ = 0;
};

WignerGrid mixture_average(std::span<const WignerGrid> samples);

/// Limit initial datum: |phi0|^2 mu(k) when s_c < s, the mu-averaged Wigner
/// transform of phi0 when s_c = s.
WignerGrid initial_wigner(const InitialEnvelope& phi0, const DirectionLaw& mu,
                          const ScalingRegime& regime, const Grid& grid,
                          std::size_t x_stride = 1);

/// Wigner transform of phi0 exp(i zeta x / h) averaged over zeta ~ mu, computed
/// exactly by damping each lag with the characteristic function of mu.
WignerGrid mixed_wigner(const InitialEnvelope& phi0, const DirectionLaw& mu,
                        const ScalingRegime& regime, const Grid& grid,
                        const WignerOptions& options = {});

std::vector<double> k_marginal(const WignerGrid& w);
double l2_norm(const WignerGrid& w);
double total_mass(const WignerGrid& w);

/// CSV of the k-profile at the x row nearest to `x`: columns k,w.
void write_slice_csv(std::ostream& os, const WignerGrid& w, double x);

}  // namespace wdl
