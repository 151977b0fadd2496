#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wdl/fft.hpp"
#include "wdl/grid.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

/// Positive-half representatives p_j (flattened, d per node) and cell weights w_j.
/// The partner -p_j is implicit.
struct SpectralNodes {
  int d = 1;
  std::vector<double> wavevectors;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double norm(std::size_t j) const;
};

/// Hermitian-symmetric set of OU-driven Fourier modes of the potential.
///
/// Modes sit on the dual lattice of `grid`, rescaled by `wavenumber_scale`:
/// microscopic p = wavenumber_scale * 2 pi m / L.  Entries come in pairs:
/// index 2j holds p_j and 2j+1 holds -p_j.  The field is V(x) = sum_j V_j e^{i p_j . x}
/// with E|V_j|^2 = (2pi)^{-d} int_cell R0, so that E[V^2] approximates R(0,0).
class ModeSet {
 public:
  static ModeSet build(const ModelParams& params, const Grid& grid, double wavenumber_scale,
                       double p_min, double p_max, std::uint64_t seed);
  /// Default band: fundamental lattice mode up to min(Nyquist, envelope support).
  static ModeSet build(const ModelParams& params, const Grid& grid, double wavenumber_scale,
                       std::uint64_t seed);

  std::size_t size() const { return states_.size(); }
  std::size_t pair_count() const { return states_.size() / 2; }
  int dimension() const { return grid_.d; }

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  double wavenumber_scale() const { return scale_; }
  double lattice_spacing() const;
  std::uint64_t seed() const { return seed_; }
  double time() const { return time_; }

  /// Pair representative p_j for both 2j and 2j+1; the partner's vector is -p_j.
  std::span<const double> wavevector(std::size_t mode) const;
  double wavenumber_norm(std::size_t mode) const { return norms_[mode / 2]; }
  std::span<const long> lattice_index(std::size_t mode) const;
  double weight(std::size_t /*mode*/) const { return weight_; }
  double gap(std::size_t mode) const { return gaps_[mode / 2]; }
  double stationary_variance(std::size_t mode) const { return var_[mode / 2]; }

  std::vector<cplx>& states() { return states_; }
  const std::vector<cplx>& states() const { return states_; }
  /// Per-pair variance table; exposed for fault-injection tests.
  std::vector<double>& stationary_variances() { return var_; }

  /// Exact OU update of every pair over dt (microscopic time units).
  void advance(double dt);
  /// Fresh stationary draw of every pair from the seed's init stream at draw index `draw`.
  void redraw(std::uint64_t draw);
  /// Same modes under a new seed: clock reset and a fresh stationary draw.
  /// Equivalent to build() with `seed`, without recomputing the variance tables.
  void reseed(std::uint64_t seed);

  /// Copy restricted to the given pair indices.
  ModeSet subset(std::span<const std::size_t> pairs) const;
  SpectralNodes nodes() const;

  /// Throws on a violation of V(-p) = conj V(p).
  void check_symmetry(double rel_tol = 1e-14) const;

 private:
  ModelParams params_{};
  Grid grid_{};
  double scale_ = 1.0;
  std::uint64_t seed_ = 0;
  double time_ = 0.0;
  std::uint64_t steps_ = 0;
  double weight_ = 0.0;
  std::vector<double> wavevectors_;  // pair-major, d per pair
  std::vector<long> indices_;        // pair-major, d per pair
  std::vector<std::uint64_t> ids_;
  std::vector<double> norms_;
  std::vector<double> gaps_;
  std::vector<double> var_;
  std::vector<cplx> states_;
};

/// V on the grid (real), by inverse DFT of the mode states.
std::vector<double> evaluate(const ModeSet& modes);
void evaluate(const ModeSet& modes, std::vector<double>& out);

/// Sum_j w_j R0(p_j)/g(p_j) over all modes; diverges like p_min^{-theta}.
double long_range_sum(const ModeSet& modes);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Space-time lag: offset in snapshot steps and grid shift per axis.
struct Lag {
  std::size_t time_steps = 0;
  std::vector<long> shift;
};

/// Streaming estimator of E[V(s+t, y+x) V(s, y)].  Each realization contributes one
/// sample: the average over all base times and all grid translates.
class CovarianceAccumulator {
 public:
  CovarianceAccumulator(Grid grid, std::vector<Lag> lags);
  /// `series` holds snapshots at equally spaced times.
  void add(const std::vector<std::vector<double>>& series);
  /// One realization's per-lag averages, as computed by add().
  std::vector<double> lag_means(const std::vector<std::vector<double>>& series) const;
  void add_sample(const std::vector<double>& lag_means);
  std::vector<Estimate> estimates() const;
  std::size_t realizations() const { return count_; }

 private:
  Grid grid_;
  std::vector<Lag> lags_;
  std::size_t count_ = 0;
  std::vector<double> mean_, m2_;
};

std::vector<Estimate> empirical_covariance(
    const std::vector<std::vector<std::vector<double>>>& ensemble, const Grid& grid,
    const std::vector<Lag>& lags);

}  // namespace wdl
