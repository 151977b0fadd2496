#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wdl/phase_grid.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

/// Per-x multiplier exp(-sigma |q|^theta t) on the periodic dual lattice of the k axis.
WignerGrid frac_diffusion_evolve(const WignerGrid& w0, double sigma, double theta, double t);
WignerGrid frac_diffusion_evolve(const WignerGrid& w0, const ModelParams& params, double t,
                                 SigmaConvention convention = SigmaConvention::kJumpSymbol);

/// Inverse Fourier transform of exp(-sigma |q|^theta t) at k.
double stable_density(double theta, double sigma, double t, double k);

/// Psi(q) on quadratically spaced nodes q_i = q_max (i/n)^2, linear in between,
/// with the exact antiderivative of the interpolant.
class PsiTable {
 public:
  PsiTable(const JumpKernel& kernel, double q_max, std::size_t nodes = 4000, unsigned jobs = 1);
  /// Psi = 0 everywhere.
  static PsiTable zero(double q_max);

  double q_max() const { return q_max_; }
  double operator()(double q) const;
  /// int_0^q Psi.
  double antiderivative(double q) const;
  /// int_0^t Psi(q + u y) du.
  double time_integral(double q, double y, double t) const;

 private:
  PsiTable() = default;
  double locate(double q_abs, std::size_t& i) const;

  double q_max_ = 0.0;
  std::vector<double> nodes_, values_, cumulative_;
};

/// Smallest table extent that covers {q + u y : u in [0, t]} for the grid's frequencies.
double required_psi_extent(const PhaseGrid& grid, double t);

/// W(t) = F^{-1}[ exp(int_0^t Psi(q + u y) du) F[W0(x - t k, k)] ].  W0 is taken
/// periodic in x and k.  `imag_residue` receives max|Im| / max|Re|.
WignerGrid radiative_closed_form(const WignerGrid& w0, const PsiTable& psi, double t,
                                 double* imag_residue = nullptr);

/// Discrete seminorms |W|_{H^m}, m = 0..max_order, from the 2-d DFT (spectral weights
/// (y^2 + q^2)^m).
std::vector<double> sobolev_seminorms(const WignerGrid& w, int max_order = 4);

/// L2 norm of the Fourier content with y^2 + q^2 > cut^2.
double high_frequency_norm(const WignerGrid& w, double cut);

struct RegularityRow {
  double t = 0.0;
  std::vector<double> seminorms;
  double tail_norm = 0.0;
  double transport_tail_norm = 0.0;  // same tail under Psi = 0
};

/// Closed-form solutions at the given times with their seminorm tables.
std::vector<RegularityRow> regularity_probe(const WignerGrid& w0, const PsiTable& psi,
                                            std::span<const double> times, double tail_cut);

}  // namespace wdl
