#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wdl/field.hpp"
#include "wdl/phase_grid.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

/// One-sided node set for the Brownian field: log-spaced cells on [p_min, p_lo],
/// uniform cells of width `uniform_step` on [p_lo, p_hi], log-spaced on
/// [p_hi, p_max].  Weights are chosen so that w_j |p_j|^{-d-theta} equals the
/// exact cell integral of |p|^{-d-theta}.  d = 1.
struct BrownianNodeSpec {
  double p_min = 1e-5;
  double p_lo = 5e-3;
  double uniform_step = 5e-3;
  double p_hi = 20.0;
  double p_max = 1e5;
  std::size_t log_cells_low = 200;
  std::size_t log_cells_high = 800;
};
SpectralNodes brownian_nodes(double theta, const BrownianNodeSpec& spec = {});

/// Per-node complex Brownian paths B_j(t_i) with E|B_j(t)|^2 = t w_j / |p_j|^{d+theta};
/// the partner node -p_j carries conj(B_j).
struct BrownianFieldPath {
  SpectralNodes nodes;
  double theta = 0.5;
  std::vector<double> times;
  std::vector<std::vector<cplx>> values;  // [time][node]

  double variance_density(std::size_t j) const;
};

BrownianFieldPath brownian_field_sample(const ModelParams& params, const SpectralNodes& nodes,
                                        std::span<const double> times, std::uint64_t seed,
                                        std::uint64_t index = 0);

/// B_t(phi) = sum over +-p_j of B(p) phi(p) for the snapshot `time_index`.
cplx pair_with(const BrownianFieldPath& path, std::size_t time_index,
               const std::function<cplx(double)>& phi);
/// t * sum over +-p_j of w_j |phi(p_j)|^2 / |p_j|^{d+theta}.
double test_function_variance(const SpectralNodes& nodes, double theta, double t,
                              const std::function<cplx(double)>& phi);

/// Coupling g with E exp(i g Phi) = exp(-sigma |q|^theta t), Phi the phase below.
double brownian_coupling(const ModelParams& params, double sigma);

/// Random Wigner limit at time index `ti` along x rows `rows` of W0:
///   W(x, k) = F_q^{-1}[ exp(i g (F(x - q/2) - F(x + q/2))) F_k[W0](x, q) ],
///   F(z) = sum_j 2 Re(B_j e^{i p_j z}).
/// Rows not listed are zero.  `row_norms` receives per-row L2 norms in k.
WignerGrid stochastic_wigner_sample(const WignerGrid& w0, const BrownianFieldPath& path,
                                    std::size_t ti, double coupling,
                                    std::span<const std::size_t> rows,
                                    std::vector<double>* row_norms = nullptr);

}  // namespace wdl
