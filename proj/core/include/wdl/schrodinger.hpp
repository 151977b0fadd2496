#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wdl/fft.hpp"
#include "wdl/field.hpp"
#include "wdl/grid.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

struct WaveField {
  Grid grid;
  ScalingRegime regime;
  double time = 0.0;
  std::vector<cplx> values;

  /// sum |phi|^2 dx^d
  double mass() const;
  double l2_norm() const;
};

/// Normalized Gaussian packet (pi w^2)^{-d/4} exp(-|x - c|^2 / (2 w^2)).
struct GaussianPacket {
  std::vector<double> center;  // empty = origin
  double width = 1.0;

  cplx operator()(std::span<const double> x) const;
};

using InitialEnvelope = std::function<cplx(std::span<const double>)>;

/// Law of the initial direction zeta.  Isotropic in d = 2.
struct DirectionLaw {
  enum class Kind { kGaussian, kPoint, kUniform };
  Kind kind = Kind::kGaussian;
  double mean = 0.0;   // gaussian mean / point location / uniform centre
  double scale = 1.0;  // gaussian sd / uniform half-width

  static DirectionLaw gaussian(double mean = 0.0, double sd = 1.0) {
    return {Kind::kGaussian, mean, sd};
  }
  static DirectionLaw point(double z) { return {Kind::kPoint, z, 0.0}; }
  static DirectionLaw uniform(double centre, double half_width) {
    return {Kind::kUniform, centre, half_width};
  }

  bool is_point() const { return kind == Kind::kPoint; }
  /// Density of one coordinate (d = 1); undefined for a point mass.
  double density(double z) const;
  double cdf(double z) const;
  /// Characteristic function E exp(i y zeta), one coordinate.
  cplx characteristic(double y) const;
  std::string name() const;
};

/// Draw `index` of the direction stream for `seed`.
std::vector<double> sample_direction(const DirectionLaw& mu, int d, std::uint64_t seed,
                                     std::uint64_t index);

struct InitialConditionReport {
  std::vector<double> requested;  // zeta / eps^(s - s_c)
  std::vector<double> applied;    // nearest dual-lattice wavenumber
};

/// phi(x) = phi0(x) exp(i zeta.x / eps^(s - s_c)), with the carrier rounded to the
/// dual lattice of the grid.
WaveField initial_condition(const InitialEnvelope& phi0, std::span<const double> zeta,
                            const ScalingRegime& regime, const Grid& grid,
                            InitialConditionReport* report = nullptr);

/// V on the grid at a given microscopic time.  Calls come with non-decreasing times.
class PotentialSource {
 public:
  virtual ~PotentialSource() = default;
  virtual void sample(double micro_time, std::vector<double>& out) = 0;
};

class ZeroPotential final : public PotentialSource {
 public:
  void sample(double, std::vector<double>& out) override;
};

/// OU modes with wavenumber_scale eps^s, evaluated on their own grid.
class StochasticPotential final : public PotentialSource {
 public:
  explicit StochasticPotential(ModeSet modes) : modes_(std::move(modes)) {}
  void sample(double micro_time, std::vector<double>& out) override;
  const ModeSet& modes() const { return modes_; }

 private:
  ModeSet modes_;
};

/// V(t, y) as a function of microscopic time and position y = x / eps^s.
class FunctionPotential final : public PotentialSource {
 public:
  using Fn = std::function<double(double, std::span<const double>)>;
  FunctionPotential(Grid grid, double wave_scale, Fn fn)
      : grid_(grid), wave_scale_(wave_scale), fn_(std::move(fn)) {}
  void sample(double micro_time, std::vector<double>& out) override;

 private:
  Grid grid_;
  double wave_scale_;
  Fn fn_;
};

struct SolverConfig {
  double dt = 1e-3;
  std::vector<double> snapshots;  // output times; T is the last one
  bool fuse_kinetic = true;
};

struct StepDiagnostics {
  std::size_t steps = 0;
  std::size_t phase_warnings = 0;  // steps with potential phase above pi/4
  double max_potential_phase = 0.0;
  double max_kinetic_phase = 0.0;
};

/// Strang splitting for
///   d_t phi = i (eps^s / 2) Lap phi - i eps^((1-gamma)/2 - s) V(t / eps^(s+gamma), x / eps^s) phi
/// with the potential frozen at the step midpoint.
class Propagator {
 public:
  Propagator(const Grid& grid, const ScalingRegime& regime, const ModelParams& params, double dt);

  double dt() const { return dt_; }
  const StepDiagnostics& diagnostics() const { return diag_; }

  /// One full kinetic-potential-kinetic step.
  void step(WaveField& field, PotentialSource& potential);
  /// Steps until the last snapshot time, recording a copy at each.
  std::vector<WaveField> propagate(WaveField field, PotentialSource& potential,
                                   const std::vector<double>& snapshots);

  using Observer = std::function<void(std::size_t step, const std::vector<WaveField>& fields)>;
  /// Advances all fields in lockstep under one potential (sampled once per step)
  /// and calls `observe` after each step count listed in `marks` (0 allowed).
  void run(std::vector<WaveField>& fields, PotentialSource& potential,
           std::vector<std::size_t> marks, const Observer& observe);
  /// Free flow over time t (negative allowed), exact.
  void free_flow(WaveField& field, double t) const;

 private:
  void kinetic(std::vector<cplx>& v, const std::vector<cplx>& multiplier);
  void sample_potential(PotentialSource& potential, double t_mid);
  void apply_potential(WaveField& field);

  Grid grid_;
  ScalingRegime regime_;
  double dt_;
  double coupling_;   // eps^((1-gamma)/2 - s)
  double time_unit_;  // eps^(s+gamma)
  std::vector<double> k2_;
  std::vector<cplx> half_, full_;
  std::vector<double> v_;
  StepDiagnostics diag_;
};

/// Convenience wrapper over Propagator.
std::vector<WaveField> propagate(const WaveField& field, PotentialSource& potential,
                                 const ModelParams& params, const SolverConfig& config,
                                 StepDiagnostics* diagnostics = nullptr);

/// Largest dt keeping both the kinetic phase (over the band holding all but
/// `tail` of the field's spectral mass) and the potential phase below pi/8.
double suggest_dt(const WaveField& field, const ModelParams& params, double max_abs_potential,
                  double tail = 1e-12);

/// Fraction of |phi|^2 inside the inner half box |x_i| < L/4.
double inner_mass_fraction(const WaveField& field);

}  // namespace wdl
