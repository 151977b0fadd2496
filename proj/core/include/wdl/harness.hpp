#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wdl/field.hpp"
#include "wdl/phase_grid.hpp"
#include "wdl/schrodinger.hpp"
#include "wdl/spectrum.hpp"

namespace wdl {

struct TestPacket {
  double x_center, k_center;
  double x_width, k_width;
  double amplitude;
  double weight;

  double operator()(double x, double k) const;
};

/// Fixed family of Gaussian phase-space packets with weights 2^{-j}.
/// "tf16-v1": centres {-3,-1,1,3} x {-3,-1,1,3}, widths alternating 1 and 2,
/// ordered by distance of the centre from the origin, each of L2 norm `radius`.
class TestFamily {
 public:
  static TestFamily standard(double radius = 1.0);

  const std::string& version() const { return version_; }
  const std::vector<TestPacket>& packets() const { return packets_; }
  std::size_t size() const { return packets_.size(); }

  /// <W, g_j> by the grid quadrature.
  std::vector<double> pairings(const WignerGrid& w) const;

 private:
  std::string version_;
  std::vector<TestPacket> packets_;
};

/// sum_j 2^{-j} |<W1 - W2, g_j>| on a common grid.
double weak_distance(const WignerGrid& a, const WignerGrid& b, const TestFamily& family);

enum class PlanKind { kFracDiffusion, kTransfer, kPhase };
enum class MixtureRule { kMonteCarlo, kLatticeQuadrature };

struct ExperimentPlan {
  std::string name;
  PlanKind kind = PlanKind::kFracDiffusion;
  ModelParams params;
  std::vector<double> ladder;  // epsilon, strictly decreasing
  double s = 0.8;
  double s_c = 0.4;
  double t1 = 0.5;
  Grid grid{1, 2048, 40.0};
  double dt = 0.003;
  std::size_t x_stride = 4;
  std::size_t realizations = 16;
  MixtureRule mixture = MixtureRule::kMonteCarlo;
  std::size_t directions = 64;       // Monte Carlo draws of zeta
  double quadrature_spacing = 0.25;  // lattice-quadrature node spacing in zeta
  DirectionLaw mu = DirectionLaw::gaussian();
  double packet_width = 1.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string family = "tf16-v1";
  // phase plans
  double track_k = 0.0;
  std::size_t phase_samples = 2048;
  std::size_t sample_stride = 1;

  /// Checks the ladder and the scaling hypotheses of the limit the plan targets.
  void validate() const;
  double limit_sigma() const;
};

ExperimentPlan plan_frac_default();
ExperimentPlan plan_transfer_default();
ExperimentPlan plan_phase_default();
ExperimentPlan plan_by_name(const std::string& name);

struct ConvergenceRow {
  double epsilon = 0.0;
  double median = 0.0;
  double q25 = 0.0, q75 = 0.0;
  double iqr = 0.0;
  double initial_gap = 0.0;
  double alias_fraction = 0.0;
  std::vector<double> distances;  // per realization
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool distances_decreasing = false;
  bool spread_shrinking = false;
};

using Progress = std::function<void(const std::string&)>;

/// Mixture weights and directions for one medium realization.
struct DirectionSet {
  std::vector<double> zeta;
  std::vector<double> weight;  // sums to 1
};
DirectionSet direction_set(const ExperimentPlan& plan, double epsilon, std::uint64_t realization);

/// Mixture-averaged W_eps(t1) for one medium realization (d = 1).
WignerGrid simulated_wigner(const ExperimentPlan& plan, double epsilon, std::uint64_t realization,
                            double* alias = nullptr);
/// Limit solution at t1 on the phase grid of the given epsilon.
WignerGrid limit_wigner(const ExperimentPlan& plan, double epsilon);

ConvergenceReport decoherence_convergence(const ExperimentPlan& plan, const Progress& progress = {});

struct PhaseRow {
  double epsilon = 0.0;
  double kappa_hat = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  bool degenerate = false;
  double modulus_drift = 0.0;     // max_t |mean_r |z_r(t)|/|z_r(0)| - 1|
  double ks_p_value = 0.0;        // final phase vs fitted normal
  std::size_t unwrap_flags = 0;   // per-sample jumps above pi/2
  double control_phase = 0.0;     // max |phase| with V = 0
};

struct PhaseReport {
  double kappa0 = 0.0;
  std::vector<PhaseRow> rows;
};

/// Unwrapped phase of zeta_hat(t, k) for one realization, one value per sample.
std::vector<double> tracked_phase(const ExperimentPlan& plan, double epsilon, std::uint64_t realization,
                                  bool zero_potential, std::vector<double>* modulus = nullptr,
                                  std::size_t* flags = nullptr);

PhaseReport phase_experiment(const ExperimentPlan& plan, const Progress& progress = {});

struct SuiteVerdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Prop1Config {
  std::vector<std::size_t> pairs{0, 1, 2, 4, 8, 16, 32, 64};
  double correlation = 0.9;  // lag h per mode from exp(-g h)
  std::size_t samples = 100000;
  double slope_tol = 0.01;
  double residual_tol = 0.02;
};

/// Regression of V_j(t + h) on V_j(t) along an OU chain of each tracked mode.
std::vector<SuiteVerdict> prop1_suite(const ModeSet& modes, const Prop1Config& config = {});

struct CovarianceConfig {
  std::vector<Lag> lags;
  double dt = 0.5;  // microscopic time per snapshot
  std::size_t realizations = 10000;
  double sigma_tol = 3.0;
  unsigned jobs = 1;
};
CovarianceConfig default_covariance_config();

/// Ensemble covariance of one stationary realization per seed against the
/// band-limited quadrature oracle.
std::vector<SuiteVerdict> covariance_suite(const ModelParams& params, const Grid& grid,
                                           const CovarianceConfig& config, std::uint64_t seed);

}  // namespace wdl
