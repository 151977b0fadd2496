#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace wdl {

enum class EnvelopeFamily { kGaussian, kExponential, kConstant };

/// Radial spectral envelope a(|p|).
///   gaussian     a0 * exp(-|p|^2)
///   exponential  a0 * exp(-|p|)
///   constant     a0 (idealized; only meaningful in coefficient formulas)
struct Envelope {
  EnvelopeFamily family = EnvelopeFamily::kGaussian;
  double amplitude = 1.0;

  double operator()(double p_norm) const;
  double at_origin() const { return amplitude; }
  bool decays() const { return family != EnvelopeFamily::kConstant; }
  // Radius beyond which a(p) <= rel_tol * a(0). Infinite for the constant family.
  double support_radius(double rel_tol = 1e-18) const;

  std::string name() const;
  static Envelope parse(std::string_view name, double amplitude);
};

struct ModelParams {
  int d = 1;
  double alpha = 0.75;
  double beta = 0.5;
  double nu = 1.0;
  double gamma = 0.25;
  Envelope envelope;

  void validate() const;
  double theta() const { return 2.0 * (alpha + beta - 1.0); }
};

struct ScalingRegime {
  double epsilon = 0.1;
  double s = 0.8;
  double s_c = 0.4;

  void validate() const;
  /// eps^s: macroscopic size of one microscopic length unit.
  double wave_scale() const;
  /// eps^(s - s_c): Wigner correlation length.
  double correlation_scale() const;
};

struct DerivedExponents {
  double theta;
  double kappa0;
  double kappa_gamma;
};

DerivedExponents derived_exponents(const ModelParams& params);

/// s_c = (1-s)/theta, defined for s in [1/(1+theta), 1].
double coherence_scale(double s, double theta);

double spatial_spectrum(const ModelParams& params, double p_norm);
double spatial_spectrum(const ModelParams& params, std::span<const double> p);
double spectral_gap(const ModelParams& params, double p_norm);
double spectral_gap(const ModelParams& params, std::span<const double> p);
double space_time_spectrum(const ModelParams& params, double omega, double p_norm);

/// R(t,x) by radial quadrature; x_norm = |x|.
double covariance(const ModelParams& params, double t, double x_norm);
double covariance(const ModelParams& params, double t, std::span<const double> x);
/// R(t,x) restricted to p_lo <= |p| <= p_hi.
double band_covariance(const ModelParams& params, double t, double x_norm,
                       double p_lo, double p_hi);

double sphere_area(int d);
/// Mean of exp(i z u.e1) over the unit sphere S^{d-1}.
double angular_average(int d, double z);
/// Integral over S^{d-1} of |e1.u|^theta, closed form.
double sphere_moment(int d, double theta);
/// Same integral by direct quadrature over the polar angle.
double sphere_moment_quadrature(int d, double theta);

/// sigma(theta) = 2 a(0) theta Gamma(1-theta) / (2pi)^d * sphere_moment.
double sigma_theta(const ModelParams& params);
/// Coefficient c with  int sigma(p) (cos(p.q) - 1) dp = -c |q|^theta  for a == a(0);
/// the symbol of the long-range jump operator.
double jump_symbol_coefficient(const ModelParams& params);

enum class SigmaConvention { kClosedForm, kJumpSymbol };
double diffusion_coefficient(const ModelParams& params, SigmaConvention convention);

/// D(alpha, beta).  With k given and beta = 1/2, gamma = 0 the k-dependent
/// variant (caller asserts s_c = 0) is returned instead.
double d_coefficient(const ModelParams& params, std::optional<double> k_norm = std::nullopt);
/// Closed form of the generic D via Gamma((1-alpha)/beta).
double d_coefficient_closed_form(const ModelParams& params);

double transfer_kernel(const ModelParams& params, double p_norm,
                       std::optional<double> omega = std::nullopt);
double levy_exponent(const ModelParams& params, double q_norm);

/// Radial jump density sigma(|p|) of the Lévy process, optionally capped.
///
/// A cap c replaces sigma on [0, r_c] by its tangent line at r_c, with r_c chosen so
/// that the line meets c at the origin.  The capped density is then convex and
/// decreasing, so its cosine transform is nonnegative and exp(t Psi) >= exp(-t Lambda(0)).
class JumpKernel {
 public:
  explicit JumpKernel(const ModelParams& params, std::optional<double> cap = std::nullopt);
  static JumpKernel zero(int d = 1);

  int dimension() const { return d_; }
  bool is_zero() const { return zero_; }
  bool is_capped() const { return cap_.has_value(); }
  const ModelParams& params() const { return params_; }

  double density(double r) const;
  /// Lambda(delta) = int_{|p| >= delta} sigma(p) dp.  delta = 0 allowed when capped.
  double rate_beyond(double delta) const;
  /// int_{|p| < delta} |p| sigma(p) dp.
  double small_jump_moment(double delta) const;
  /// Psi(q) = int sigma(p) (cos(p.q) - 1) dp.
  double exponent(double q_norm) const;
  /// Psi restricted to |p| >= delta.
  double exponent_truncated(double q_norm, double delta) const;

  /// Dominating power law C r^{-d-theta} with sigma <= majorant, used for thinning.
  double majorant_constant() const;
  /// Radius below which the cap is active (0 when uncapped).
  double cap_radius() const { return cap_r_; }

 private:
  JumpKernel() = default;
  double radial_integral(double q_norm, double lo) const;
  // r^power * sigma(r), evaluated without overflow near r = 0.
  double scaled_density(double r, int power) const;

  ModelParams params_{};
  int d_ = 1;
  bool zero_ = false;
  std::optional<double> cap_;
  double cap_r_ = 0.0, cap_value_ = 0.0, cap_slope_ = 0.0;
  double uncapped_scaled(double r, int power) const;
  double capped_linear(double r) const { return cap_value_ + cap_slope_ * (r - cap_r_); }
};

}  // namespace wdl
