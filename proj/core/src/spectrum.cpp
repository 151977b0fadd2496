#include "wdl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "wdl/errors.hpp"
#include "wdl/quadrature.hpp"

namespace wdl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-12;

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double two_pi_pow(int d) { return std::pow(2.0 * kPi, d); }

// Lambda_d(z) - 1, accurate for small z.
double angular_average_minus_one(int d, double z) {
  if (d == 1) {
    const double h = std::sin(0.5 * z);
    return -2.0 * h * h;
  }
  if (std::abs(z) < 1e-2) {
    const double z2 = z * z;
    return -z2 / (2.0 * d) + z2 * z2 / (8.0 * d * (d + 2.0));
  }
  return angular_average(d, z) - 1.0;
}

void require_nonzero(double p_norm, const char* what) {
  if (!(p_norm > 0.0)) {
    throw DomainError(std::string(what) + ": p = 0 is a pole of the spectrum");
  }
}

// Sum of the leading terms of  int_z^inf u^{-nu} e^{iu} du  for large z.
std::complex<double> oscillatory_tail(double nu, double z) {
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> sum = 0.0;
  std::complex<double> term = i * std::exp(i * z) * std::pow(z, -nu);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 12; ++n) {
    if (std::abs(term) > prev) break;
    sum += term;
    prev = std::abs(term);
    term *= -i * (nu + n) / z;
  }
  return sum;
}

double band_integral(const ModelParams& p, double t, double x, double lo, double hi) {
  const double c = 2.0 * p.alpha - 1.0;
  // r^{d-1} R0(r) = a(r) r^{1 - 2 alpha}
  auto g = [&](double r) {
    return p.envelope(r) * std::exp(-spectral_gap(p, r) * std::abs(t)) *
           angular_average(p.d, r * x);
  };
  const double panel = x > 0.0 ? kPi / x : hi - lo;
  const auto res = quad::singular_power(g, c, lo, hi, panel, kQuadTol);
  quad::require(res, 1e-9, 1e-300, "covariance");
  return res.value * sphere_area(p.d) / two_pi_pow(p.d);
}

}  // namespace

double Envelope::operator()(double p_norm) const {
  switch (family) {
    case EnvelopeFamily::kGaussian: return amplitude * std::exp(-p_norm * p_norm);
    case EnvelopeFamily::kExponential: return amplitude * std::exp(-std::abs(p_norm));
    case EnvelopeFamily::kConstant: return amplitude;
  }
  return amplitude;
}

double Envelope::support_radius(double rel_tol) const {
  switch (family) {
    case EnvelopeFamily::kGaussian: return std::sqrt(-std::log(rel_tol));
    case EnvelopeFamily::kExponential: return -std::log(rel_tol);
    case EnvelopeFamily::kConstant: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

std::string Envelope::name() const {
  switch (family) {
    case EnvelopeFamily::kGaussian: return "gaussian";
    case EnvelopeFamily::kExponential: return "exponential";
    case EnvelopeFamily::kConstant: return "constant";
  }
  return "gaussian";
}

Envelope Envelope::parse(std::string_view name, double amplitude) {
  Envelope e;
  e.amplitude = amplitude;
  if (name == "gaussian") e.family = EnvelopeFamily::kGaussian;
  else if (name == "exponential") e.family = EnvelopeFamily::kExponential;
  else if (name == "constant") e.family = EnvelopeFamily::kConstant;
  else throw DomainError("unknown envelope family '" + std::string(name) +
                         "' (expected gaussian, exponential or constant)");
  return e;
}

void ModelParams::validate() const {
  std::ostringstream err;
  if (d < 1) err << "d must be a positive integer; ";
  if (!(beta > 0.0 && beta <= 0.5)) err << "beta must lie in (0, 1/2]; ";
  if (!(alpha > 0.5 && alpha < 1.0)) err << "alpha must lie in (1/2, 1); ";
  if (!(alpha + beta > 1.0)) err << "alpha + beta > 1 required; ";
  if (!(gamma >= 0.0 && gamma < 1.0)) err << "gamma must lie in [0, 1); ";
  if (!(nu > 0.0)) err << "nu must be positive; ";
  if (!(envelope.at_origin() > 0.0)) err << "envelope amplitude a(0) must be positive; ";
  const double th = theta();
  if (!(th > 0.0 && th < 1.0)) err << "theta = 2(alpha+beta-1) must lie in (0,1); ";
  if (beta > 0.0 && gamma * (alpha + beta - 1.0) / beta >= 1.0) {
    err << "gamma (alpha+beta-1)/beta < 1 required; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw DomainError("invalid model parameters: " + msg.substr(0, msg.size() - 2));
}

void ScalingRegime::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("s must lie in (0,1]");
  if (!(s_c >= 0.0 && s_c <= s)) throw DomainError("s_c must lie in [0, s]");
}

double ScalingRegime::wave_scale() const { return std::pow(epsilon, s); }
double ScalingRegime::correlation_scale() const { return std::pow(epsilon, s - s_c); }

DerivedExponents derived_exponents(const ModelParams& params) {
  params.validate();
  DerivedExponents e{};
  e.theta = params.theta();
  e.kappa0 = (params.alpha + 2.0 * params.beta - 1.0) / (2.0 * params.beta);
  e.kappa_gamma =
      e.kappa0 / (1.0 - params.gamma * (params.alpha + params.beta - 1.0) / params.beta);
  return e;
}

double coherence_scale(double s, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta must lie in (0,1)");
  if (!(s <= 1.0)) throw DomainError("s must not exceed 1");
  const double critical = 1.0 / (1.0 + theta);
  // At the boundary s = 1/(1+theta) the critical scale is s_c = s.
  if (std::abs(s - critical) <= 1e-12 * critical) return s;
  if (s < critical) {
    std::ostringstream msg;
    msg << "coherence_scale requires s > 1/(1+theta) = " << critical << " (got s = " << s << ")";
    throw DomainError(msg.str());
  }
  return (1.0 - s) / theta;
}

double spatial_spectrum(const ModelParams& params, double p_norm) {
  p_norm = std::abs(p_norm);
  require_nonzero(p_norm, "spatial_spectrum");
  return params.envelope(p_norm) * std::pow(p_norm, -(params.d + 2.0 * (params.alpha - 1.0)));
}

double spatial_spectrum(const ModelParams& params, std::span<const double> p) {
  return spatial_spectrum(params, norm_of(p));
}

double spectral_gap(const ModelParams& params, double p_norm) {
  p_norm = std::abs(p_norm);
  if (p_norm == 0.0) return 0.0;
  return params.nu * std::pow(p_norm, 2.0 * params.beta);
}

double spectral_gap(const ModelParams& params, std::span<const double> p) {
  return spectral_gap(params, norm_of(p));
}

double space_time_spectrum(const ModelParams& params, double omega, double p_norm) {
  const double r0 = spatial_spectrum(params, p_norm);
  const double g = spectral_gap(params, p_norm);
  return 2.0 * g * r0 / (omega * omega + g * g);
}

double covariance(const ModelParams& params, double t, double x_norm) {
  params.validate();
  if (!params.envelope.decays()) {
    throw DomainError("covariance requires a decaying envelope; the constant envelope gives "
                      "a divergent spectral integral");
  }
  return band_integral(params, t, std::abs(x_norm), 0.0, params.envelope.support_radius());
}

double covariance(const ModelParams& params, double t, std::span<const double> x) {
  return covariance(params, t, norm_of(x));
}

double band_covariance(const ModelParams& params, double t, double x_norm, double p_lo,
                       double p_hi) {
  params.validate();
  if (!(p_lo >= 0.0 && p_hi > p_lo)) throw DomainError("band_covariance needs 0 <= p_lo < p_hi");
  if (params.envelope.decays()) p_hi = std::min(p_hi, params.envelope.support_radius());
  if (p_hi <= p_lo) return 0.0;
  return band_integral(params, t, std::abs(x_norm), p_lo, p_hi);
}

double sphere_area(int d) {
  if (d < 1) throw DomainError("sphere_area needs d >= 1");
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double angular_average(int d, double z) {
  z = std::abs(z);
  if (d == 1) return std::cos(z);
  if (z == 0.0) return 1.0;
  if (d == 3) return std::sin(z) / z;
  const double order = 0.5 * d - 1.0;
  if (z < 1e-6) return 1.0 - z * z / (2.0 * d);
  return std::tgamma(0.5 * d) * std::pow(2.0 / z, order) * std::cyl_bessel_j(order, z);
}

double sphere_moment(int d, double theta) {
  if (d < 1) throw DomainError("sphere_moment needs d >= 1");
  return 2.0 * std::pow(kPi, 0.5 * (d - 1)) * std::tgamma(0.5 * (theta + 1.0)) /
         std::tgamma(0.5 * (d + theta));
}

double sphere_moment_quadrature(int d, double theta) {
  if (d < 1) throw DomainError("sphere_moment_quadrature needs d >= 1");
  if (d == 1) return std::pow(1.0, theta) + std::pow(std::abs(-1.0), theta);
  auto f = [&](double phi) {
    return std::pow(std::cos(phi), theta) * std::pow(std::sin(phi), d - 2);
  };
  const auto res = quad::tanh_sinh(f, 0.0, 0.5 * kPi, 1e-15);
  quad::require(res, 1e-12, 1e-300, "sphere_moment_quadrature");
  const double lower = d == 2 ? 2.0 : sphere_area(d - 1);
  return 2.0 * lower * res.value;
}

double sigma_theta(const ModelParams& params) {
  const double th = params.theta();
  if (!(th > 0.0 && th < 1.0)) throw DomainError("sigma_theta requires theta in (0,1)");
  return 2.0 * params.envelope.at_origin() * th * std::tgamma(1.0 - th) / two_pi_pow(params.d) *
         sphere_moment(params.d, th);
}

double jump_symbol_coefficient(const ModelParams& params) {
  const double th = params.theta();
  if (!(th > 0.0 && th < 1.0)) throw DomainError("jump_symbol_coefficient requires theta in (0,1)");
  const double radial = std::tgamma(1.0 - th) * std::cos(0.5 * kPi * th) / th;
  return 2.0 * params.envelope.at_origin() / (two_pi_pow(params.d) * params.nu) * radial *
         sphere_moment(params.d, th);
}

double diffusion_coefficient(const ModelParams& params, SigmaConvention convention) {
  return convention == SigmaConvention::kClosedForm ? sigma_theta(params)
                                                    : jump_symbol_coefficient(params);
}

double d_coefficient(const ModelParams& params, std::optional<double> k_norm) {
  const auto ex = derived_exponents(params);
  if (!(ex.kappa0 > 0.5)) throw DomainError("d_coefficient requires kappa0 > 1/2");
  const double c = 2.0 * params.alpha - 1.0;
  const double pre = params.envelope.at_origin() * sphere_area(params.d) /
                     (two_pi_pow(params.d) * ex.kappa0 * (2.0 * ex.kappa0 - 1.0));
  const bool special = k_norm.has_value() && params.beta == 0.5 && params.gamma == 0.0;
  if (special) {
    const double k = std::abs(*k_norm);
    auto g = [&](double rho) {
      return std::exp(-params.nu * rho) * angular_average(params.d, k * rho);
    };
    const double hi = 46.0 / params.nu;
    const double panel = k > 0.0 ? kPi / k : hi;
    const auto res = quad::singular_power(g, c, 0.0, hi, panel, kQuadTol);
    quad::require(res, 1e-9, 1e-300, "d_coefficient");
    return pre * res.value;
  }
  auto g = [&](double rho) { return std::exp(-params.nu * std::pow(rho, 2.0 * params.beta)); };
  auto near = quad::singular_power(g, c, 0.0, 1.0, 1.0, kQuadTol);
  auto far = quad::exp_sinh([&](double rho) { return std::pow(rho, -c) * g(rho); }, 1.0, 1e-14);
  quad::require(near, 1e-9, 1e-300, "d_coefficient");
  quad::require(far, 1e-9, 1e-300, "d_coefficient");
  return pre * (near.value + far.value);
}

double d_coefficient_closed_form(const ModelParams& params) {
  const auto ex = derived_exponents(params);
  const double c = 2.0 * params.alpha - 1.0;
  const double integral = std::pow(params.nu, (c - 1.0) / (2.0 * params.beta)) *
                          std::tgamma((1.0 - params.alpha) / params.beta) / (2.0 * params.beta);
  return params.envelope.at_origin() * sphere_area(params.d) /
         (two_pi_pow(params.d) * ex.kappa0 * (2.0 * ex.kappa0 - 1.0)) * integral;
}

double transfer_kernel(const ModelParams& params, double p_norm, std::optional<double> omega) {
  p_norm = std::abs(p_norm);
  require_nonzero(p_norm, "transfer_kernel");
  const double r0 = spatial_spectrum(params, p_norm);
  const double g = spectral_gap(params, p_norm);
  if (omega) return 2.0 * g * r0 / (two_pi_pow(params.d) * (g * g + (*omega) * (*omega)));
  return 2.0 * r0 / (two_pi_pow(params.d) * g);
}

double levy_exponent(const ModelParams& params, double q_norm) {
  return JumpKernel(params).exponent(q_norm);
}

// ---------------------------------------------------------------------------

JumpKernel::JumpKernel(const ModelParams& params, std::optional<double> cap)
    : params_(params), d_(params.d), cap_(cap) {
  params_.validate();
  if (cap_ && !(*cap_ > 0.0)) throw DomainError("jump kernel cap must be positive");
  if (!cap_) return;
  // sigma = C a(r) r^{-d-theta}; tangent intercept T(r) = sigma - r sigma' is decreasing
  const double th = params_.theta();
  auto log_slope = [&](double r) {
    switch (params_.envelope.family) {
      case EnvelopeFamily::kGaussian: return -2.0 * r - (d_ + th) / r;
      case EnvelopeFamily::kExponential: return -1.0 - (d_ + th) / r;
      case EnvelopeFamily::kConstant: break;
    }
    return -(d_ + th) / r;
  };
  auto intercept = [&](double r) {
    const double s = uncapped_scaled(r, 0);
    return s * (1.0 - r * log_slope(r));
  };
  double lo = 1.0, hi = 1.0;
  while (intercept(hi) > *cap_) hi *= 2.0;
  while (intercept(lo) < *cap_) lo *= 0.5;
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    (intercept(mid) >= *cap_ ? lo : hi) = mid;
  }
  cap_r_ = hi;
  cap_value_ = uncapped_scaled(cap_r_, 0);
  cap_slope_ = cap_value_ * log_slope(cap_r_);
}

JumpKernel JumpKernel::zero(int d) {
  JumpKernel k;
  k.d_ = d;
  k.params_.d = d;
  k.zero_ = true;
  return k;
}

double JumpKernel::majorant_constant() const {
  if (zero_) return 0.0;
  return 2.0 * params_.envelope.at_origin() / (two_pi_pow(d_) * params_.nu);
}

double JumpKernel::uncapped_scaled(double r, int power) const {
  const double a = params_.envelope(r) / params_.envelope.at_origin();
  return majorant_constant() * a * std::pow(r, power - d_ - params_.theta());
}

double JumpKernel::scaled_density(double r, int power) const {
  if (zero_ || r <= 0.0) return 0.0;
  if (cap_ && r < cap_r_) return std::pow(r, power) * capped_linear(r);
  return uncapped_scaled(r, power);
}

double JumpKernel::density(double r) const {
  if (zero_) return 0.0;
  r = std::abs(r);
  if (cap_ && r < cap_r_) return capped_linear(r);
  require_nonzero(r, "JumpKernel::density");
  return transfer_kernel(params_, r);
}

double JumpKernel::rate_beyond(double delta) const {
  if (zero_) return 0.0;
  if (delta < 0.0) throw DomainError("rate_beyond needs delta >= 0");
  if (delta == 0.0 && !cap_) throw DomainError("uncapped kernel has infinite total rate");
  const double area = sphere_area(d_);
  const double R = params_.envelope.support_radius();
  auto radial = [&](double r) { return scaled_density(r, d_ - 1); };
  double total = 0.0;
  double lo = delta;
  if (cap_ && lo < cap_r_) {
    const double rc = cap_r_, b = cap_value_ - cap_slope_ * rc;
    total += b * (std::pow(rc, d_) - std::pow(lo, d_)) / d_ +
             cap_slope_ * (std::pow(rc, d_ + 1) - std::pow(lo, d_ + 1)) / (d_ + 1);
    lo = rc;
  }
  if (lo < 1.0) {
    // r = e^u turns the r^{-1-theta} endpoint into a smooth integrand.
    auto f = [&](double u) {
      const double r = std::exp(u);
      return scaled_density(r, d_);
    };
    const auto res = quad::gauss_kronrod(f, std::log(lo), 0.0, kQuadTol, 20);
    quad::require(res, 1e-9, 1e-300, "rate_beyond");
    total += res.value;
    lo = 1.0;
  }
  if (std::isfinite(R)) {
    if (R > lo) {
      const auto res = quad::gauss_kronrod(radial, lo, R, kQuadTol, 20);
      quad::require(res, 1e-9, 1e-300, "rate_beyond");
      total += res.value;
    }
  } else {
    const auto res = quad::exp_sinh(radial, lo, 1e-13);
    quad::require(res, 1e-9, 1e-300, "rate_beyond");
    total += res.value;
  }
  return area * total;
}

double JumpKernel::small_jump_moment(double delta) const {
  if (zero_ || delta <= 0.0) return 0.0;
  double lo = 0.0, total = 0.0;
  if (cap_) {
    const double m = std::min(delta, cap_r_), b = cap_value_ - cap_slope_ * cap_r_;
    total += b * std::pow(m, d_ + 1) / (d_ + 1) + cap_slope_ * std::pow(m, d_ + 2) / (d_ + 2);
    lo = m;
  }
  if (delta > lo) {
    // r^d sigma(r) = r^{-theta} * smooth
    const double th = params_.theta();
    auto g = [&](double r) { return r > 0.0 ? scaled_density(r, d_) * std::pow(r, th) : 0.0; };
    const auto res = quad::singular_power(g, th, lo, delta, delta, 1e-13);
    quad::require(res, 1e-8, 1e-300, "small_jump_moment");
    total += res.value;
  }
  return sphere_area(d_) * total;
}

double JumpKernel::exponent(double q_norm) const { return radial_integral(std::abs(q_norm), 0.0); }

double JumpKernel::exponent_truncated(double q_norm, double delta) const {
  if (delta < 0.0) throw DomainError("exponent_truncated needs delta >= 0");
  return radial_integral(std::abs(q_norm), delta);
}

double JumpKernel::radial_integral(double Q, double lo) const {
  if (zero_ || Q == 0.0) return 0.0;
  const double area = sphere_area(d_);
  auto h = [&](double r) {
    if (r <= 0.0) return 0.0;
    // r^{d-1} sigma (Lambda - 1) ~ r^{1-theta} near 0
    const double z = r * Q;
    if (z < 1e-6) return -scaled_density(r, d_ + 1) * Q * Q / (2.0 * d_);
    return scaled_density(r, d_ - 1) * angular_average_minus_one(d_, z);
  };
  const bool finite_support = params_.envelope.decays();
  double R = finite_support ? params_.envelope.support_radius() : std::max(1.0, 400.0 / Q);
  if (!finite_support && d_ >= 2) R = std::max(R, 4000.0 / Q);
  if (lo >= R) return 0.0;

  std::vector<double> breaks{lo, R};
  if (kPi / Q > lo && kPi / Q < R) breaks.push_back(kPi / Q);
  if (cap_) {
    // second-derivative jump of the capped density
    if (cap_r_ > lo && cap_r_ < R) breaks.push_back(cap_r_);
  }
  std::sort(breaks.begin(), breaks.end());

  quad::Result total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b <= a) continue;
    quad::Result piece;
    if (i == 0 && a == 0.0) piece = quad::tanh_sinh(h, a, b, 1e-13);
    else piece = quad::panels(h, a, b, kPi / Q, kQuadTol);
    total.value += piece.value;
    total.error += piece.error;
  }
  quad::require(total, 1e-8, 1e-12, "levy exponent");
  double value = total.value;

  if (!finite_support) {
    // Constant envelope: analytic tail for r > R, C r^{-1-theta} (Lambda_d(rQ) - 1).
    const double th = params_.theta();
    const double C = majorant_constant();
    double tail = -C * std::pow(R, -th) / th;
    if (d_ == 1) tail += C * std::pow(Q, th) * oscillatory_tail(1.0 + th, Q * R).real();
    value += tail;
  }
  return area * value;
}

}  // namespace wdl
