#pragma once

#include <cstddef>
// Deterministic wave patterns of the Burgers equation: the inviscid
// rarefaction fan, its smooth arctan-launched approximation, and the
// zero-speed viscous shock profile.

#include <limits>

namespace wavelab {

/// Far-field states of Riemann data. Equal states are rejected.
class RiemannData {
 public:
  RiemannData(double u_minus, double u_plus);

  double u_minus() const noexcept { return u_minus_; }
  double u_plus() const noexcept { return u_plus_; }
  /// u_+ - u_-; positive for a rarefaction.
  double strength() const noexcept { return u_plus_ - u_minus_; }
  bool is_rarefaction() const noexcept { return u_minus_ < u_plus_; }
  bool is_shock() const noexcept { return u_minus_ > u_plus_; }
  double max_speed() const noexcept;

  bool operator==(const RiemannData&) const = default;

 private:
  double u_minus_;
  double u_plus_;
};

/// Zero-speed viscous shock: u_- = -u_+ > 0, viscosity nu, shift constant c.
class ShockProfileParams {
 public:
  ShockProfileParams(double u_minus, double nu, double c = 1.0);

  double u_minus() const noexcept { return u_minus_; }
  double u_plus() const noexcept { return -u_minus_; }
  double nu() const noexcept { return nu_; }
  double c() const noexcept { return c_; }
  /// Inverse profile width u_- / nu.
  double h() const noexcept { return u_minus_ / nu_; }
  RiemannData riemann() const { return {u_minus_, -u_minus_}; }

 private:
  double u_minus_;
  double nu_;
  double c_;
};

struct ProfileSample {
  double value;
  double slope;
};

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

double rankine_hugoniot_speed(const RiemannData& r) noexcept;

/// Self-similar rarefaction fan; throws for t <= 0 or non-rarefaction data.
double exact_rarefaction(const RiemannData& r, double t, double x);

/// Arctan-smoothed Riemann data w(x) that launches the approximate
/// rarefaction. w is strictly increasing with limits u_-, u_+.
double approx_rarefaction_initial(const RiemannData& r, double x);
double approx_rarefaction_initial_slope(const RiemannData& r, double x);
/// Closed-form primitive of w, integrated from 0.
double approx_rarefaction_initial_primitive(const RiemannData& r, double x);

/// Foot x0 of the characteristic x = x0 + t w(x0) through (t, x).
double characteristic_foot(const RiemannData& r, double t, double x);

/// Inviscid evolution of w by characteristics: value and x-derivative.
ProfileSample approx_rarefaction(const RiemannData& r, double t, double x);

double viscous_shock(const ShockProfileParams& p, double xi);
double viscous_shock_primitive(const ShockProfileParams& p, double xi);

/// sup_x |u(x) - u(x + a)| for the c = 1 profile: 2 u_- tanh(u_- |a| / (4 nu)).
double shock_shift_gap(const ShockProfileParams& p, double a);
/// Same sup by brute force: scan of a fine x-grid refined by Brent's method.
/// Works for any c > 0.
double shock_shift_gap_numeric(const ShockProfileParams& p, double a, std::size_t scan = 20001);

/// ||d/dx approx_rarefaction(t, .)||_{L^p}; p may be kInfinityNorm.
double profile_derivative_norm(const RiemannData& r, double t, double p);

/// ||approx_rarefaction(t, .) - exact_rarefaction(t, .)||_{L^p} for t > 0, p > 1.
double rarefaction_gap_norm(const RiemannData& r, double t, double p);

}  // namespace wavelab
