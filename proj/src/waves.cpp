#include "wavelab/waves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "quadrature.hpp"
#include "wavelab/errors.hpp"

namespace wavelab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRootTolerance = 1e-12;

void require_rarefaction(const RiemannData& r) {
  if (!r.is_rarefaction()) {
    throw std::invalid_argument("rarefaction requires u_minus < u_plus");
  }
}

// w(x) = mid + half * (2/pi) atan(x); slope constant K = half * 2/pi.
double midpoint(const RiemannData& r) { return 0.5 * (r.u_plus() + r.u_minus()); }
double half_jump(const RiemannData& r) { return 0.5 * (r.u_plus() - r.u_minus()); }
double slope_scale(const RiemannData& r) { return half_jump(r) * 2.0 / kPi; }

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

RiemannData::RiemannData(double u_minus, double u_plus)
    : u_minus_(u_minus), u_plus_(u_plus) {
  if (!std::isfinite(u_minus) || !std::isfinite(u_plus)) {
    throw std::invalid_argument("Riemann states must be finite");
  }
  if (u_minus == u_plus) {
    throw std::invalid_argument("u_minus == u_plus: no wave exists");
  }
}

double RiemannData::max_speed() const noexcept {
  return std::max(std::abs(u_minus_), std::abs(u_plus_));
}

ShockProfileParams::ShockProfileParams(double u_minus, double nu, double c)
    : u_minus_(u_minus), nu_(nu), c_(c) {
  if (!(u_minus > 0.0)) throw std::invalid_argument("shock profile needs u_minus > 0");
  if (!(nu > 0.0)) throw std::invalid_argument("shock profile needs nu > 0");
  if (!(c > 0.0)) throw std::invalid_argument("shock profile needs c > 0");
}

double rankine_hugoniot_speed(const RiemannData& r) noexcept {
  return 0.5 * (r.u_minus() + r.u_plus());
}

double exact_rarefaction(const RiemannData& r, double t, double x) {
  require_rarefaction(r);
  if (!(t > 0.0)) throw std::invalid_argument("exact_rarefaction needs t > 0");
  if (x < r.u_minus() * t) return r.u_minus();
  if (x > r.u_plus() * t) return r.u_plus();
  return x / t;
}

double approx_rarefaction_initial(const RiemannData& r, double x) {
  require_rarefaction(r);
  return midpoint(r) + slope_scale(r) * std::atan(x);
}

double approx_rarefaction_initial_slope(const RiemannData& r, double x) {
  require_rarefaction(r);
  return slope_scale(r) / (1.0 + x * x);
}

double approx_rarefaction_initial_primitive(const RiemannData& r, double x) {
  require_rarefaction(r);
  return midpoint(r) * x +
         slope_scale(r) * (x * std::atan(x) - 0.5 * std::log1p(x * x));
}

double characteristic_foot(const RiemannData& r, double t, double x) {
  require_rarefaction(r);
  if (t < 0.0) throw std::invalid_argument("characteristic_foot needs t >= 0");
  if (t == 0.0) return x;

  auto residual = [&](double x0) {
    return x0 + t * approx_rarefaction_initial(r, x0) - x;
  };
  const double reach = t * r.max_speed();
  double lo = x - reach;
  double hi = x + reach;
  double width = std::max(reach, 1.0);
  int expansions = 0;
  while (!(residual(lo) <= 0.0)) {
    lo -= width;
    width *= 2.0;
    if (++expansions > 200) throw RootBracketError("characteristic root: no lower bracket");
  }
  width = std::max(reach, 1.0);
  while (!(residual(hi) >= 0.0)) {
    hi += width;
    width *= 2.0;
    if (++expansions > 400) throw RootBracketError("characteristic root: no upper bracket");
  }

  // Newton from the midpoint, falling back to bisection whenever the step
  // leaves the bracket. The residual is strictly increasing.
  // A Newton step that does not halve the previous step is replaced by
  // bisection too (it can cycle where the residual changes convexity).
  double x0 = 0.5 * (lo + hi);
  double last_step = hi - lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = residual(x0);
    if (f == 0.0) return x0;
    if (f < 0.0) lo = x0; else hi = x0;
    const double df = 1.0 + t * approx_rarefaction_initial_slope(r, x0);
    double next = x0 - f / df;
    if (!(next > lo && next < hi) || std::abs(next - x0) > 0.5 * last_step) {
      next = 0.5 * (lo + hi);
    }
    last_step = std::abs(next - x0);
    const double tol = kRootTolerance * std::max(1.0, std::abs(next));
    if (std::abs(next - x0) <= tol || hi - lo <= tol) return next;
    x0 = next;
  }
  throw RootBracketError("characteristic root did not converge");
}

ProfileSample approx_rarefaction(const RiemannData& r, double t, double x) {
  const double x0 = characteristic_foot(r, t, x);
  const double w_slope = approx_rarefaction_initial_slope(r, x0);
  return {approx_rarefaction_initial(r, x0), w_slope / (1.0 + t * w_slope)};
}

double viscous_shock(const ShockProfileParams& p, double xi) {
  const double u = p.u_minus();
  // exponent of e^{h xi} / c; beyond +-700 the profile equals its limit state
  const double z = p.h() * xi - std::log(p.c());
  if (z > 700.0) return -u;
  if (z < -700.0) return u;
  return -u + 2.0 * u * p.c() / (std::exp(p.h() * xi) + p.c());
}

double viscous_shock_primitive(const ShockProfileParams& p, double xi) {
  const double u = p.u_minus();
  const double log_c = std::log(p.c());
  return u * xi -
         (2.0 * u / p.h()) * (log_add_exp(p.h() * xi, log_c) - log_add_exp(0.0, log_c));
}

double shock_shift_gap(const ShockProfileParams& p, double a) {
  const double u = p.u_minus();
  return 2.0 * u * std::tanh(u * std::abs(a) / (4.0 * p.nu()));
}

double shock_shift_gap_numeric(const ShockProfileParams& p, double a, std::size_t scan) {
  if (scan < 3) throw std::invalid_argument("shock_shift_gap_numeric needs scan >= 3");
  if (a == 0.0) return 0.0;
  auto gap = [&](double x) { return std::abs(viscous_shock(p, x) - viscous_shock(p, x + a)); };
  // the front sits at ln(c)/h with width ~1/h; cover it and the shifted copy
  const double centre = std::log(p.c()) / p.h();
  const double lo = centre - std::abs(a) - 40.0 / p.h();
  const double hi = centre + std::abs(a) + 40.0 / p.h();
  const double step = (hi - lo) / static_cast<double>(scan - 1);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < scan; ++i) {
    const double v = gap(lo + step * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double x = lo + step * static_cast<double>(best);
  boost::uintmax_t iters = 200;
  const auto [arg, neg] = boost::math::tools::brent_find_minima(
      [&](double y) { return -gap(y); }, x - step, x + step, 52, iters);
  (void)arg;
  return std::max(best_value, -neg);
}

// Both norms below are integrated in the characteristic coordinate
// x0 = tan(theta), theta in (-pi/2, pi/2): dx = (1 + t w'(x0)) dx0 and
// w'(x0) dx0 = K dtheta, which maps the whole line onto a bounded interval.

double profile_derivative_norm(const RiemannData& r, double t, double p) {
  require_rarefaction(r);
  if (!(t >= 0.0)) throw std::invalid_argument("profile_derivative_norm needs t >= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("profile_derivative_norm needs p >= 1");
  const double k = slope_scale(r);
  if (std::isinf(p)) {
    // u_x = s / (1 + t s) with s = w'(x0) is increasing in s, and w' peaks at x0 = 0
    return k / (1.0 + t * k);
  }
  auto integrand = [&](double theta) {
    const double c2 = std::cos(theta) * std::cos(theta);
    return std::pow(k, p) * std::pow(c2, p - 1.0) * std::pow(1.0 + t * k * c2, 1.0 - p);
  };
  const double integral = detail::integrate_adaptive(integrand, -kPi / 2, kPi / 2, 1e-12);
  return std::pow(integral, 1.0 / p);
}

double rarefaction_gap_norm(const RiemannData& r, double t, double p) {
  require_rarefaction(r);
  if (!(t > 0.0)) throw std::invalid_argument("rarefaction_gap_norm needs t > 0");
  if (!(p > 1.0)) throw std::invalid_argument("rarefaction_gap_norm needs p > 1");
  if (std::isinf(p)) throw std::invalid_argument("rarefaction_gap_norm: use p < infinity");
  const double k = slope_scale(r);

  // Edges of the fan x = u_- t and x = u_+ t pulled back to theta.
  const double foot_left = characteristic_foot(r, t, r.u_minus() * t);
  const double foot_right = characteristic_foot(r, t, r.u_plus() * t);
  const double theta_left = std::atan(foot_left);
  const double theta_right = std::atan(foot_right);
  // distance of atan(x0) from -pi/2 and from pi/2 without cancellation
  auto from_bottom = [](double x0) { return x0 < 0.0 ? std::atan(-1.0 / x0) : kPi / 2 + std::atan(x0); };
  auto from_top = [](double x0) { return x0 > 0.0 ? std::atan(1.0 / x0) : kPi / 2 - std::atan(x0); };

  auto diff_power = [&](double d) { return std::pow(std::abs(d), p); };
  // Outside the fan w - u_- = K delta (left) and u_+ - w = K delta (right)
  // with delta the offset from -+pi/2, where 1/cos^2 = 1/sin^2 delta.
  auto outer = [&](double delta) {
    const double s = std::sin(delta);
    return diff_power(k * delta) * (1.0 / (s * s) + t * k);
  };
  auto fan = [&](double theta) {
    // u^r = x / t = x0 / t + w(x0)
    const double c = std::cos(theta);
    return diff_power(std::tan(theta) / t) * (1.0 / (c * c) + t * k);
  };
  double total = detail::integrate_adaptive(outer, 0.0, from_bottom(foot_left), 1e-12);
  total += detail::integrate_adaptive(fan, theta_left, theta_right, 1e-12);
  total += detail::integrate_adaptive(outer, 0.0, from_top(foot_right), 1e-12);
  return std::pow(total, 1.0 / p);
}

}  // namespace wavelab
