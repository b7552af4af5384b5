#include "wavelab/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "wavelab/errors.hpp"

namespace wavelab {

ViscousParams::ViscousParams(double nu) : nu_(nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("viscosity nu must be positive");
}

InitialData constant_initial_data(double a) {
  return {[a](double) { return a; }, [a](double y) { return a * y; }, std::abs(a)};
}

InitialData arctan_initial_data(const RiemannData& r) {
  return {[r](double y) { return approx_rarefaction_initial(r, y); },
          [r](double y) { return approx_rarefaction_initial_primitive(r, y); },
          r.max_speed()};
}

InitialData shock_initial_data(const ShockProfileParams& p) {
  return {[p](double y) { return viscous_shock(p, y); },
          [p](double y) { return viscous_shock_primitive(p, y); }, p.u_minus()};
}

double cole_hopf_solve(const InitialData& initial, double nu, double t, double x) {
  if (!(nu > 0.0)) throw std::invalid_argument("cole_hopf_solve needs nu > 0");
  if (!(t > 0.0)) throw std::invalid_argument("cole_hopf_solve needs t > 0");
  if (!(initial.speed_bound >= 0.0)) throw std::invalid_argument("speed_bound must be >= 0");

  // Every maximizer of the exponent solves y + t u0(y) = x, so it lies within
  // t * speed_bound of x; 9 kernel widths further out the exponent has
  // dropped by at least 81.
  const double width = std::sqrt(4.0 * nu * t);
  const double reach = t * initial.speed_bound + 9.0 * width;
  const double lo = x - reach;
  const double hi = x + reach;
  auto exponent = [&](double y) {
    const double d = x - y;
    return -d * d / (4.0 * nu * t) - initial.primitive(y) / (2.0 * nu);
  };

  std::vector<double> nodes_exp;
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 256; n <= (std::size_t{1} << 22); n *= 2) {
    const double h = (hi - lo) / static_cast<double>(n);
    nodes_exp.resize(n + 1);
    double e_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= n; ++k) {
      nodes_exp[k] = exponent(lo + static_cast<double>(k) * h);
      e_max = std::max(e_max, nodes_exp[k]);
    }
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double y = lo + static_cast<double>(k) * h;
      const double weight = (k == 0 || k == n) ? 0.5 : 1.0;
      const double kernel = weight * std::exp(nodes_exp[k] - e_max);
      numerator += kernel * (x - y) / t;
      denominator += kernel;
    }
    const double value = numerator / denominator;
    if (std::abs(value - previous) < 1e-10) return value;
    previous = value;
  }
  throw QuadratureError("Cole-Hopf quadrature did not converge at x = " + std::to_string(x));
}

Field cole_hopf_field(const InitialData& initial, double nu, double t, const Grid& grid) {
  return Field::sample(grid, [&](double x) { return cole_hopf_solve(initial, nu, t, x); });
}

namespace tridiagonal {

std::vector<double> solve(std::span<const double> lower, std::span<const double> diag,
                          std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0) {
    throw std::invalid_argument("tridiagonal::solve: size mismatch");
  }
  std::vector<double> c(n), d(n), x(n);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double denom = diag[i] - lower[i] * c[i - 1];
    c[i] = i + 1 < n ? upper[i] / denom : 0.0;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

std::vector<double> apply(std::span<const double> lower, std::span<const double> diag,
                          std::span<const double> upper, std::span<const double> x) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || x.size() != n) {
    throw std::invalid_argument("tridiagonal::apply: size mismatch");
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = diag[i] * x[i];
    if (i > 0) y[i] += lower[i] * x[i - 1];
    if (i + 1 < n) y[i] += upper[i] * x[i + 1];
  }
  return y;
}

}  // namespace tridiagonal

BurgersStepper::BurgersStepper(const Grid& grid, double diffusion, double dt, double theta)
    : grid_(grid), diffusion_(diffusion), theta_(theta) {
  if (!(diffusion >= 0.0)) throw std::invalid_argument("diffusion must be >= 0");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  const std::size_t interior = grid.size() - 2;
  c_prime_.resize(interior);
  inv_denom_.resize(interior);
  flux_.resize(grid.size() - 1);
  rhs_.resize(interior);
  factorize(dt);
}

void BurgersStepper::factorize(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  factored_dt_ = dt;
  ratio_ = diffusion_ * dt / (grid_.dx() * grid_.dx());
  const double off = -theta_ * ratio_;
  const double diag = 1.0 + 2.0 * theta_ * ratio_;
  const std::size_t m = c_prime_.size();
  inv_denom_[0] = 1.0 / diag;
  c_prime_[0] = off * inv_denom_[0];
  for (std::size_t k = 1; k < m; ++k) {
    inv_denom_[k] = 1.0 / (diag - off * c_prime_[k - 1]);
    c_prime_[k] = off * inv_denom_[k];
  }
}

bool BurgersStepper::step(std::span<double> u, double dt, double transport, double guard) {
  const std::size_t n = grid_.size();
  if (u.size() != n) throw std::invalid_argument("BurgersStepper: field size mismatch");
  if (dt != factored_dt_) factorize(dt);

  for (std::size_t i = 0; i + 1 < n; ++i) flux_[i] = llf_flux(u[i], u[i + 1]);

  const double courant = dt / grid_.dx();
  const double explicit_diff = (1.0 - theta_) * ratio_;
  const double implicit_diff = theta_ * ratio_;
  const double noise = 0.5 * transport / grid_.dx();
  const std::size_t m = n - 2;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    rhs_[k] = u[i] - courant * (flux_[i] - flux_[i - 1]) +
              explicit_diff * (u[i + 1] - 2.0 * u[i] + u[i - 1]) +
              noise * (u[i + 1] - u[i - 1]);
  }
  rhs_[0] += implicit_diff * u[0];
  rhs_[m - 1] += implicit_diff * u[n - 1];

  // Thomas sweep with the cached constant-coefficient factorization.
  const double off = -implicit_diff;
  rhs_[0] *= inv_denom_[0];
  for (std::size_t k = 1; k < m; ++k) rhs_[k] = (rhs_[k] - off * rhs_[k - 1]) * inv_denom_[k];
  for (std::size_t k = m - 1; k-- > 0;) rhs_[k] -= c_prime_[k] * rhs_[k + 1];

  bool ok = true;
  for (std::size_t k = 0; k < m; ++k) {
    const double v = rhs_[k];
    u[k + 1] = v;
    if (!(std::abs(v) <= guard)) ok = false;
  }
  return ok;
}

double stability_guard(double u_left, double u_right) noexcept {
  return 2.0 * std::max(std::abs(u_left), std::abs(u_right)) + 1.0;
}

double stable_time_step(const Grid& grid, double max_speed, double sigma) {
  double dt = std::numeric_limits<double>::infinity();
  if (max_speed > 0.0) dt = 0.4 * grid.dx() / max_speed;
  if (sigma > 0.0) {
    const double noise_dt = grid.dx() / (3.0 * sigma);
    dt = std::min(dt, noise_dt * noise_dt);
  }
  if (!std::isfinite(dt)) dt = grid.dx();
  return dt;
}

Field fd_viscous_solve(const Field& u0, const ViscousParams& params, double t_end, double dt) {
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const double speed = u0.max_abs();
  if (speed > 0.0 && dt > 0.4 * u0.grid().dx() / speed * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt violates the advective CFL bound 0.4 dx / max|u|");
  }
  Field u = u0;
  if (t_end == 0.0) return u;

  BurgersStepper stepper(u0.grid(), params.nu(), dt);
  const double guard = stability_guard(u0.front(), u0.back());
  const auto full_steps = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
  const double remainder = t_end - static_cast<double>(full_steps) * dt;

  for (std::size_t k = 0; k < full_steps; ++k) {
    if (!stepper.step(u.values(), dt, 0.0, guard)) {
      throw StabilityError("fd_viscous_solve: max-norm guard exceeded",
                           static_cast<double>(k + 1) * dt);
    }
  }
  if (remainder > 1e-12 * dt) {
    if (!stepper.step(u.values(), remainder, 0.0, guard)) {
      throw StabilityError("fd_viscous_solve: max-norm guard exceeded", t_end);
    }
  }
  return u;
}

}  // namespace wavelab
