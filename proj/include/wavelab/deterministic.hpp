#pragma once

// Deterministic viscous Burgers u_t + u u_x = nu u_xx, solved two ways:
// Cole-Hopf quadrature (pointwise, high accuracy) and a conservative
// finite-difference scheme (local Lax-Friedrichs convection, Crank-Nicolson
// diffusion) on a truncated domain with Dirichlet far-field values.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wavelab/field.hpp"
#include "wavelab/waves.hpp"

namespace wavelab {

class ViscousParams {
 public:
  explicit ViscousParams(double nu);
  double nu() const noexcept { return nu_; }

 private:
  double nu_;
};

/// Initial data for the Cole-Hopf oracle. `primitive(y)` is the integral of
/// `value` from 0 to y; `speed_bound` bounds |value| on the whole line.
struct InitialData {
  std::function<double(double)> value;
  std::function<double(double)> primitive;
  double speed_bound;
};

InitialData constant_initial_data(double a);
InitialData arctan_initial_data(const RiemannData& r);
InitialData shock_initial_data(const ShockProfileParams& p);

/// u(t, x) = int ((x-y)/t) K dy / int K dy,
/// K = exp(-(x-y)^2 / (4 nu t) - primitive(y) / (2 nu)).
/// Trapezoid rule on a window that provably holds all but e^-81 of K,
/// doubled from 256 nodes until successive values differ by < 1e-10.
double cole_hopf_solve(const InitialData& initial, double nu, double t, double x);
Field cole_hopf_field(const InitialData& initial, double nu, double t, const Grid& grid);

namespace tridiagonal {

/// Thomas algorithm for a diagonally dominant system; sizes must agree
/// (lower[0] and upper[n-1] are ignored).
std::vector<double> solve(std::span<const double> lower, std::span<const double> diag,
                          std::span<const double> upper, std::span<const double> rhs);
std::vector<double> apply(std::span<const double> lower, std::span<const double> diag,
                          std::span<const double> upper, std::span<const double> x);

}  // namespace tridiagonal

/// Local Lax-Friedrichs numerical flux for f(u) = u^2 / 2.
inline double llf_flux(double left, double right) noexcept {
  const double lambda = left < 0 ? -left : left;
  const double lambda_r = right < 0 ? -right : right;
  const double speed = lambda > lambda_r ? lambda : lambda_r;
  return 0.25 * (left * left + right * right) - 0.5 * speed * (right - left);
}

/// One-step operator for u_t + (u^2/2)_x = D u_xx (+ transport noise).
/// Convection is explicit, diffusion uses theta-weighting (theta = 1/2 is
/// Crank-Nicolson) with a factorization cached per dt. End nodes are held
/// fixed at their current values.
class BurgersStepper {
 public:
  BurgersStepper(const Grid& grid, double diffusion, double dt, double theta = 0.5);

  /// Advances u in place by dt. `transport` = sigma * dB adds the central
  /// difference transport term transport * u_x. Returns false if the result
  /// exceeds `guard` in max norm (u is then left in the failed state).
  bool step(std::span<double> u, double dt, double transport, double guard);

  double diffusion() const noexcept { return diffusion_; }
  const Grid& grid() const noexcept { return grid_; }

 private:
  void factorize(double dt);

  Grid grid_;
  double diffusion_;
  double theta_;
  double factored_dt_ = -1.0;
  double ratio_ = 0.0;            // D dt / dx^2
  std::vector<double> c_prime_;   // Thomas forward sweep, constant coefficients
  std::vector<double> inv_denom_;
  std::vector<double> flux_;
  std::vector<double> rhs_;
};

/// The max-norm blowup guard 2 max(|u_-|, |u_+|) + 1.
double stability_guard(double u_left, double u_right) noexcept;

/// Largest admissible time step: 0.4 dx / max|u|, and (dx / (3 sigma))^2
/// when sigma > 0.
double stable_time_step(const Grid& grid, double max_speed, double sigma = 0.0);

/// Advances u0 to t_end by steps of dt; the remainder of t_end / dt is taken
/// as one shortened final step. Throws StabilityError on blowup.
Field fd_viscous_solve(const Field& u0, const ViscousParams& params, double t_end, double dt);

}  // namespace wavelab
