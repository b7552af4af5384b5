#pragma once

// Pathwise simulation of du + u u_x dt = mu u_xx dt + sigma u_x dB.
//
// Two schemes share one Brownian path:
//  * euler_maruyama: explicit LLF convection, Crank-Nicolson mu-diffusion and
//    the Ito transport term sigma u_x dB by central differences;
//  * shift: a deterministic step with nu_eff = mu - sigma^2/2 followed by
//    resampling the field at x + sigma dB (u(t, x + sigma B(t)) solves the
//    stochastic equation when u solves the deterministic one).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wavelab/deterministic.hpp"
#include "wavelab/field.hpp"
#include "wavelab/waves.hpp"

namespace wavelab {

/// mu > 0, sigma >= 0 with sigma^2 < 2 mu, so nu_eff = mu - sigma^2/2 > 0.
class NoiseParams {
 public:
  NoiseParams(double mu, double sigma);

  double mu() const noexcept { return mu_; }
  double sigma() const noexcept { return sigma_; }
  double effective_viscosity() const noexcept { return mu_ - 0.5 * sigma_ * sigma_; }

  bool operator==(const NoiseParams&) const = default;

 private:
  double mu_;
  double sigma_;
};

class CutoffParam {
 public:
  explicit CutoffParam(double m);
  double m() const noexcept { return m_; }

 private:
  double m_;
};

struct BrownianPath {
  double dt = 0.0;
  std::vector<double> increments;
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept { return increments.size(); }
  /// B(t_k) for k = 0..steps, with B(0) = 0.
  std::vector<double> cumulative() const;
  double quadratic_variation() const noexcept;
};

/// i.i.d. N(0, dt) increments from a 64-bit Mersenne Twister keyed by seed.
BrownianPath sample_brownian(std::uint64_t seed, double dt, std::size_t steps);

enum class Scheme { euler_maruyama, shift };

std::string_view to_string(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

/// One Ito Euler-Maruyama step; the end nodes of u are held fixed.
Field em_step(const Field& u, const NoiseParams& noise, double dB, double dt);

/// Deterministic step with nu_eff, then resample at x + sigma dB.
Field shift_step(const Field& u, const NoiseParams& noise, double dB, double dt);

/// Values of u at x_i + shift by 4-point Lagrange interpolation. Outside the
/// grid u is extended by `left` / `right`. Where the stencil is monotone the
/// result is clamped to the two bracketing nodes.
void resample_shifted(std::span<const double> u, const Grid& grid, double shift,
                      double left, double right, std::span<double> out);

/// (sum_i v_i^2 dx + sum_i ((v_{i+1} - v_i)/dx)^2 dx)^(1/2).
double discrete_h1_norm(const Field& v);

/// Radial projection onto the H^1 ball of radius m; zero fields pass through.
Field cutoff_project(const Field& v, const CutoffParam& m);

/// Far-field values (left, right) imposed at time t.
using BoundaryData = std::function<std::pair<double, double>(double t)>;

/// Constant u_-, u_+ boundary data.
BoundaryData constant_boundary(const RiemannData& r);

struct Snapshot {
  double requested_time;
  double time;
  Field field;
};

/// Called for every recorded snapshot, in time order.
using SnapshotSink = std::function<void(double requested_time, double time, const Field& u)>;

struct PathSettings {
  Scheme scheme = Scheme::euler_maruyama;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> record_times;
  /// Defaults to constant u_-, u_+.
  BoundaryData boundary;
};

/// Advances u0 along the Brownian path from `seed`; snapshots are taken at
/// the first step time >= each requested time. Throws PathError with the
/// failing time on blowup.
void simulate_path(const Field& u0, const NoiseParams& noise, const RiemannData& riemann,
                   const PathSettings& settings, const SnapshotSink& sink);

std::vector<Snapshot> simulate_path(const Field& u0, const NoiseParams& noise,
                                    const RiemannData& riemann, const PathSettings& settings);

/// Largest time step admissible for the scheme on this grid.
double admissible_time_step(const Grid& grid, double max_speed, const NoiseParams& noise,
                            Scheme scheme);

}  // namespace wavelab
