#include "wavelab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "wavelab/errors.hpp"

namespace wavelab {

NoiseParams::NoiseParams(double mu, double sigma) : mu_(mu), sigma_(sigma) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!(sigma * sigma < 2.0 * mu)) {
    throw std::invalid_argument("noise parameters violate sigma^2 < 2*mu");
  }
}

CutoffParam::CutoffParam(double m) : m_(m) {
  if (!(m > 0.0)) throw std::invalid_argument("cut-off radius m must be positive");
}

std::vector<double> BrownianPath::cumulative() const {
  std::vector<double> b(increments.size() + 1, 0.0);
  for (std::size_t k = 0; k < increments.size(); ++k) b[k + 1] = b[k] + increments[k];
  return b;
}

double BrownianPath::quadratic_variation() const noexcept {
  double qv = 0.0;
  for (double d : increments) qv += d * d;
  return qv;
}

BrownianPath sample_brownian(std::uint64_t seed, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_brownian needs dt > 0");
  if (steps < 1) throw std::invalid_argument("sample_brownian needs steps >= 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, std::sqrt(dt));
  BrownianPath path{dt, std::vector<double>(steps), seed};
  for (double& d : path.increments) d = normal(engine);
  return path;
}

std::string_view to_string(Scheme s) noexcept {
  return s == Scheme::shift ? "shift" : "euler_maruyama";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "euler_maruyama" || name == "em") return Scheme::euler_maruyama;
  if (name == "shift") return Scheme::shift;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected euler_maruyama or shift)");
}

void resample_shifted(std::span<const double> u, const Grid& grid, double shift,
                      double left, double right, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  if (u.size() != grid.size() || out.size() != u.size()) {
    throw std::invalid_argument("resample_shifted: size mismatch");
  }
  auto value = [&](std::ptrdiff_t j) {
    if (j < 0) return left;
    if (j >= n) return right;
    return u[static_cast<std::size_t>(j)];
  };
  const double offset = shift / grid.dx();
  const double whole = std::floor(offset);
  const double f = offset - whole;
  const auto base = static_cast<std::ptrdiff_t>(whole);
  // Lagrange weights on nodes -1, 0, 1, 2 relative to the bracketing node
  const double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
  const double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
  const double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
  const double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t j = i + base;
    const double a = value(j - 1), b = value(j), c = value(j + 1), d = value(j + 2);
    double v = w0 * a + w1 * b + w2 * c + w3 * d;
    const bool increasing = a <= b && b <= c && c <= d;
    const bool decreasing = a >= b && b >= c && c >= d;
    if (increasing || decreasing) v = std::clamp(v, std::min(b, c), std::max(b, c));
    out[static_cast<std::size_t>(i)] = v;
  }
}

namespace {

// Advances one field by one step of either scheme, keeping the caches of
// the underlying stepper and a scratch buffer for resampling.
class PathIntegrator {
 public:
  PathIntegrator(const Grid& grid, const NoiseParams& noise, Scheme scheme, double dt)
      : noise_(noise),
        scheme_(scheme),
        stepper_(grid, scheme == Scheme::shift ? noise.effective_viscosity() : noise.mu(), dt),
        scratch_(grid.size()) {}

  // Returns false when the guard trips.
  bool advance(std::span<double> u, double dt, double dB, double left, double right,
               double guard) {
    u.front() = left;
    u.back() = right;
    if (scheme_ == Scheme::euler_maruyama) {
      return stepper_.step(u, dt, noise_.sigma() * dB, guard);
    }
    if (!stepper_.step(u, dt, 0.0, guard)) return false;
    const double shift = noise_.sigma() * dB;
    if (shift != 0.0) {
      resample_shifted(u, stepper_.grid(), shift, left, right, scratch_);
      std::copy(scratch_.begin(), scratch_.end(), u.begin());
      u.front() = left;
      u.back() = right;
    }
    return std::all_of(u.begin(), u.end(), [guard](double v) { return std::abs(v) <= guard; });
  }

 private:
  NoiseParams noise_;
  Scheme scheme_;
  BurgersStepper stepper_;
  std::vector<double> scratch_;
};

Field single_step(const Field& u, const NoiseParams& noise, double dB, double dt, Scheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Field out = u;
  PathIntegrator integrator(u.grid(), noise, scheme, dt);
  const double guard = stability_guard(u.front(), u.back());
  if (!integrator.advance(out.values(), dt, dB, u.front(), u.back(), guard)) {
    throw StabilityError("max-norm guard exceeded", dt);
  }
  return out;
}

}  // namespace

Field em_step(const Field& u, const NoiseParams& noise, double dB, double dt) {
  return single_step(u, noise, dB, dt, Scheme::euler_maruyama);
}

Field shift_step(const Field& u, const NoiseParams& noise, double dB, double dt) {
  return single_step(u, noise, dB, dt, Scheme::shift);
}

double discrete_h1_norm(const Field& v) {
  const double dx = v.grid().dx();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += v[i] * v[i];
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double g = (v[i + 1] - v[i]) / dx;
    sum += g * g;
  }
  return std::sqrt(sum * dx);
}

Field cutoff_project(const Field& v, const CutoffParam& m) {
  const double norm = discrete_h1_norm(v);
  if (norm == 0.0 || norm <= m.m()) return v;
  return (m.m() / norm) * v;
}

BoundaryData constant_boundary(const RiemannData& r) {
  return [left = r.u_minus(), right = r.u_plus()](double) { return std::pair{left, right}; };
}

double admissible_time_step(const Grid& grid, double max_speed, const NoiseParams& noise,
                            Scheme scheme) {
  return stable_time_step(grid, max_speed, scheme == Scheme::euler_maruyama ? noise.sigma() : 0.0);
}

void simulate_path(const Field& u0, const NoiseParams& noise, const RiemannData& riemann,
                   const PathSettings& settings, const SnapshotSink& sink) {
  const double T = settings.T;
  const double dt = settings.dt;
  if (!(T >= 0.0)) throw std::invalid_argument("simulate_path needs T >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_path needs dt > 0");
  const auto& records = settings.record_times;
  if (!std::is_sorted(records.begin(), records.end())) {
    throw std::invalid_argument("record_times must be sorted");
  }
  if (!records.empty() && (records.front() < 0.0 || records.back() > T * (1.0 + 1e-12))) {
    throw std::invalid_argument("record_times must lie in [0, T]");
  }
  const double speed = std::max(u0.max_abs(), riemann.max_speed());
  const double limit = admissible_time_step(u0.grid(), speed, noise, settings.scheme);
  if (dt > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt = " + std::to_string(dt) +
                                " exceeds the stability limit " + std::to_string(limit));
  }

  const BoundaryData boundary = settings.boundary ? settings.boundary : constant_boundary(riemann);
  const double guard = stability_guard(riemann.u_minus(), riemann.u_plus());

  const auto full_steps = static_cast<std::size_t>(std::floor(T / dt * (1.0 + 1e-12)));
  const double remainder = T - static_cast<double>(full_steps) * dt;
  const bool partial = remainder > 1e-12 * dt;
  const std::size_t total_steps = full_steps + (partial ? 1 : 0);

  Field u = u0;
  std::size_t next_record = 0;
  auto emit = [&](double time) {
    while (next_record < records.size() && records[next_record] <= time + 1e-9 * dt) {
      sink(records[next_record], time, u);
      ++next_record;
    }
  };
  emit(0.0);
  if (total_steps == 0) return;

  const BrownianPath path = sample_brownian(settings.seed, dt, total_steps);
  PathIntegrator integrator(u0.grid(), noise, settings.scheme, dt);
  double time = 0.0;
  for (std::size_t k = 0; k < total_steps; ++k) {
    const bool last_partial = partial && k + 1 == total_steps;
    const double h = last_partial ? remainder : dt;
    const double dB = last_partial ? path.increments[k] * std::sqrt(remainder / dt)
                                   : path.increments[k];
    time = last_partial ? T : static_cast<double>(k + 1) * dt;
    const auto [left, right] = boundary(time);
    if (!integrator.advance(u.values(), h, dB, left, right, guard)) {
      throw PathError("max-norm guard exceeded at t = " + std::to_string(time) + " (seed " +
                          std::to_string(settings.seed) + ")",
                      settings.seed, time);
    }
    emit(time);
  }
}

std::vector<Snapshot> simulate_path(const Field& u0, const NoiseParams& noise,
                                    const RiemannData& riemann, const PathSettings& settings) {
  std::vector<Snapshot> out;
  simulate_path(u0, noise, riemann, settings,
                [&](double requested, double time, const Field& u) {
                  out.push_back({requested, time, u});
                });
  return out;
}

}  // namespace wavelab
