#include "wavelab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "wavelab/errors.hpp"
#include "wavelab/parallel.hpp"

namespace wavelab {

namespace {

constexpr double kShockZMax = 12.0;
constexpr std::size_t kPanelOrder = 16;

// Time at which simulate_path emits a snapshot requested at `request`.
double snapshot_time(double request, double T, double dt) {
  if (request <= 1e-9 * dt) return 0.0;
  const auto full_steps = static_cast<std::size_t>(std::floor(T / dt * (1.0 + 1e-12)));
  auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(request / dt - 1e-9)));
  while (static_cast<double>(k) * dt < request - 1e-9 * dt) ++k;
  while (k > 0 && static_cast<double>(k - 1) * dt >= request - 1e-9 * dt) --k;
  if (k <= full_steps) return static_cast<double>(k) * dt;
  return T;
}

// ubar, ubar_x and u^r on the grid at one time.
struct Reference {
  double time;
  Field ubar;
  Field slope;
  Field fan;
};

Reference make_reference(const RiemannData& r, const Grid& grid, double t) {
  std::vector<double> value(grid.size()), slope(grid.size()), fan(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto s = approx_rarefaction(r, t, grid.x(i));
    value[i] = s.value;
    slope[i] = s.slope;
    fan[i] = exact_rarefaction(r, t, grid.x(i));
  }
  return {t, Field(grid, std::move(value)), Field(grid, std::move(slope)), Field(grid, std::move(fan))};
}

struct PathSeries {
  std::vector<std::vector<double>> headline, perturbation, power;  // [p][time]
  std::vector<double> l2_sq, h1, weighted, phi_inf;
};

std::vector<std::vector<double>> gather(const std::vector<PathSeries>& runs,
                                        std::vector<double> PathSeries::*member) {
  std::vector<std::vector<double>> rows;
  rows.reserve(runs.size());
  for (const auto& r : runs) rows.push_back(r.*member);
  return rows;
}

std::vector<std::vector<double>> gather(const std::vector<PathSeries>& runs,
                                        std::vector<std::vector<double>> PathSeries::*member,
                                        std::size_t index) {
  std::vector<std::vector<double>> rows;
  rows.reserve(runs.size());
  for (const auto& r : runs) rows.push_back((r.*member)[index]);
  return rows;
}

std::optional<RateFit> try_fit(const SeriesStats& s, std::span<const double> times,
                               std::pair<double, double> window) {
  try {
    return rate_fit(s.mean_series(times), window);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

// Linear interpolation of a field at x inside the grid.
double interpolate(const Field& u, double x) {
  const Grid& g = u.grid();
  const double s = std::clamp((x - g.x_min()) / g.dx(), 0.0, static_cast<double>(g.size() - 1));
  const auto i = std::min(static_cast<std::size_t>(s), g.size() - 2);
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * u[i] + f * u[i + 1];
}

struct Moments {
  double mean = 0.0, var = 0.0, mean_se = 0.0, var_se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const auto m = static_cast<double>(v.size());
  Moments out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / m;
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= m;
  m4 /= m;
  out.var = m2 * m / (m - 1.0);
  out.mean_se = std::sqrt(out.var / m);
  out.var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / m);
  return out;
}

}  // namespace

double default_half_width(const RiemannData& r, double T) {
  if (!(T >= 0.0)) throw std::invalid_argument("default_half_width needs T >= 0");
  return r.max_speed() * T + 20.0;
}

void EnsembleConfig::validate() const {
  if (paths < 1) throw std::invalid_argument("ensemble needs paths >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("ensemble needs T > 0");
  if (!(dt >= 0.0)) throw std::invalid_argument("ensemble dt must be >= 0 (0 = automatic)");
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw std::invalid_argument("epsilon must lie in (0, 1/4)");
  }
  if (p_list.empty()) throw std::invalid_argument("p_list must not be empty");
  for (double p : p_list) {
    if (!(p >= 2.0)) throw std::invalid_argument("p_list entries must lie in [2, inf]");
  }
  if (!std::is_sorted(record_times.begin(), record_times.end()) ||
      std::adjacent_find(record_times.begin(), record_times.end()) != record_times.end()) {
    throw std::invalid_argument("record_times must be strictly increasing");
  }
  if (!record_times.empty() && (record_times.front() < 0.0 || record_times.back() > T)) {
    throw std::invalid_argument("record_times must lie in [0, T]");
  }
  if (perturbation_amplitude && !std::isfinite(*perturbation_amplitude)) {
    throw std::invalid_argument("perturbation amplitude must be finite");
  }
  if (fit_window && !(fit_window->first < fit_window->second)) {
    throw std::invalid_argument("fit window needs t_lo < t_hi");
  }
}

double EnsembleConfig::amplitude() const {
  return perturbation_amplitude.value_or(0.5 * (riemann.u_plus() - riemann.u_minus()));
}

std::vector<double> EnsembleConfig::resolved_record_times() const {
  if (!record_times.empty()) return record_times;
  const double start = std::min(1.0, T);
  constexpr std::size_t count = 400;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = start + (T - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double EnsembleConfig::resolved_dt() const {
  if (dt > 0.0) return dt;
  const Field u0 = perturbed_initial_data(*this);
  return admissible_time_step(grid, std::max(u0.max_abs(), riemann.max_speed()), noise, scheme);
}

std::pair<double, double> EnsembleConfig::resolved_fit_window() const {
  return fit_window.value_or(std::pair{T / 10.0, T});
}

Field perturbed_initial_data(const EnsembleConfig& cfg) {
  if (!cfg.riemann.is_rarefaction()) {
    throw std::invalid_argument("ensemble initial data needs rarefaction states (u_- < u_+)");
  }
  const double a = cfg.amplitude();
  return Field::sample(cfg.grid, [&](double x) {
    return approx_rarefaction_initial(cfg.riemann, x) + a * std::exp(-x * x);
  });
}

BoundaryData rarefaction_far_field(const RiemannData& r, const Grid& grid) {
  const double lo = grid.x_min(), hi = grid.x_max();
  return [r, lo, hi](double t) {
    if (t <= 0.0) {
      return std::pair{approx_rarefaction_initial(r, lo), approx_rarefaction_initial(r, hi)};
    }
    return std::pair{approx_rarefaction(r, t, lo).value, approx_rarefaction(r, t, hi).value};
  };
}

SampledFunction SeriesStats::mean_series(std::span<const double> times) const {
  return SampledFunction(std::vector<double>(times.begin(), times.end()), mean);
}

SeriesStats summarize(const std::vector<std::vector<double>>& rows) {
  SeriesStats s;
  s.samples = rows.size();
  if (rows.empty()) return s;
  const std::size_t n = rows.front().size();
  s.mean.assign(n, 0.0);
  s.std_error.assign(n, 0.0);
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("summarize: ragged rows");
    for (std::size_t j = 0; j < n; ++j) s.mean[j] += r[j];
  }
  const auto m = static_cast<double>(rows.size());
  for (double& v : s.mean) v /= m;
  if (rows.size() > 1) {
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < n; ++j) {
        const double d = r[j] - s.mean[j];
        s.std_error[j] += d * d;
      }
    }
    for (double& v : s.std_error) v = std::sqrt(v / (m - 1.0) / m);
  }
  return s;
}

RarefactionResult rarefaction_stability(const EnsembleConfig& cfg) {
  cfg.validate();
  const std::vector<double> requested = cfg.resolved_record_times();
  if (requested.front() <= 0.0) {
    throw std::invalid_argument("rarefaction_stability records must start at t > 0");
  }
  const Field u0 = perturbed_initial_data(cfg);
  const double dt = cfg.resolved_dt();
  const Grid& grid = cfg.grid;
  const std::size_t nt = requested.size();
  const std::size_t np = cfg.p_list.size();

  std::vector<Reference> refs(nt, Reference{0.0, Field(grid, 0.0), Field(grid, 0.0), Field(grid, 0.0)});
  parallel_for(nt, [&](std::size_t j) {
    refs[j] = make_reference(cfg.riemann, grid, snapshot_time(requested[j], cfg.T, dt));
  });

  PathSettings base;
  base.scheme = cfg.scheme;
  base.T = cfg.T;
  base.dt = dt;
  base.record_times = requested;
  if (cfg.track_far_field) base.boundary = rarefaction_far_field(cfg.riemann, grid);

  std::vector<std::optional<PathSeries>> runs(cfg.paths);
  std::vector<std::optional<PathFailure>> failed(cfg.paths);
  parallel_for(cfg.paths, [&](std::size_t k) {
    PathSettings settings = base;
    settings.seed = cfg.base_seed + k;
    PathSeries series;
    series.headline.assign(np, std::vector<double>(nt));
    series.perturbation.assign(np, std::vector<double>(nt));
    series.power.assign(np, std::vector<double>(nt));
    series.l2_sq.resize(nt);
    series.h1.resize(nt);
    series.weighted.resize(nt);
    series.phi_inf.resize(nt);
    std::size_t j = 0;
    auto sink = [&](double, double time, const Field& u) {
      const Reference& ref = refs[j];
      if (std::abs(time - ref.time) > 1e-9 * std::max(1.0, time)) {
        throw std::logic_error("snapshot time does not match the reference table");
      }
      const Field phi = u - ref.ubar;
      const Field gap = u - ref.fan;
      for (std::size_t q = 0; q < np; ++q) {
        const double p = cfg.p_list[q];
        series.headline[q][j] = lp_norm(gap, p);
        series.perturbation[q][j] = lp_norm(phi, p);
        series.power[q][j] = std::isinf(p) ? 0.0 : lp_norm_power(phi, p);
      }
      const auto e = energy_diagnostics(phi, ref.slope);
      series.l2_sq[j] = e.l2_sq;
      series.h1[j] = e.h1_seed;
      series.weighted[j] = e.weighted_l2;
      series.phi_inf[j] = phi.max_abs();
      ++j;
    };
    try {
      simulate_path(u0, cfg.noise, cfg.riemann, settings, sink);
      runs[k] = std::move(series);
    } catch (const PathError& e) {
      failed[k] = PathFailure{e.seed(), e.time(), e.what()};
    }
  });

  RarefactionResult out;
  std::vector<PathSeries> ok;
  for (std::size_t k = 0; k < cfg.paths; ++k) {
    if (runs[k]) {
      ok.push_back(std::move(*runs[k]));
      out.seeds.push_back(cfg.base_seed + k);
    } else {
      out.failures.push_back(*failed[k]);
    }
  }
  if (static_cast<double>(out.failures.size()) > 0.01 * static_cast<double>(cfg.paths) ||
      ok.empty()) {
    std::ostringstream msg;
    msg << out.failures.size() << " of " << cfg.paths << " paths failed; seeds:";
    for (const auto& f : out.failures) msg << ' ' << f.seed;
    throw Error(msg.str());
  }

  for (const auto& r : refs) out.times.push_back(r.time);
  out.p_list = cfg.p_list;
  out.fit_window = cfg.resolved_fit_window();
  for (std::size_t q = 0; q < np; ++q) {
    out.headline.push_back(summarize(gather(ok, &PathSeries::headline, q)));
    out.perturbation.push_back(summarize(gather(ok, &PathSeries::perturbation, q)));
    out.perturbation_power.push_back(std::isinf(cfg.p_list[q])
                                         ? SeriesStats{}
                                         : summarize(gather(ok, &PathSeries::power, q)));
    out.headline_fits.push_back(try_fit(out.headline.back(), out.times, out.fit_window));
    out.perturbation_fits.push_back(try_fit(out.perturbation.back(), out.times, out.fit_window));
  }
  out.phi_l2_sq = summarize(gather(ok, &PathSeries::l2_sq));
  out.phi_x_l2_sq = summarize(gather(ok, &PathSeries::h1));
  out.weighted_l2 = summarize(gather(ok, &PathSeries::weighted));
  if (nt >= 20) {
    for (const auto& r : ok) {
      out.as_statistic.push_back(as_rate_statistic(out.times, r.phi_inf, cfg.epsilon));
    }
  }
  return out;
}

NormalizedBound normalized_power_bound(const RarefactionResult& r, double p) {
  const auto it = std::find(r.p_list.begin(), r.p_list.end(), p);
  if (it == r.p_list.end() || std::isinf(p)) {
    throw std::invalid_argument("normalized_power_bound: p not among the finite p_list entries");
  }
  const auto& series = r.perturbation_power[static_cast<std::size_t>(it - r.p_list.begin())].mean;
  const std::size_t n = r.times.size();
  if (n < 2) throw std::invalid_argument("normalized_power_bound needs at least two samples");
  NormalizedBound out;
  out.p = p;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = r.times[j];
    const double v = series[j] * std::pow(2.0 + t, (p - 2.0) / 4.0) / std::pow(std::log(2.0 + t), p);
    double& slot = j < n / 2 ? out.first_half_max : out.second_half_max;
    slot = std::max(slot, v);
  }
  return out;
}

MomentStability second_moment_stability(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("second_moment_stability needs >= 2 samples");
  auto m2 = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s / static_cast<double>(v.size());
  };
  MomentStability out;
  out.full_paths = samples.size();
  out.half_paths = samples.size() / 2;
  out.second_moment_half = m2(samples.first(out.half_paths));
  out.second_moment_full = m2(samples);
  out.ratio = out.second_moment_half > 0.0 ? out.second_moment_full / out.second_moment_half
                                           : (out.second_moment_full > 0.0 ? kInfinityNorm : 1.0);
  return out;
}

double as_rate_statistic(std::span<const double> times, std::span<const double> norms,
                         double epsilon) {
  if (times.size() != norms.size()) {
    throw std::invalid_argument("as_rate_statistic: times and norms differ in length");
  }
  if (times.size() < 20) throw std::invalid_argument("as_rate_statistic needs >= 20 samples");
  double best = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    best = std::max(best, std::pow(2.0 + times[k], 0.25 - epsilon) * norms[k]);
  }
  return best;
}

ShockQuadrature shock_instability_quadrature(const ShockProfileParams& p, double sigma,
                                             std::span<const double> times,
                                             std::size_t quad_nodes) {
  if (p.c() != 1.0) throw std::invalid_argument("shock quadrature needs c = 1");
  if (quad_nodes < 64) throw std::invalid_argument("shock quadrature needs quad_nodes >= 64");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  const std::size_t panels = quad_nodes / kPanelOrder;
  using Rule = boost::math::quadrature::gauss<double, kPanelOrder>;

  std::vector<double> values;
  values.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("shock quadrature needs t >= 0");
    const double k = p.u_minus() * sigma * std::sqrt(t) / (4.0 * p.nu());
    // Panel edges z_j = Z (r^j - 1) / (r^P - 1); the first panel is no wider
    // than half the tanh layer 1/k.
    const double first = k > 0.0 ? std::min(kShockZMax / static_cast<double>(panels), 0.5 / k)
                                 : kShockZMax / static_cast<double>(panels);
    double ratio = 1.0;
    if (first < kShockZMax / static_cast<double>(panels) * (1.0 - 1e-12)) {
      auto width = [&](double r) {
        return kShockZMax * (r - 1.0) / (std::pow(r, static_cast<double>(panels)) - 1.0) - first;
      };
      boost::uintmax_t iters = 200;
      const auto [lo, hi] = boost::math::tools::toms748_solve(
          width, 1.0 + 1e-9, 64.0, boost::math::tools::eps_tolerance<double>(50), iters);
      ratio = 0.5 * (lo + hi);
    }
    double sum = 0.0, left = 0.0;
    double step = ratio == 1.0 ? kShockZMax / static_cast<double>(panels) : first;
    for (std::size_t j = 0; j < panels; ++j) {
      const double right = j + 1 == panels ? kShockZMax : left + step;
      sum += Rule::integrate(
          [&](double z) { return shock_shift_gap(p, sigma * std::sqrt(t) * z) * std::exp(-0.5 * z * z); },
          left, right);
      left = right;
      step *= ratio;
    }
    values.push_back(std::sqrt(2.0 / std::numbers::pi) * sum);
  }
  return {SampledFunction(std::vector<double>(times.begin(), times.end()), std::move(values)),
          std::erfc(kShockZMax / std::sqrt(2.0))};
}

ShockMonteCarlo shock_instability_monte_carlo(const ShockProfileParams& p, double sigma,
                                              std::span<const double> times, std::size_t paths,
                                              std::uint64_t base_seed) {
  if (paths < 2) throw std::invalid_argument("shock Monte Carlo needs paths >= 2");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
    throw std::invalid_argument("shock Monte Carlo needs sorted nonnegative times");
  }
  const std::size_t nt = times.size();
  std::vector<std::vector<double>> rows(paths, std::vector<double>(nt));
  parallel_for(paths, [&](std::size_t k) {
    const std::uint64_t seed = base_seed + k;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    double b = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      b += std::sqrt(times[j] - prev) * normal(engine);
      prev = times[j];
      rows[k][j] = shock_shift_gap(p, sigma * b);
    }
  });
  const SeriesStats s = summarize(rows);
  return {std::vector<double>(times.begin(), times.end()), s.mean, s.std_error, paths};
}

CrossValidationReport scheme_cross_validation(const EnsembleConfig& cfg, std::size_t levels,
                                              std::vector<double> probes) {
  cfg.validate();
  if (levels < 1) throw std::invalid_argument("cross validation needs levels >= 1");
  if (cfg.paths < 2) throw std::invalid_argument("cross validation needs paths >= 2");
  const std::vector<double> requested =
      cfg.record_times.empty() ? std::vector<double>{cfg.T} : cfg.record_times;
  if (probes.empty()) {
    const double reach = std::min(0.5 * (cfg.grid.x_max() - cfg.grid.x_min()) / 2.0,
                                  cfg.riemann.max_speed() * cfg.T + 2.0);
    const double centre = 0.5 * (cfg.grid.x_min() + cfg.grid.x_max());
    for (int i = -2; i <= 2; ++i) probes.push_back(centre + reach * i / 2.0);
  }

  CrossValidationReport report;
  report.paths = cfg.paths;
  Grid grid = cfg.grid;
  for (std::size_t level = 0; level < levels; ++level) {
    EnsembleConfig lc = cfg;
    lc.grid = grid;
    lc.scheme = Scheme::euler_maruyama;
    const Field u0 = perturbed_initial_data(lc);
    const double speed = std::max(u0.max_abs(), cfg.riemann.max_speed());
    const double dt = cfg.dt > 0.0 ? cfg.dt / std::pow(4.0, static_cast<double>(level))
                                   : admissible_time_step(grid, speed, cfg.noise, Scheme::euler_maruyama);
    const bool finest = level + 1 == levels;

    std::vector<std::vector<double>> gaps(cfg.paths);
    std::vector<std::array<std::vector<double>, 2>> probe_values(cfg.paths);
    parallel_for(cfg.paths, [&](std::size_t k) {
      PathSettings s;
      s.T = cfg.T;
      s.dt = dt;
      s.seed = cfg.base_seed + k;
      s.record_times = requested;
      if (cfg.track_far_field) s.boundary = rarefaction_far_field(cfg.riemann, grid);
      s.scheme = Scheme::euler_maruyama;
      const auto em = simulate_path(u0, cfg.noise, cfg.riemann, s);
      s.scheme = Scheme::shift;
      const auto sh = simulate_path(u0, cfg.noise, cfg.riemann, s);
      for (std::size_t j = 0; j < em.size(); ++j) {
        gaps[k].push_back(lp_norm(em[j].field - sh[j].field, 2.0));
      }
      if (finest) {
        for (double x : probes) {
          probe_values[k][0].push_back(interpolate(em.back().field, x));
          probe_values[k][1].push_back(interpolate(sh.back().field, x));
        }
      }
    });
    const SeriesStats s = summarize(gaps);
    report.levels.push_back({grid.size(), grid.dx(), dt, s.mean, s.std_error});
    if (level == 0) {
      for (double r : requested) report.times.push_back(snapshot_time(r, cfg.T, dt));
    }

    if (finest) {
      for (std::size_t i = 0; i < probes.size(); ++i) {
        std::vector<double> a, b;
        for (std::size_t k = 0; k < cfg.paths; ++k) {
          a.push_back(probe_values[k][0][i]);
          b.push_back(probe_values[k][1][i]);
        }
        const Moments ma = moments(a), mb = moments(b);
        ProbeComparison c;
        c.x = probes[i];
        c.mean_em = ma.mean;
        c.mean_shift = mb.mean;
        c.mean_tolerance = 3.0 * std::hypot(ma.mean_se, mb.mean_se);
        c.var_em = ma.var;
        c.var_shift = mb.var;
        c.var_tolerance = 3.0 * std::hypot(ma.var_se, mb.var_se);
        c.mean_ok = std::abs(ma.mean - mb.mean) <= c.mean_tolerance;
        c.var_ok = std::abs(ma.var - mb.var) <= c.var_tolerance;
        report.probes.push_back(c);
      }
    }
    grid = Grid(grid.x_min(), grid.x_max(), 2 * grid.size() - 1);
  }
  for (std::size_t level = 0; level + 1 < report.levels.size(); ++level) {
    const double a = report.levels[level].mean_gap.back();
    const double b = report.levels[level + 1].mean_gap.back();
    report.slopes.push_back(std::log2(a / b));
  }
  return report;
}

}  // namespace wavelab
