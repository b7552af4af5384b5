#include "wavelab/analysis.hpp"

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wavelab {

namespace {

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

double lp_norm_power(const Field& v, double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lp_norm_power needs 1 <= p < inf");
  const std::size_t n = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(v[i]);
    const double term = p == 2.0 ? a * a : std::pow(a, p);
    sum += trapezoid_weight(i, n) * term;
  }
  return sum * v.grid().dx();
}

double lp_norm(const Field& v, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  if (std::isinf(p)) return v.max_abs();
  return std::pow(lp_norm_power(v, p), 1.0 / p);
}

EnergyDiagnostics energy_diagnostics(const Field& phi, const Field& ubar_slope) {
  require_same_grid(phi, ubar_slope);
  const std::size_t n = phi.size();
  const double dx = phi.grid().dx();
  EnergyDiagnostics d;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = trapezoid_weight(i, n);
    d.l2_sq += w * phi[i] * phi[i];
    d.weighted_l2 += w * phi[i] * phi[i] * ubar_slope[i];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double g = (phi[i + 1] - phi[i]) / dx;
    d.h1_seed += g * g;
  }
  d.l2_sq *= dx;
  d.weighted_l2 *= dx;
  d.h1_seed *= dx;
  return d;
}

SampledFunction::SampledFunction(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw std::invalid_argument("SampledFunction: times and values differ in length");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i]) || !std::isfinite(values_[i])) {
      throw std::invalid_argument("SampledFunction: non-finite sample");
    }
    if (times_[i] < 0.0) throw std::invalid_argument("SampledFunction: negative time");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("SampledFunction: times must be strictly increasing");
    }
  }
}

AreaPremises::AreaPremises(double C0, double C1, double alpha, double beta, double gamma)
    : C0_(C0), C1_(C1), alpha_(alpha), beta_(beta), gamma_(gamma) {
  if (!(C0 > 0.0)) throw std::invalid_argument("Area premises need C0 > 0");
  if (!(C1 > 0.0)) throw std::invalid_argument("Area premises need C1 > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("Area premises need beta >= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("Area premises need gamma >= 0");
  if (!(beta < alpha)) throw std::invalid_argument("Area premises need 0 <= beta < alpha");
  if (!(alpha + beta < 2.0)) throw std::invalid_argument("Area premises need alpha + beta < 2");
}

namespace {

double log_factor(double t, double power) {
  if (power == 0.0) return 1.0;
  return std::pow(std::max(std::log1p(t), 1e-12), power);
}

}  // namespace

double area_envelope(const AreaPremises& prem, double t) {
  return 2.0 * std::sqrt(prem.C0() * prem.C1()) * std::pow(1.0 + t, prem.envelope_exponent()) *
         log_factor(t, 0.5 * prem.gamma());
}

AreaReport area_check(const SampledFunction& f, const AreaPremises& prem,
                      std::optional<double> t_star) {
  if (f.size() < 2) throw std::invalid_argument("area_check needs at least two samples");
  const auto& t = f.times();
  const auto& v = f.values();
  const std::size_t n = f.size();

  AreaReport report;
  report.t_star = t_star.value_or(t.front() + 0.2 * (t.back() - t.front()));
  report.min_spacing = std::numeric_limits<double>::infinity();

  report.premise1_ok = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = t[i + 1] - t[i];
    report.min_spacing = std::min(report.min_spacing, h);
    report.max_spacing = std::max(report.max_spacing, h);
    const double quotient = (v[i + 1] - v[i]) / h;
    const double bound = prem.C0() * std::pow(1.0 + t[i], -prem.alpha()) + 1e-9 * (1.0 + std::abs(v[i]));
    if (quotient > bound) report.premise1_ok = false;
  }

  report.premise2_ok = true;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) cumulative += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    const double bound = prem.C1() * std::pow(1.0 + t[i], prem.beta()) * log_factor(t[i], prem.gamma());
    if (cumulative > bound + 1e-9 * (1.0 + cumulative)) report.premise2_ok = false;
  }

  if (!report.premise1_ok || !report.premise2_ok) return report;

  bool conclusion = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] < report.t_star) continue;
    const double ratio = v[i] / area_envelope(prem, t[i]);
    report.worst_conclusion_ratio = std::max(report.worst_conclusion_ratio, ratio);
    if (v[i] > area_envelope(prem, t[i])) conclusion = false;
  }
  report.conclusion_ok = conclusion;

  std::optional<double> first;
  for (std::size_t i = n; i-- > 0;) {
    if (v[i] > area_envelope(prem, t[i])) break;
    first = t[i];
  }
  report.first_ok_time = first;
  return report;
}

AreaPremises fit_area_premises(const SampledFunction& f, double alpha, double beta,
                               double gamma) {
  if (f.size() < 2) throw std::invalid_argument("fit_area_premises needs at least two samples");
  // validates the exponents before any work
  (void)AreaPremises(1.0, 1.0, alpha, beta, gamma);
  const auto& t = f.times();
  const auto& v = f.values();
  double C0 = 1e-300, C1 = 1e-300;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i + 1 < f.size()) {
      const double quotient = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
      C0 = std::max(C0, std::abs(quotient) * std::pow(1.0 + t[i], alpha));
    }
    if (i > 0) cumulative += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    C1 = std::max(C1, cumulative / (std::pow(1.0 + t[i], beta) * log_factor(t[i], gamma)));
  }
  return AreaPremises(C0, C1, alpha, beta, gamma);
}

SampledFunction area_naive_bound(const SampledFunction& f, double C0, double alpha) {
  if (!(C0 > 0.0)) throw std::invalid_argument("area_naive_bound needs C0 > 0");
  double c = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    c = std::max(c, f.values()[i] * std::pow(1.0 + f.times()[i], alpha - 1.0));
  }
  std::vector<double> envelope(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    envelope[i] = c * std::pow(1.0 + f.times()[i], 1.0 - alpha);
  }
  return SampledFunction(f.times(), std::move(envelope));
}

namespace {

// int_s^t (1+r)^-alpha dr
double rise_primitive(double alpha, double s, double t) {
  if (alpha == 1.0) return std::log((1.0 + t) / (1.0 + s));
  return (std::pow(1.0 + t, 1.0 - alpha) - std::pow(1.0 + s, 1.0 - alpha)) / (1.0 - alpha);
}

// int_s^t rise_primitive(alpha, s, tau) dtau
double rise_area(double alpha, double s, double t) {
  const double a = 1.0 + s;
  const double b = 1.0 + t;
  if (alpha == 1.0) return b * std::log(b / a) - (t - s);
  if (alpha == 2.0) return (t - s) / a - std::log(b / a);
  return ((std::pow(b, 2.0 - alpha) - std::pow(a, 2.0 - alpha)) / (2.0 - alpha) -
          std::pow(a, 1.0 - alpha) * (t - s)) /
         (1.0 - alpha);
}

}  // namespace

AreaWitness::AreaWitness(double alpha, double epsilon, double C0, std::vector<WitnessPeak> peaks)
    : alpha_(alpha), epsilon_(epsilon), C0_(C0), peaks_(std::move(peaks)) {}

double AreaWitness::rise(const WitnessPeak& p, double t) const {
  return C0_ * rise_primitive(alpha_, p.s, t);
}

double AreaWitness::value(double t) const {
  for (const auto& p : peaks_) {
    if (t < p.s) return 0.0;
    if (t <= p.t) return rise(p, t);
    if (t < p.z) return p.peak * (p.z - t) / (p.z - p.t);
  }
  return 0.0;
}

double AreaWitness::integral() const {
  double total = 0.0;
  for (const auto& p : peaks_) total += p.rise_area + p.descent_area;
  return total;
}

SampledFunction AreaWitness::sample(std::size_t per_rise) const {
  if (per_rise < 2) throw std::invalid_argument("AreaWitness::sample needs per_rise >= 2");
  std::vector<double> times{0.0};
  std::vector<double> values{0.0};
  for (const auto& p : peaks_) {
    for (std::size_t k = 0; k < per_rise; ++k) {
      const double t = p.s + (p.t - p.s) * static_cast<double>(k) / static_cast<double>(per_rise - 1);
      if (t <= times.back()) continue;
      times.push_back(t);
      values.push_back(k + 1 == per_rise ? p.peak : rise(p, t));
    }
    times.push_back(p.z);
    values.push_back(0.0);
  }
  return SampledFunction(std::move(times), std::move(values));
}

AreaWitness area_witness(double alpha, double epsilon, double C0, int n_max) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("area_witness needs alpha in (0, 2]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("area_witness needs epsilon > 0");
  if (!(C0 > 0.0)) throw std::invalid_argument("area_witness needs C0 > 0");
  if (n_max < 2) throw std::invalid_argument("area_witness needs n_max >= 2");

  const double target_power = -0.5 * alpha - epsilon;
  std::vector<WitnessPeak> peaks;
  for (int n = 1; n <= n_max; ++n) {
    WitnessPeak p;
    p.n = n;
    p.s = std::exp(static_cast<double>(n));
    const double s_next = std::exp(static_cast<double>(n + 1));

    // C0 * int_s^t (1+r)^-alpha dr rises from 0 while (1+t)^target falls.
    auto gap = [&](double t) { return C0 * rise_primitive(alpha, p.s, t) - std::pow(1.0 + t, target_power); };
    double hi = p.s + 1.0;
    while (gap(hi) < 0.0) {
      hi = p.s + 2.0 * (hi - p.s);
      if (hi > 1e300) throw std::domain_error("area_witness: no peak for n = " + std::to_string(n));
    }
    std::uintmax_t iterations = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        gap, p.s, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
    p.t = 0.5 * (bracket.first + bracket.second);
    if (std::abs(bracket.second - bracket.first) > 1e-10 * std::max(1.0, p.t)) {
      throw std::domain_error("area_witness: peak root did not converge for n = " + std::to_string(n));
    }
    if (p.t >= s_next) {
      throw std::domain_error("area_witness: t_n >= s_{n+1} for n = " + std::to_string(n));
    }
    p.peak = C0 * rise_primitive(alpha, p.s, p.t);
    p.z = p.t + std::min(std::ldexp(1.0, -n) / (1.0 + p.peak), 0.5 * (s_next - p.t));
    p.rise_area = C0 * rise_area(alpha, p.s, p.t);
    p.descent_area = 0.5 * p.peak * (p.z - p.t);
    peaks.push_back(p);
  }
  return AreaWitness(alpha, epsilon, C0, std::move(peaks));
}

double RateFit::model(double t) const {
  const double l = std::log(2.0 + t);
  return constant * std::pow(2.0 + t, exponent) * std::pow(l, log_factor_power);
}

RateFit rate_fit(const SampledFunction& series, std::pair<double, double> window, bool with_log) {
  if (!(window.first < window.second)) throw std::invalid_argument("rate_fit needs t_lo < t_hi");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.times()[i];
    if (t < window.first || t > window.second) continue;
    const double v = series.values()[i];
    if (!(v > 0.0)) {
      throw std::invalid_argument("rate_fit: nonpositive value at t = " + std::to_string(t));
    }
    x.push_back(t);
    y.push_back(std::log(v));
  }
  if (x.size() < 10) throw std::invalid_argument("rate_fit needs at least 10 samples in the window");

  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  const Eigen::Index k = with_log ? 3 : 2;
  Eigen::MatrixXd design(m, k);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double l = std::log(2.0 + x[static_cast<std::size_t>(i)]);
    design(i, 0) = 1.0;
    design(i, 1) = l;
    if (with_log) design(i, 2) = std::log(l);
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - design * coef;

  RateFit fit;
  fit.constant = std::exp(coef(0));
  fit.exponent = coef(1);
  fit.log_factor_power = with_log ? coef(2) : 0.0;
  fit.window = window;
  fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.samples = x.size();
  return fit;
}

LogGrowthFit fit_log_growth(const SampledFunction& series) {
  if (series.size() < 3) throw std::invalid_argument("fit_log_growth needs at least 3 samples");
  const Eigen::Index m = static_cast<Eigen::Index>(series.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::log(2.0 + series.times()[static_cast<std::size_t>(i)]);
    rhs(i) = series.values()[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = rhs - design * coef;
  LogGrowthFit fit;
  fit.a = coef(0);
  fit.b = coef(1);
  fit.residual = std::sqrt(resid.squaredNorm() / static_cast<double>(m));
  fit.range = rhs.maxCoeff() - rhs.minCoeff();
  return fit;
}

}  // namespace wavelab
