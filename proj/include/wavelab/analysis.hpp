#pragma once

// Norms, energy diagnostics of the perturbation phi = u - ubar, power-law
// rate fitting, and the Area Inequality toolkit: premise/conclusion checks,
// the classical (1+t)^{1-alpha} envelope, and the optimality witness.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "wavelab/field.hpp"

namespace wavelab {

/// Trapezoidal (sum |v_i|^p w_i dx)^{1/p}; p = infinity gives max |v_i|.
double lp_norm(const Field& v, double p);
/// Trapezoidal sum |v_i|^p w_i dx, i.e. lp_norm(v, p)^p without the root.
double lp_norm_power(const Field& v, double p);

struct EnergyDiagnostics {
  double l2_sq = 0.0;        ///< ||phi||^2
  double h1_seed = 0.0;      ///< ||phi_x||^2 by forward differences
  double weighted_l2 = 0.0;  ///< int phi^2 ubar_x dx
};

EnergyDiagnostics energy_diagnostics(const Field& phi, const Field& ubar_slope);

/// (t, f(t)) samples with strictly increasing times and finite values.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> times, std::vector<double> values);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// Constants of the two premises f' <= C0 (1+t)^-alpha and
/// int_0^t f <= C1 (1+t)^beta ln^gamma(1+t).
class AreaPremises {
 public:
  AreaPremises(double C0, double C1, double alpha, double beta = 0.0, double gamma = 0.0);

  double C0() const noexcept { return C0_; }
  double C1() const noexcept { return C1_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  /// (beta - alpha) / 2
  double envelope_exponent() const noexcept { return 0.5 * (beta_ - alpha_); }

 private:
  double C0_, C1_, alpha_, beta_, gamma_;
};

/// 2 sqrt(C0 C1) (1+t)^{(beta-alpha)/2} ln^{gamma/2}(1+t).
double area_envelope(const AreaPremises& prem, double t);

struct AreaReport {
  bool premise1_ok = false;
  bool premise2_ok = false;
  /// Empty when a premise fails (not applicable).
  std::optional<bool> conclusion_ok;
  /// Smallest sample time after which the conclusion holds through the end.
  std::optional<double> first_ok_time;
  double t_star = 0.0;
  double min_spacing = 0.0;
  double max_spacing = 0.0;
  /// Largest f / envelope over samples with t >= t_star.
  double worst_conclusion_ratio = 0.0;
};

/// Checks both premises on the samples and, when they hold, the conclusion
/// for t >= t_star (default: 20% into the sampled time window).
AreaReport area_check(const SampledFunction& f, const AreaPremises& prem,
                      std::optional<double> t_star = std::nullopt);

/// Constants C0, C1 for which the sampled f meets both premises with the
/// given exponents. C1 is the smallest valid value. C0 bounds |f'| rather than
/// f': the smallest C0 collapses to zero for decreasing f, and the conclusion
/// only sets in once t exceeds a horizon that grows as C0 shrinks.
AreaPremises fit_area_premises(const SampledFunction& f, double alpha, double beta = 0.0,
                               double gamma = 0.0);

/// C (1+t)^{1-alpha} with C = max_i f_i (1+t_i)^{alpha-1}, on f's times.
SampledFunction area_naive_bound(const SampledFunction& f, double C0, double alpha);

struct WitnessPeak {
  int n = 0;
  double s = 0.0;            ///< rise start e^n
  double t = 0.0;            ///< peak time
  double z = 0.0;            ///< end of the linear descent
  double peak = 0.0;         ///< g(t_n)
  double rise_area = 0.0;    ///< int_{s_n}^{t_n} g
  double descent_area = 0.0; ///< int_{t_n}^{z_n} g
};

/// Function that satisfies both premises with beta = gamma = 0 while
/// g(t_n) = (1+t_n)^{-alpha/2-epsilon} at a sequence t_n -> infinity.
class AreaWitness {
 public:
  AreaWitness(double alpha, double epsilon, double C0, std::vector<WitnessPeak> peaks);

  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return epsilon_; }
  double C0() const noexcept { return C0_; }
  const std::vector<WitnessPeak>& peaks() const noexcept { return peaks_; }

  double value(double t) const;
  /// Exact integral over [0, infinity) of the constructed segments.
  double integral() const;
  /// Dense samples: every breakpoint plus `per_rise` points on each rise.
  SampledFunction sample(std::size_t per_rise = 200) const;

 private:
  double rise(const WitnessPeak& p, double t) const;

  double alpha_, epsilon_, C0_;
  std::vector<WitnessPeak> peaks_;
};

AreaWitness area_witness(double alpha, double epsilon, double C0, int n_max);

struct RateFit {
  double exponent = 0.0;
  double log_factor_power = 0.0;
  double constant = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double residual = 0.0;  ///< RMS residual of ln(value)
  std::size_t samples = 0;

  /// constant (2+t)^exponent ln^q(2+t)
  double model(double t) const;
};

/// Least squares of ln(value) on ln(2+t) (and ln ln(2+t) when with_log).
RateFit rate_fit(const SampledFunction& series, std::pair<double, double> window,
                 bool with_log = false);

struct LogGrowthFit {
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  ///< RMS residual
  double range = 0.0;     ///< max - min of the fitted values
};

/// Least squares of value on a + b ln(2+t) over all samples.
LogGrowthFit fit_log_growth(const SampledFunction& series);

}  // namespace wavelab
