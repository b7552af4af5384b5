#pragma once

// Monte Carlo ensembles and quadratures: stability of the rarefaction wave
// under transport noise, instability of the viscous shock, and the
// matched-seed comparison of the two SPDE schemes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavelab/analysis.hpp"
#include "wavelab/field.hpp"
#include "wavelab/spde.hpp"
#include "wavelab/waves.hpp"

namespace wavelab {

/// Domain half-width max|u_+-| T + 20.
double default_half_width(const RiemannData& r, double T);

struct EnsembleConfig {
  std::size_t paths = 64;
  std::uint64_t base_seed = 1;
  NoiseParams noise{0.2, 0.3};
  RiemannData riemann{-1.0, 1.0};
  Grid grid = Grid::symmetric(220.0, 4096);
  /// 0 selects the largest admissible step for the scheme.
  double dt = 0.0;
  double T = 200.0;
  /// Empty selects 400 uniform times on [1, T].
  std::vector<double> record_times;
  std::vector<double> p_list{2.0, 4.0, 6.0, kInfinityNorm};
  double epsilon = 0.05;
  /// Amplitude a of the a exp(-x^2) perturbation; empty = (u_+ - u_-) / 2.
  std::optional<double> perturbation_amplitude;
  Scheme scheme = Scheme::euler_maruyama;
  /// Far-field data tracks the approximate rarefaction at the domain ends
  /// instead of the constant states.
  bool track_far_field = true;
  /// Empty selects [T/10, T].
  std::optional<std::pair<double, double>> fit_window;

  void validate() const;
  double amplitude() const;
  std::vector<double> resolved_record_times() const;
  double resolved_dt() const;
  std::pair<double, double> resolved_fit_window() const;
};

/// ubar(0, x) + a exp(-x^2) on the config grid.
Field perturbed_initial_data(const EnsembleConfig& cfg);

/// Dirichlet data ubar(t, x_min), ubar(t, x_max).
BoundaryData rarefaction_far_field(const RiemannData& r, const Grid& grid);

struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t samples = 0;

  SampledFunction mean_series(std::span<const double> times) const;
};

/// Mean and standard error of rows[path][time] over paths.
SeriesStats summarize(const std::vector<std::vector<double>>& rows);

struct PathFailure {
  std::uint64_t seed;
  double time;
  std::string message;
};

struct RarefactionResult {
  std::vector<double> times;
  std::vector<double> p_list;
  /// Per p: ||u - u^r||_p.
  std::vector<SeriesStats> headline;
  /// Per p: ||u - ubar||_p.
  std::vector<SeriesStats> perturbation;
  /// Per finite p: ||u - ubar||_p^p (empty entries for p = infinity).
  std::vector<SeriesStats> perturbation_power;
  SeriesStats phi_l2_sq;
  SeriesStats phi_x_l2_sq;
  SeriesStats weighted_l2;
  /// Per successful path, sup_t (2+t)^{1/4-eps} ||phi(t)||_inf.
  std::vector<double> as_statistic;
  std::vector<std::uint64_t> seeds;
  std::vector<PathFailure> failures;
  std::vector<std::optional<RateFit>> headline_fits;
  std::vector<std::optional<RateFit>> perturbation_fits;
  std::pair<double, double> fit_window;
};

/// Runs the ensemble. Throws Error if more than 1% of paths fail.
RarefactionResult rarefaction_stability(const EnsembleConfig& cfg);

struct NormalizedBound {
  double p = 0.0;
  double first_half_max = 0.0;
  double second_half_max = 0.0;
  bool bounded(double factor) const { return second_half_max <= factor * first_half_max; }
};

/// Max of E||phi||_p^p (2+t)^{(p-2)/4} / ln^p(2+t) over each half of the
/// record times. p must be one of the finite entries of the result's p_list.
NormalizedBound normalized_power_bound(const RarefactionResult& r, double p);

struct MomentStability {
  std::size_t half_paths = 0;
  std::size_t full_paths = 0;
  double second_moment_half = 0.0;
  double second_moment_full = 0.0;
  /// full / half
  double ratio = 0.0;
};

/// Empirical second moment over the first half of the samples vs all of them.
MomentStability second_moment_stability(std::span<const double> samples);

/// max_k (2+t_k)^{1/4-eps} norms_k; needs at least 20 samples.
double as_rate_statistic(std::span<const double> times, std::span<const double> norms,
                         double epsilon);

struct ShockQuadrature {
  SampledFunction d;
  /// Gaussian mass beyond the truncation |z| > z_max.
  double tail_mass = 0.0;
};

/// d(t) = E sup_x |u(x) - u(x + sigma B(t))| for the c = 1 profile, by
/// composite Gauss-Legendre panels on z in [0, 12], graded toward the kink at
/// z = 0. Needs quad_nodes >= 64.
ShockQuadrature shock_instability_quadrature(const ShockProfileParams& p, double sigma,
                                             std::span<const double> times,
                                             std::size_t quad_nodes = 256);

struct ShockMonteCarlo {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t paths = 0;
};

/// Same expectation by sampling B(t) directly along each path.
ShockMonteCarlo shock_instability_monte_carlo(const ShockProfileParams& p, double sigma,
                                              std::span<const double> times, std::size_t paths,
                                              std::uint64_t base_seed);

struct LevelGap {
  std::size_t nodes = 0;
  double dx = 0.0;
  double dt = 0.0;
  /// Mean and standard error over paths of ||u_em - u_shift||_{L^2} per time.
  std::vector<double> mean_gap;
  std::vector<double> gap_std_error;
};

struct ProbeComparison {
  double x = 0.0;
  double mean_em = 0.0, mean_shift = 0.0, mean_tolerance = 0.0;
  double var_em = 0.0, var_shift = 0.0, var_tolerance = 0.0;
  bool mean_ok = false;
  bool var_ok = false;
};

struct CrossValidationReport {
  std::vector<double> times;
  std::vector<LevelGap> levels;
  /// log2(gap_k / gap_{k+1}) of the final-time mean gap.
  std::vector<double> slopes;
  std::vector<ProbeComparison> probes;
  std::size_t paths = 0;
};

/// Matched-seed EM vs shift runs on `levels` grids, each refining dx by 2
/// with dt set to the EM-admissible step (dt scales with dx^2). Probe
/// statistics are taken at the finest level; empty probes selects five
/// points across the active region.
CrossValidationReport scheme_cross_validation(const EnsembleConfig& cfg, std::size_t levels = 3,
                                              std::vector<double> probes = {});

}  // namespace wavelab
