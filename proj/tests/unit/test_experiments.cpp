#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "wavelab/errors.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/parallel.hpp"

using namespace wavelab;
using doctest::Approx;

namespace {
EnsembleConfig tiny_ensemble() {
  EnsembleConfig c;
  c.paths = 4;
  c.T = 20;
  c.grid = Grid::symmetric(default_half_width(c.riemann, c.T), 512);
  c.record_times.clear();
  for (int k = 1; k <= 40; ++k) c.record_times.push_back(0.5 * k);
  c.fit_window = std::pair{2.0, 20.0};
  return c;
}

// E S(sigma B(t)) by a dense trapezoid in z over [-12, 12]
double dense_expectation(const ShockProfileParams& p, double sigma, double t, int n) {
  const double h = 24.0 / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double z = -12 + i * h;
    const double a = sigma * std::sqrt(t) * z;
    const double gap = 2 * p.u_minus() * std::tanh(p.u_minus() * std::abs(a) / (4 * p.nu()));
    s += (i == 0 || i == n ? 0.5 : 1.0) * gap * std::exp(-0.5 * z * z);
  }
  return s * h / std::sqrt(2 * std::numbers::pi);
}
}  // namespace

TEST_CASE("ensemble configuration") {
  EnsembleConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.amplitude() == 1.0);
  CHECK(default_half_width(c.riemann, 200) == 220.0);
  const auto times = c.resolved_record_times();
  CHECK(times.size() == 400);
  CHECK(times.front() == 1.0);
  CHECK(times.back() == 200.0);
  CHECK(c.resolved_fit_window() == std::pair{20.0, 200.0});
  CHECK(c.resolved_dt() == Approx(admissible_time_step(c.grid, 2.0, c.noise, Scheme::euler_maruyama)));

  auto bad = c;
  bad.epsilon = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.p_list = {1.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.record_times = {2, 1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.record_times = {1, 300};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.paths = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.riemann = RiemannData(1, -1);
  CHECK_THROWS_AS(perturbed_initial_data(bad), std::invalid_argument);
}

TEST_CASE("helpers") {
  const auto s = summarize({{1, 2}, {3, 6}});
  CHECK(s.mean == std::vector<double>{2, 4});
  CHECK(s.std_error[0] == Approx(1.0));
  CHECK(s.std_error[1] == Approx(2.0));
  CHECK_THROWS_AS(summarize({{1, 2}, {3}}), std::invalid_argument);

  const RiemannData r(-1, 1);
  const Grid g = Grid::symmetric(30, 61);
  const auto ff = rarefaction_far_field(r, g);
  CHECK(ff(0).first == Approx(approx_rarefaction_initial(r, -30)));
  CHECK(ff(5).second == Approx(approx_rarefaction(r, 5, 30).value));

  const double samples[] = {1, 1, 2, 2};
  const auto m = second_moment_stability(samples);
  CHECK(m.second_moment_half == 1.0);
  CHECK(m.second_moment_full == 2.5);
  CHECK(m.ratio == 2.5);
}

TEST_CASE("almost-sure rate statistic") {
  std::vector<double> t, zero, quarter, slower;
  for (int k = 0; k < 50; ++k) {
    t.push_back(1 + 4 * k);
    zero.push_back(0);
    quarter.push_back(std::pow(2 + t.back(), -0.25));
    slower.push_back(std::pow(2 + t.back(), -0.15));
  }
  CHECK(as_rate_statistic(t, zero, 0.05) == 0.0);
  // (2+t)^{0.2} (2+t)^{-1/4} decreases: the sup sits at the first record
  CHECK(as_rate_statistic(t, quarter, 0.05) == Approx(std::pow(3.0, -0.05)));
  // a slower decay leaves the sup at the final record
  CHECK(as_rate_statistic(t, slower, 0.05) == Approx(std::pow(2 + t.back(), 0.05)));
  CHECK_THROWS_AS(as_rate_statistic(std::span(t).first(10), std::span(zero).first(10), 0.05), std::invalid_argument);
}

TEST_CASE("tiny rarefaction ensemble") {
  const auto c = tiny_ensemble();
  const auto r = rarefaction_stability(c);
  CHECK(r.times.size() == 40);
  CHECK(r.seeds.size() == 4);
  CHECK(r.failures.empty());
  CHECK(r.headline.size() == 4);
  CHECK(r.as_statistic.size() == 4);
  CHECK(r.perturbation_power[3].mean.empty());
  for (double v : r.phi_l2_sq.mean) CHECK(v > 0.0);
  REQUIRE(r.headline_fits[3].has_value());
  CHECK(r.headline_fits[3]->exponent < 0.0);
  const auto b = normalized_power_bound(r, 4);
  CHECK(b.first_half_max > 0.0);
  CHECK_THROWS_AS(normalized_power_bound(r, 3), std::invalid_argument);
  CHECK_THROWS_AS(normalized_power_bound(r, kInfinityNorm), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count") {
  auto c = tiny_ensemble();
  c.paths = 5;
  c.T = 5;
  c.record_times = {};
  for (int k = 1; k <= 20; ++k) c.record_times.push_back(0.25 * k);
  c.fit_window = std::pair{1.0, 5.0};
  const char* old = std::getenv("WAVELAB_THREADS");
  const std::string saved = old ? old : "";
  setenv("WAVELAB_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const auto one = rarefaction_stability(c);
  setenv("WAVELAB_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  const auto three = rarefaction_stability(c);
  if (old) setenv("WAVELAB_THREADS", saved.c_str(), 1); else unsetenv("WAVELAB_THREADS");
  CHECK(one.as_statistic == three.as_statistic);
  CHECK(one.headline[0].mean == three.headline[0].mean);
  CHECK(one.phi_x_l2_sq.mean == three.phi_x_l2_sq.mean);
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(parallel_for(8, [](std::size_t i) { if (i == 5) throw Error("boom"); }, 3), Error);
}

TEST_CASE("shock instability quadrature") {
  const ShockProfileParams p(1, 0.1);
  const std::vector<double> times{0.0, 1e-2, 1.0, 30.0, 1e4};
  const auto q = shock_instability_quadrature(p, 1.0, times);
  CHECK(q.d.values()[0] == 0.0);
  CHECK(q.tail_mass < 1e-30);
  for (std::size_t j = 1; j < times.size(); ++j) {
    // the trapezoid oracle itself converges at O(h^2 k^2); 8e6 nodes keep it below 1e-9
    CHECK(std::abs(q.d.values()[j] - dense_expectation(p, 1.0, times[j], 8000000)) <= 1e-9);
  }
  CHECK(q.d.values().back() >= 1.98);
  CHECK_THROWS_AS(shock_instability_quadrature(ShockProfileParams(1, 0.1, 2), 1, times), std::invalid_argument);
  CHECK_THROWS_AS(shock_instability_quadrature(p, 1, times, 32), std::invalid_argument);
}

TEST_CASE("shock instability Monte Carlo") {
  const ShockProfileParams p(1, 0.1);
  const std::vector<double> times{0.1, 1.0, 10.0};
  const auto quiet = shock_instability_monte_carlo(p, 0.0, times, 100, 1);
  for (double v : quiet.mean) CHECK(v == 0.0);

  const auto mc = shock_instability_monte_carlo(p, 1.0, times, 10000, 1);
  const auto q = shock_instability_quadrature(p, 1.0, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    CHECK(std::abs(mc.mean[j] - q.d.values()[j]) <= 3 * mc.std_error[j]);
  }
  // standard error shrinks like paths^-1/2
  const std::vector<double> t1{1.0}, unsorted{2.0, 1.0};
  const double one = shock_instability_monte_carlo(p, 1.0, t1, 1000, 7).std_error[0];
  const double sixteen = shock_instability_monte_carlo(p, 1.0, t1, 16000, 7).std_error[0];
  CHECK(std::log(sixteen / one) / std::log(16.0) == Approx(-0.5).epsilon(0.2));
  CHECK_THROWS_AS(shock_instability_monte_carlo(p, 1.0, unsorted, 10, 1), std::invalid_argument);
}

TEST_CASE("scheme cross-validation") {
  EnsembleConfig c;
  c.T = 1;
  c.grid = Grid::symmetric(21, 256);
  c.paths = 24;
  SUBCASE("without noise the schemes coincide") {
    c.noise = NoiseParams(0.2, 0.0);
    c.paths = 2;
    const auto r = scheme_cross_validation(c, 2);
    for (const auto& l : r.levels) CHECK(l.mean_gap.back() == 0.0);
    for (const auto& pr : r.probes) {
      CHECK(pr.mean_em == pr.mean_shift);
      CHECK(pr.var_em == pr.var_shift);
    }
  }
  SUBCASE("the gap shrinks under refinement") {
    const auto r = scheme_cross_validation(c, 3);
    REQUIRE(r.levels.size() == 3);
    CHECK(r.levels[1].dt == Approx(r.levels[0].dt / 4).epsilon(0.01));
    CHECK(r.levels[0].mean_gap.back() / r.levels[1].mean_gap.back() >= 1.5);
    CHECK(r.levels[1].mean_gap.back() / r.levels[2].mean_gap.back() >= 1.5);
    CHECK(r.probes.size() == 5);
  }
}
