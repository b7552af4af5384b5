#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "wavelab/errors.hpp"
#include "wavelab/spde.hpp"

using namespace wavelab;
using doctest::Approx;

namespace {
double l2(const Field& a, const Field& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * a.grid().dx());
}
double max_gap(const Field& a, const Field& b, double reach) {
  double g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.grid().x(i)) <= reach) g = std::max(g, std::abs(a[i] - b[i]));
  }
  return g;
}
Field arctan_field(const Grid& g, const RiemannData& r) {
  return Field::sample(g, [&](double x) { return approx_rarefaction_initial(r, x); });
}
}  // namespace

TEST_CASE("noise parameters") {
  CHECK(NoiseParams(0.2, 0.3).effective_viscosity() == Approx(0.155));
  CHECK_THROWS_AS(NoiseParams(0.2, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(NoiseParams(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseParams(0.2, -0.1), std::invalid_argument);
  CHECK(parse_scheme("shift") == Scheme::shift);
  CHECK(parse_scheme(to_string(Scheme::euler_maruyama)) == Scheme::euler_maruyama);
  CHECK_THROWS_AS(parse_scheme("milstein"), std::invalid_argument);
}

TEST_CASE("Brownian increments") {
  const auto a = sample_brownian(42, 0.01, 1000);
  const auto b = sample_brownian(42, 0.01, 1000);
  CHECK(a.increments == b.increments);
  CHECK(sample_brownian(43, 0.01, 1000).increments != a.increments);
  CHECK(a.cumulative().front() == 0.0);
  CHECK(a.cumulative().size() == 1001);

  const auto unit = sample_brownian(5, 1.0, 100000);
  double mean = 0;
  for (double d : unit.increments) mean += d;
  mean /= 1e5;
  CHECK(std::abs(mean) <= 0.02);

  const auto fine = sample_brownian(9, 1e-3, 100000);
  CHECK(std::abs(fine.quadratic_variation() - 100.0) <= 5.0);
  CHECK_THROWS_AS(sample_brownian(1, 0, 10), std::invalid_argument);
}

TEST_CASE("single steps") {
  const RiemannData r(-1, 1);
  const Grid g = Grid::symmetric(21, 1024);
  const Field u0 = arctan_field(g, r);
  const double dt = 1e-3;

  SUBCASE("sigma = 0 reduces to the deterministic step") {
    const NoiseParams n(0.1, 0.0);
    const Field ref = fd_viscous_solve(u0, ViscousParams(0.1), dt, dt);
    CHECK(l2(em_step(u0, n, 0.7, dt), ref) == 0.0);
    CHECK(l2(shift_step(u0, n, 0.7, dt), ref) == 0.0);
  }
  SUBCASE("dB = 0 gives the nu_eff step") {
    const NoiseParams n(0.2, 0.3);
    const Field ref = fd_viscous_solve(u0, ViscousParams(n.effective_viscosity()), dt, dt);
    CHECK(l2(shift_step(u0, n, 0.0, dt), ref) == 0.0);
  }
  SUBCASE("constants are invariant") {
    const Field c(g, 0.4);
    for (double dB : {-0.05, 0.0, 0.03}) {
      for (double v : em_step(c, NoiseParams(0.2, 0.3), dB, dt).values()) CHECK(v == Approx(0.4).epsilon(1e-14));
      for (double v : shift_step(c, NoiseParams(0.2, 0.3), dB, dt).values()) CHECK(v == Approx(0.4).epsilon(1e-14));
    }
  }
  SUBCASE("the two schemes agree to O(dt + dx^2) for one step") {
    const NoiseParams n(0.2, 0.3);
    const Grid fine = Grid::symmetric(21, 4096);
    const Field v0 = arctan_field(fine, r);
    const double h = stable_time_step(fine, 1.0, n.sigma());
    const double gap = l2(em_step(v0, n, std::sqrt(h), h), shift_step(v0, n, std::sqrt(h), h));
    CHECK(gap <= h + fine.dx() * fine.dx());
  }
}

TEST_CASE("resampling") {
  const Grid g = Grid::symmetric(4, 81);
  const Field cubic = Field::sample(g, [](double x) { return 0.1 * x * x * x - x * x + 0.5; });
  std::vector<double> out(g.size());
  const double shift = 0.37 * g.dx() + 2 * g.dx();
  resample_shifted(cubic.values(), g, shift, 0, 0, out);
  // cubics are reproduced exactly away from the ends
  for (std::size_t i = 2; i + 5 < g.size(); ++i) {
    const double x = g.x(i) + shift;
    CHECK(out[i] == Approx(0.1 * x * x * x - x * x + 0.5).epsilon(1e-12));
  }
  // whole-cell shifts move values exactly and extend by the far-field states
  const Field ramp = Field::sample(g, [](double x) { return x; });
  resample_shifted(ramp.values(), g, -g.dx(), -9, 9, out);
  CHECK(out[0] == -9.0);
  CHECK(out[5] == Approx(g.x(4)));
  // monotone data stays within the bracketing nodes
  const Field step = Field::sample(g, [](double x) { return x < 0 ? 0.0 : 1.0; });
  resample_shifted(step.values(), g, 0.5 * g.dx(), 0, 1, out);
  for (double v : out) CHECK((v >= 0.0 && v <= 1.0));
  CHECK_THROWS_AS(resample_shifted(step.values(), g, 0, 0, 1, std::span<double>(out).first(3)), std::invalid_argument);
}

TEST_CASE("shift scheme carries the viscous shock along the Brownian path") {
  // u(t, x) = profile(x + sigma B(t)) for the profile with viscosity nu_eff
  const NoiseParams n(1.0, 0.3);
  const ShockProfileParams p(1, n.effective_viscosity());
  const Grid g = Grid::symmetric(21, 2048);
  const Field u0 = Field::sample(g, [&](double x) { return viscous_shock(p, x); });
  const double limit = admissible_time_step(g, 1.0, n, Scheme::shift);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(1.0 / limit));
  PathSettings s{Scheme::shift, 1.0, 1.0 / static_cast<double>(steps), 11, {1.0}, {}};
  const auto snaps = simulate_path(u0, n, p.riemann(), s);
  REQUIRE(snaps.size() == 1);
  const double B = sample_brownian(11, s.dt, steps).cumulative().back();
  const Field expected = Field::sample(g, [&](double x) { return viscous_shock(p, x + n.sigma() * B); });
  CHECK(max_gap(snaps.front().field, expected, 15.0) <= 1e-3);
}

TEST_CASE("cut-off projection") {
  const Grid g = Grid::symmetric(3, 301);
  const Field v = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const double norm = discrete_h1_norm(v);
  const Field inside = cutoff_project(v, CutoffParam(2 * norm));
  CHECK(l2(inside, v) == 0.0);
  const Field outside = cutoff_project(v, CutoffParam(norm / 2));
  CHECK(discrete_h1_norm(outside) == Approx(norm / 2).epsilon(1e-14));
  CHECK(discrete_h1_norm(cutoff_project(Field(g, 0.0), CutoffParam(1))) == 0.0);
  CHECK_THROWS_AS(CutoffParam(0), std::invalid_argument);

  // nonexpansive in the same norm on random pairs
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(g.size()), b(g.size());
    for (auto& x : a) x = z(rng);
    for (auto& x : b) x = z(rng);
    const Field fa(g, a), fb(g, b);
    const CutoffParam m(std::exp(3 * z(rng)));
    CHECK(discrete_h1_norm(cutoff_project(fa, m) - cutoff_project(fb, m)) <= discrete_h1_norm(fa - fb) + 1e-12);
  }
}

TEST_CASE("simulate_path") {
  const RiemannData r(-1, 1);
  const Grid g = Grid::symmetric(21, 512);
  const Field u0 = arctan_field(g, r);
  const NoiseParams n(0.2, 0.3);
  const double dt = admissible_time_step(g, 1.0, n, Scheme::euler_maruyama);

  SUBCASE("T = 0 returns the initial field") {
    const auto s = simulate_path(u0, n, r, {Scheme::euler_maruyama, 0.0, dt, 1, {0.0}, {}});
    REQUIRE(s.size() == 1);
    CHECK(s[0].time == 0.0);
    CHECK(l2(s[0].field, u0) == 0.0);
  }
  SUBCASE("records land on the first step at or after each request") {
    const auto s = simulate_path(u0, n, r, {Scheme::euler_maruyama, 0.5, dt, 1, {0.0, 0.1, 0.5}, {}});
    REQUIRE(s.size() == 3);
    CHECK(s[1].time >= 0.1);
    CHECK(s[1].time < 0.1 + dt);
    CHECK(s[2].time == Approx(0.5));
    const auto again = simulate_path(u0, n, r, {Scheme::euler_maruyama, 0.5, dt, 1, {0.5}, {}});
    CHECK(l2(again[0].field, s[2].field) == 0.0);
  }
  SUBCASE("sigma = 0 follows the viscous solution") {
    const NoiseParams quiet(0.05, 0.0);
    const Grid fine = Grid::symmetric(21, 8192);
    const Field v0 = arctan_field(fine, r);
    const double h = admissible_time_step(fine, 1.0, quiet, Scheme::euler_maruyama);
    const auto s = simulate_path(v0, quiet, r, {Scheme::euler_maruyama, 1.0, h, 1, {1.0}, {}});
    const Field ref = cole_hopf_field(arctan_initial_data(r), 0.05, 1.0, fine);
    CHECK(max_gap(s[0].field, ref, 10.0) <= 5e-3);
  }
  SUBCASE("argument errors") {
    CHECK_THROWS_AS(simulate_path(u0, n, r, {Scheme::shift, 1.0, dt, 1, {0.5, 0.1}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_path(u0, n, r, {Scheme::shift, 1.0, dt, 1, {2.0}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_path(u0, n, r, {Scheme::shift, 1.0, 0.0, 1, {}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_path(u0, n, r, {Scheme::euler_maruyama, 1.0, 10 * dt, 1, {}, {}}), std::invalid_argument);
  }
  SUBCASE("blowup is reported with seed and time") {
    const Field wild = Field::sample(g, [](double x) { return std::abs(x) < 1 ? 50.0 : 0.0; });
    const RiemannData small(-0.01, 0.01);
    try {
      simulate_path(wild, NoiseParams(0.2, 0.0), small, {Scheme::euler_maruyama, 1.0, 5e-4, 17, {}, {}});
      FAIL("expected a path error");
    } catch (const PathError& e) {
      CHECK(e.seed() == 17);
      CHECK(e.time() > 0.0);
    }
  }
}
