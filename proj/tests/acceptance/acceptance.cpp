// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N]... [--artifacts DIR]
//
// Criterion 5(b) reuses the ensemble energy series written by criterion 4
// into DIR; if absent it reruns the ensemble.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavelab/cli.hpp"
#include "wavelab/deterministic.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/spde.hpp"
#include "wavelab/waves.hpp"

using namespace wavelab;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path g_artifacts = "acceptance-artifacts";

double interior_gap(const Field& u, const std::vector<double>& ref, double reach) {
  double g = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u.grid().x(i)) <= reach * (1 + 1e-12)) g = std::max(g, std::abs(u[i] - ref[i]));
  }
  return g;
}

// 1. finite differences against the Cole-Hopf oracle
Verdict oracle_agreement() {
  const RiemannData r(-1, 1);
  const double nu = 0.05, T = 1, L = 21;
  const InitialData data = arctan_initial_data(r);
  auto gap_at = [&](std::size_t n) {
    const Grid g = Grid::symmetric(L, n);
    const Field u = fd_viscous_solve(Field::sample(g, data.value), ViscousParams(nu), T,
                                     stable_time_step(g, r.max_speed()));
    std::vector<double> ref(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) ref[i] = cole_hopf_solve(data, nu, T, g.x(i));
    return interior_gap(u, ref, 0.5 * L);
  };
  const double fine = gap_at(8192), coarse = gap_at(4096);
  const double ratio = coarse / fine;
  return {fine <= 5e-3 && ratio >= 1.8,
          "gap " + num(fine) + " (<= 5e-3) on |x| <= 10.5 at 8192 nodes; halving ratio " + num(ratio) +
              " (>= 1.8)"};
}

// 2. the standing viscous shock is steady
Verdict standing_shock() {
  const ShockProfileParams p(1, 0.1);
  const Grid g = Grid::symmetric(21, 4096);
  const Field u0 = Field::sample(g, [&](double x) { return viscous_shock(p, x); });
  const Field u = fd_viscous_solve(u0, ViscousParams(p.nu()), 1.0, stable_time_step(g, p.u_minus()));
  const double gap = (u - u0).max_abs();
  return {gap <= 1e-2, "L-inf drift after T = 1: " + num(gap) + " (<= 1e-2)"};
}

// 3. matched-seed comparison of the two SPDE schemes
Verdict shift_law() {
  EnsembleConfig c;
  c.noise = NoiseParams(0.2, 0.3);
  c.T = 1;
  c.paths = 200;
  c.grid = Grid::symmetric(21, 512);
  const auto r = scheme_cross_validation(c, 3);
  bool ok = true;
  std::string d = "gaps";
  for (const auto& l : r.levels) d += " " + num(l.mean_gap.back());
  d += ", slopes";
  for (double s : r.slopes) {
    d += " " + num(s);
    ok = ok && s >= 0.8;
  }
  int agree = 0;
  for (const auto& p : r.probes) agree += p.mean_ok && p.var_ok;
  ok = ok && agree == static_cast<int>(r.probes.size());
  d += " (>= 0.8); probes agreeing in mean and variance within 3 stderr: " + std::to_string(agree) + "/" +
       std::to_string(r.probes.size());
  return {ok, d};
}

fs::path energy_artifact() { return g_artifacts / "phi-x-energy.csv"; }

RarefactionResult run_ensemble() {
  EnsembleConfig c;  // defaults: 64 paths, 4096 nodes, T = 200, mu 0.2, sigma 0.3, u = -1, 1
  const auto r = rarefaction_stability(c);
  fs::create_directories(g_artifacts);
  write_csv(energy_artifact(), {{"t", "phi_x_l2sq_mean"}, {r.times, r.phi_x_l2_sq.mean}});
  return r;
}

// 4. rarefaction stability under transport noise
Verdict rarefaction() {
  const auto r = run_ensemble();
  const std::size_t inf = static_cast<std::size_t>(
      std::find_if(r.p_list.begin(), r.p_list.end(), [](double p) { return std::isinf(p); }) - r.p_list.begin());
  const RateFit fit = rate_fit(r.headline[inf].mean_series(r.times), {10.0, 200.0});
  const bool a = fit.exponent <= -0.15;
  const auto b4 = normalized_power_bound(r, 4), b6 = normalized_power_bound(r, 6);
  const bool b = b4.bounded(2.0) && b6.bounded(2.0);
  const auto g = fit_log_growth(r.phi_l2_sq.mean_series(r.times));
  const bool c = g.residual <= 0.2 * g.range;
  const auto m = second_moment_stability(r.as_statistic);
  const bool d = m.ratio <= 1.5 && m.ratio >= 1 / 1.5;
  return {a && b && c && d && r.failures.empty(),
          "(a) L-inf exponent on [10, 200] " + num(fit.exponent) + " (<= -0.15); (b) normalized max p=4 " +
              num(b4.second_half_max) + " vs " + num(b4.first_half_max) + ", p=6 " + num(b6.second_half_max) +
              " vs " + num(b6.first_half_max) + " (second half <= 2x first); (c) log fit residual " +
              num(g.residual) + " (<= 0.2 x range " + num(g.range) + "); (d) as-statistic second moment ratio " +
              num(m.ratio) + " over " + std::to_string(m.half_paths) + " -> " + std::to_string(m.full_paths) +
              " paths (within [1/1.5, 1.5]); failed paths " + std::to_string(r.failures.size())};
}

// 5. the Area Inequality and its optimality witness
Verdict area_inequality() {
  // (a) randomized premise-satisfying mixtures c_w g + c_p (1+t)^-q
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0, 1);
  int passed_a = 0;
  for (int k = 0; k < 100; ++k) {
    const double alpha = 0.5 + U(rng);
    const double eps = 0.05 + 0.15 * U(rng);
    const double cw = k % 5 == 0 ? 0.0 : 0.2 + U(rng);
    const double cp = k % 5 == 1 ? 0.0 : 2 * U(rng) + 0.01;
    const double q = 1.2 + 1.8 * U(rng);
    const AreaWitness w = area_witness(alpha, eps, 0.5 + U(rng), 3 + k % 4);
    std::vector<double> t = w.sample(120).times();
    const double end = t.back();
    for (int i = 0; i < 400; ++i) t.push_back(0.01 * std::pow(end / 0.01, i / 399.0));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(), [](double a, double b) { return b - a < 1e-12 * (1 + a); }), t.end());
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = cw * w.value(t[i]) + cp * std::pow(1 + t[i], -q);
    const SampledFunction f(t, v);
    // f' <= cw C0 (1+t)^-alpha + 0 and |power'| <= cp q (1+t)^-alpha since q + 1 > alpha;
    // int f <= cw int g + cp / (q - 1), raised to the sampled trapezoid where that is larger
    const double C0 = (cw * w.C0() + cp * q) * (1 + 1e-9);
    const double C1 = std::max(cw * w.integral() + cp / (q - 1), fit_area_premises(f, alpha).C1()) * (1 + 1e-9);
    const AreaReport rep = area_check(f, AreaPremises(C0, C1, alpha));
    passed_a += rep.premise1_ok && rep.premise2_ok && rep.conclusion_ok.value_or(false) &&
                rep.first_ok_time.has_value();
  }
  const bool a = passed_a == 100;

  // (b) ensemble energy E||phi_x||^2 with alpha = 1 - 2 eps, beta = 0, gamma = 1
  const double eps = 0.05;
  CsvTable series;
  std::string source = "reused";
  if (fs::exists(energy_artifact())) {
    series = read_csv(energy_artifact());
  } else {
    run_ensemble();
    series = read_csv(energy_artifact());
    source = "recomputed";
  }
  const SampledFunction energy(series.column("t"), series.column("phi_x_l2sq_mean"));
  const AreaPremises prem = fit_area_premises(energy, 1 - 2 * eps, 0.0, 1.0);
  const AreaReport rep = area_check(energy, prem);
  const double expected = -0.5 + eps;
  const RateFit fit = rate_fit(energy, {20.0, 200.0});
  const bool b = rep.premise1_ok && rep.premise2_ok && rep.conclusion_ok.value_or(false) &&
                 fit.exponent <= expected + 0.1;

  // (c) witness for alpha = 1, eps = 0.1
  const AreaWitness w = area_witness(1.0, 0.1, 1.0, 6);
  const AreaReport wr = area_check(w.sample(200), AreaPremises(1.0, w.integral() * (1 + 1e-9), 1.0));
  double worst_ratio = 0;
  for (std::size_t k = 0; k + 1 < w.peaks().size(); ++k) {
    const auto& p = w.peaks();
    worst_ratio = std::max(worst_ratio, (p[k + 1].rise_area + p[k + 1].descent_area) / (p[k].rise_area + p[k].descent_area));
  }
  bool literal = true, corrected = true;
  std::string literal_values, corrected_values;
  for (std::size_t k = 0; k < w.peaks().size(); ++k) {
    const auto& p = w.peaks()[k];
    const double l = p.peak * std::pow(p.t, 0.5), c = p.peak * std::pow(p.t, 0.5 + 2 * 0.1);
    literal_values += (k ? " " : "") + num(l);
    corrected_values += (k ? " " : "") + num(c);
    if (k > 0) {
      const auto& prev = w.peaks()[k - 1];
      literal = literal && l > prev.peak * std::pow(prev.t, 0.5);
      corrected = corrected && c > prev.peak * std::pow(prev.t, 0.7);
    }
  }
  const bool c = wr.premise1_ok && wr.premise2_ok && worst_ratio < 0.95 && literal;

  return {a && b && c,
          "(a) " + std::to_string(passed_a) + "/100 synthetic functions pass; (b) " + source +
              " ensemble energy: premises " + (rep.premise1_ok && rep.premise2_ok ? "hold" : "fail") +
              ", conclusion " + (rep.conclusion_ok.value_or(false) ? "holds" : "fails") + ", exponent " +
              num(fit.exponent) + " (<= " + num(expected + 0.1) + "); (c) witness premises " +
              (wr.premise1_ok && wr.premise2_ok ? "hold" : "fail") + ", per-peak area ratio <= " +
              num(worst_ratio) + ", g(t_n) t_n^(1/2) = " + literal_values + (literal ? " grows" : " does not grow") +
              "; with exponent 1/2 + 2 eps: " + corrected_values + (corrected ? " grows" : " does not grow")};
}

// 6. instability of the viscous shock
Verdict shock_instability() {
  const ShockProfileParams p(1, 0.1);
  std::vector<double> times(50);
  for (int j = 0; j < 50; ++j) times[j] = 1e-2 * std::pow(1e6, j / 49.0);
  const auto q = shock_instability_quadrature(p, 1.0, times);
  const auto& d = q.d.values();
  bool monotone = true;
  for (std::size_t j = 0; j + 1 < d.size(); ++j) monotone = monotone && d[j + 1] >= d[j];
  const bool limit = d.back() >= 0.99 * 2.0;
  const auto mc = shock_instability_monte_carlo(p, 1.0, times, 10000, 1);
  double worst = 0;
  for (std::size_t j = 0; j < times.size(); ++j) worst = std::max(worst, std::abs(mc.mean[j] - d[j]) / mc.std_error[j]);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-5, 5);
  double sup_err = 0;
  for (int k = 0; k < 20; ++k) {
    const double a = U(rng);
    sup_err = std::max(sup_err, std::abs(shock_shift_gap(p, a) - shock_shift_gap_numeric(p, a)));
  }
  return {monotone && limit && worst <= 3 && sup_err <= 1e-8,
          std::string("d(t) ") + (monotone ? "nondecreasing" : "not monotone") + " on 50 times; d(1e4) = " +
              num(d.back()) + " (>= 1.98); Monte Carlo worst |gap|/stderr " + num(worst) +
              " (<= 3); closed-form sup error " + num(sup_err) + " (<= 1e-8)"};
}

// 7. the H^1 cut-off map is nonexpansive
Verdict cutoff() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> Z;
  int both_in = 0, mixed = 0, both_out = 0, violations = 0;
  double worst = -1e300;
  for (int k = 0; k < 10000; ++k) {
    const Grid g = Grid::symmetric(1 + 9 * U(rng), 16 + static_cast<std::size_t>(48 * U(rng)));
    const CutoffParam m(std::exp(4 * U(rng) - 2));
    auto random_field = [&] {
      std::vector<double> v(g.size());
      for (auto& x : v) x = Z(rng);
      Field f(g, v);
      const double scale = m.m() * std::exp(2 * Z(rng)) / discrete_h1_norm(f);
      return scale * f;
    };
    const Field v = random_field(), w = random_field();
    const bool vin = discrete_h1_norm(v) <= m.m(), win = discrete_h1_norm(w) <= m.m();
    (vin && win ? both_in : (vin || win ? mixed : both_out))++;
    const double lhs = discrete_h1_norm(cutoff_project(v, m) - cutoff_project(w, m));
    const double rhs = discrete_h1_norm(v - w);
    worst = std::max(worst, lhs - rhs);
    violations += lhs > rhs + 1e-12;
  }
  return {violations == 0 && both_in > 0 && mixed > 0 && both_out > 0,
          "violations " + std::to_string(violations) + " of 10000, max excess " + num(worst) + "; branches " +
              std::to_string(both_in) + " inside/inside, " + std::to_string(mixed) + " mixed, " +
              std::to_string(both_out) + " outside/outside"};
}

// ||d^3/dx^3 ubar(t)||_2 for u = -1, 1 by a dense trapezoid in theta, x0 = tan(theta):
// u_xxx = (w3 (1 + t w1) - 3 t w2^2) / (1 + t w1)^5 with wk the k-th derivative of
// the arctan data, and dx = (1 + t w1) dx0.
double third_derivative_l2(double t) {
  const double pi = std::acos(-1.0);
  const double K = 2 / pi;
  const int n = 400000;
  const double h = pi / n;
  double sum = 0;
  for (int i = 1; i < n; ++i) {
    const double x = std::tan(-pi / 2 + i * h), q = 1 + x * x;
    const double w1 = K / q, w2 = -2 * K * x / (q * q), w3 = K * (6 * x * x - 2) / (q * q * q);
    const double j = 1 + t * w1;
    const double u3 = (w3 * j - 3 * t * w2 * w2) / std::pow(j, 5);
    sum += u3 * u3 * j * q;  // dx0 = q dtheta
  }
  return std::sqrt(sum * h);
}

// 8. scaling of the approximate rarefaction
Verdict profile_bounds() {
  const RiemannData r(-1, 1);
  double l1_err = 0;
  for (double t : {0.0, 1.0, 10.0, 100.0}) l1_err = std::max(l1_err, std::abs(profile_derivative_norm(r, t, 1) - 2.0));
  auto slope = [](auto norm) {
    std::vector<double> t, v;
    for (int i = 0; i < 21; ++i) {
      t.push_back(1e2 * std::pow(100.0, i / 20.0));
      v.push_back(norm(t.back()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double x = std::log(t[i]), y = std::log(v[i]);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(t.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  bool ok = l1_err <= 1e-8;
  std::string d = "L1 error " + num(l1_err) + " (<= 1e-8)";
  for (double p : {2.0, 4.0}) {
    const double sd = slope([&](double t) { return profile_derivative_norm(r, t, p); });
    const double sg = slope([&](double t) { return rarefaction_gap_norm(r, t, p); });
    const double td = -1 + 1 / p, tg = -(p - 1) / (2 * p);
    ok = ok && std::abs(sd - td) <= 0.05 && std::abs(sg - tg) <= 0.05;
    d += "; p=" + num(p) + ": derivative slope " + num(sd) + " (" + num(td) + " +- 0.05), gap slope " + num(sg) +
         " (" + num(tg) + " +- 0.05)";
  }
  // third derivative: reported only, its rate is not pinned
  d += "; measured ||ubar_xxx||_2 slope " + num(slope(third_derivative_l2)) + " (informational)";
  return {ok, d};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (a == "--artifacts" && i + 1 < argc) {
      g_artifacts = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion N]... [--artifacts DIR]\n";
      return 2;
    }
  }
  const std::vector<Criterion> all{
      {1, "oracle agreement", oracle_agreement},   {2, "standing shock", standing_shock},
      {3, "shift representation", shift_law},      {4, "rarefaction stability", rarefaction},
      {5, "area inequality", area_inequality},     {6, "shock instability", shock_instability},
      {7, "cut-off nonexpansive", cutoff},         {8, "profile bounds", profile_bounds}};
  if (selected.empty()) {
    for (const auto& c : all) selected.push_back(c.id);
  }
  bool ok = true;
  for (int id : selected) {
    const auto it = std::find_if(all.begin(), all.end(), [&](const Criterion& c) { return c.id == id; });
    if (it == all.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it->run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.passed ? "PASS" : "FAIL") << "\tcriterion " << id << "\t" << it->name << "\t" << v.detail
              << "\t[" << num(secs) << " s]" << std::endl;
    ok = ok && v.passed;
  }
  return ok ? 0 : 1;
}
