#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavelab/analysis.hpp"
#include "wavelab/deterministic.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/spde.hpp"
#include "wavelab/waves.hpp"

namespace py = pybind11;
using namespace wavelab;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Field to_field(const Grid& grid, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
  return Field(grid, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core solvers and diagnostics for the stochastic Burgers lab";
  m.attr("__version__") = "0.1.0";
  m.attr("inf") = kInfinityNorm;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StabilityError>(m, "StabilityError", error.ptr());
  py::register_exception<PathError>(m, "PathError", error.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", error.ptr());
  py::register_exception<RootBracketError>(m, "RootBracketError", error.ptr());

  // waves
  py::class_<RiemannData>(m, "RiemannData")
      .def(py::init<double, double>(), py::arg("u_minus"), py::arg("u_plus"))
      .def_property_readonly("u_minus", &RiemannData::u_minus)
      .def_property_readonly("u_plus", &RiemannData::u_plus)
      .def_property_readonly("strength", &RiemannData::strength)
      .def("is_rarefaction", &RiemannData::is_rarefaction)
      .def("is_shock", &RiemannData::is_shock)
      .def("__repr__", [](const RiemannData& r) {
        return "RiemannData(" + std::to_string(r.u_minus()) + ", " + std::to_string(r.u_plus()) + ")";
      });
  py::class_<ShockProfileParams>(m, "ShockProfileParams")
      .def(py::init<double, double, double>(), py::arg("u_minus"), py::arg("nu"), py::arg("c") = 1.0)
      .def_property_readonly("u_minus", &ShockProfileParams::u_minus)
      .def_property_readonly("u_plus", &ShockProfileParams::u_plus)
      .def_property_readonly("nu", &ShockProfileParams::nu)
      .def_property_readonly("c", &ShockProfileParams::c)
      .def_property_readonly("h", &ShockProfileParams::h);

  m.def("rankine_hugoniot_speed", &rankine_hugoniot_speed);
  m.def("exact_rarefaction", &exact_rarefaction, py::arg("riemann"), py::arg("t"), py::arg("x"));
  m.def("approx_rarefaction_initial", &approx_rarefaction_initial);
  m.def("approx_rarefaction", [](const RiemannData& r, double t, double x) {
    const auto s = approx_rarefaction(r, t, x);
    return py::make_tuple(s.value, s.slope);
  }, py::arg("riemann"), py::arg("t"), py::arg("x"), "(value, slope) of the smooth rarefaction profile");
  m.def("viscous_shock", &viscous_shock, py::arg("params"), py::arg("xi"));
  m.def("shock_shift_gap", &shock_shift_gap, py::arg("params"), py::arg("a"));
  m.def("shock_shift_gap_numeric", &shock_shift_gap_numeric, py::arg("params"), py::arg("a"),
        py::arg("scan") = 20001);
  m.def("profile_derivative_norm", &profile_derivative_norm, py::arg("riemann"), py::arg("t"), py::arg("p"));
  m.def("rarefaction_gap_norm", &rarefaction_gap_norm, py::arg("riemann"), py::arg("t"), py::arg("p"));

  // grids and fields
  py::class_<Grid>(m, "Grid")
      .def(py::init<double, double, std::size_t>(), py::arg("x_min"), py::arg("x_max"), py::arg("n"))
      .def_static("symmetric", &Grid::symmetric, py::arg("half_width"), py::arg("n"))
      .def_property_readonly("x_min", &Grid::x_min)
      .def_property_readonly("x_max", &Grid::x_max)
      .def_property_readonly("dx", &Grid::dx)
      .def("__len__", &Grid::size)
      .def("points", [](const Grid& g) {
        std::vector<double> x(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) x[i] = g.x(i);
        return to_array(x);
      });
  py::class_<Field>(m, "Field")
      .def(py::init(&to_field), py::arg("grid"), py::arg("values"))
      .def_property_readonly("grid", &Field::grid)
      .def_property_readonly("values", [](const Field& f) { return to_array(f.values()); })
      .def("max_abs", &Field::max_abs)
      .def("__len__", &Field::size);

  // deterministic
  py::class_<InitialData>(m, "InitialData").def_readonly("speed_bound", &InitialData::speed_bound);
  m.def("constant_initial_data", &constant_initial_data);
  m.def("arctan_initial_data", &arctan_initial_data);
  m.def("shock_initial_data", &shock_initial_data);
  m.def("cole_hopf_solve", &cole_hopf_solve, py::arg("initial"), py::arg("nu"), py::arg("t"), py::arg("x"));
  m.def("stable_time_step", &stable_time_step, py::arg("grid"), py::arg("max_speed"), py::arg("sigma") = 0.0);
  m.def("fd_viscous_solve", [](const Field& u0, double nu, double t_end, double dt) {
    return fd_viscous_solve(u0, ViscousParams(nu), t_end, dt);
  }, py::arg("u0"), py::arg("nu"), py::arg("t_end"), py::arg("dt"));

  // spde
  py::class_<NoiseParams>(m, "NoiseParams")
      .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma"))
      .def_property_readonly("mu", &NoiseParams::mu)
      .def_property_readonly("sigma", &NoiseParams::sigma)
      .def_property_readonly("effective_viscosity", &NoiseParams::effective_viscosity);
  py::enum_<Scheme>(m, "Scheme")
      .value("euler_maruyama", Scheme::euler_maruyama)
      .value("shift", Scheme::shift);
  m.def("sample_brownian", [](std::uint64_t seed, double dt, std::size_t steps) {
    return to_array(sample_brownian(seed, dt, steps).increments);
  }, py::arg("seed"), py::arg("dt"), py::arg("steps"), "Brownian increments for one seed");
  m.def("discrete_h1_norm", &discrete_h1_norm);
  m.def("cutoff_project", [](const Field& v, double radius) { return cutoff_project(v, CutoffParam(radius)); },
        py::arg("v"), py::arg("m"));
  m.def("admissible_time_step", &admissible_time_step, py::arg("grid"), py::arg("max_speed"),
        py::arg("noise"), py::arg("scheme"));
  m.def("simulate_path",
        [](const Field& u0, const NoiseParams& noise, const RiemannData& riemann, Scheme scheme,
           double T, double dt, std::uint64_t seed, std::vector<double> record_times) {
          PathSettings s;
          s.scheme = scheme;
          s.T = T;
          s.dt = dt;
          s.seed = seed;
          s.record_times = std::move(record_times);
          py::list out;
          for (const auto& snap : simulate_path(u0, noise, riemann, s)) {
            out.append(py::make_tuple(snap.time, snap.field));
          }
          return out;
        },
        py::arg("u0"), py::arg("noise"), py::arg("riemann"), py::arg("scheme"), py::arg("T"),
        py::arg("dt"), py::arg("seed"), py::arg("record_times"),
        "List of (time, Field) snapshots; constant far-field data.");

  // analysis
  m.def("lp_norm", &lp_norm, py::arg("v"), py::arg("p"));
  py::class_<SampledFunction>(m, "SampledFunction")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("times"), py::arg("values"))
      .def_property_readonly("times", [](const SampledFunction& f) { return to_array(f.times()); })
      .def_property_readonly("values", [](const SampledFunction& f) { return to_array(f.values()); })
      .def("__len__", &SampledFunction::size);
  py::class_<AreaPremises>(m, "AreaPremises")
      .def(py::init<double, double, double, double, double>(), py::arg("C0"), py::arg("C1"),
           py::arg("alpha"), py::arg("beta") = 0.0, py::arg("gamma") = 0.0)
      .def_property_readonly("C0", &AreaPremises::C0)
      .def_property_readonly("C1", &AreaPremises::C1)
      .def_property_readonly("envelope_exponent", &AreaPremises::envelope_exponent);
  py::class_<AreaReport>(m, "AreaReport")
      .def_readonly("premise1_ok", &AreaReport::premise1_ok)
      .def_readonly("premise2_ok", &AreaReport::premise2_ok)
      .def_readonly("conclusion_ok", &AreaReport::conclusion_ok)
      .def_readonly("first_ok_time", &AreaReport::first_ok_time)
      .def_readonly("t_star", &AreaReport::t_star)
      .def_readonly("worst_conclusion_ratio", &AreaReport::worst_conclusion_ratio);
  m.def("area_check", &area_check, py::arg("f"), py::arg("premises"), py::arg("t_star") = py::none());
  m.def("area_envelope", &area_envelope);
  py::class_<WitnessPeak>(m, "WitnessPeak")
      .def_readonly("n", &WitnessPeak::n)
      .def_readonly("s", &WitnessPeak::s)
      .def_readonly("t", &WitnessPeak::t)
      .def_readonly("z", &WitnessPeak::z)
      .def_readonly("peak", &WitnessPeak::peak);
  py::class_<AreaWitness>(m, "AreaWitness")
      .def("value", &AreaWitness::value)
      .def("integral", &AreaWitness::integral)
      .def("sample", &AreaWitness::sample, py::arg("per_rise") = 200)
      .def_property_readonly("peaks", &AreaWitness::peaks);
  m.def("area_witness", &area_witness, py::arg("alpha"), py::arg("epsilon"), py::arg("C0"), py::arg("n_max"));
  py::class_<RateFit>(m, "RateFit")
      .def_readonly("exponent", &RateFit::exponent)
      .def_readonly("log_factor_power", &RateFit::log_factor_power)
      .def_readonly("constant", &RateFit::constant)
      .def_readonly("window", &RateFit::window)
      .def_readonly("residual", &RateFit::residual)
      .def("model", &RateFit::model);
  m.def("rate_fit", &rate_fit, py::arg("series"), py::arg("window"), py::arg("with_log") = false);

  // experiments
  m.def("shock_instability_quadrature",
        [](const ShockProfileParams& p, double sigma, std::vector<double> times, std::size_t nodes) {
          const auto q = shock_instability_quadrature(p, sigma, times, nodes);
          return py::make_tuple(to_array(q.d.values()), q.tail_mass);
        },
        py::arg("params"), py::arg("sigma"), py::arg("times"), py::arg("quad_nodes") = 256,
        "(d values, truncated tail mass)");
  m.def("shock_instability_monte_carlo",
        [](const ShockProfileParams& p, double sigma, std::vector<double> times, std::size_t paths,
           std::uint64_t seed) {
          const auto r = shock_instability_monte_carlo(p, sigma, times, paths, seed);
          return py::make_tuple(to_array(r.mean), to_array(r.std_error));
        },
        py::arg("params"), py::arg("sigma"), py::arg("times"), py::arg("paths"), py::arg("base_seed"),
        "(mean, standard error)");
  m.def("as_rate_statistic", [](std::vector<double> t, std::vector<double> v, double eps) {
    return as_rate_statistic(t, v, eps);
  }, py::arg("times"), py::arg("norms"), py::arg("epsilon"));
}
