#include "pwl/canard.hpp"
#include "pwl/geometry.hpp"
#include "pwl/hybrid.hpp"
#include "pwl/mmo.hpp"
#include "pwl/model.hpp"
#include "pwl/planar.hpp"
#include "pwl/singular.hpp"
#include "pwl/zoneflow.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pwl;

namespace {

py::dict trajectory_dict(const hybrid::Trajectory& traj) {
    const std::size_t n = traj.t.size();
    const int dim = n ? static_cast<int>(traj.s.front().size()) : 0;
    Eigen::MatrixXd states(n, dim);
    Eigen::VectorXd times(n);
    Eigen::VectorXi zones(n);
    for (std::size_t i = 0; i < n; ++i) {
        times(static_cast<Eigen::Index>(i)) = traj.t[i];
        states.row(static_cast<Eigen::Index>(i)) = traj.s[i].transpose();
        zones(static_cast<Eigen::Index>(i)) = traj.sample_zone[i];
    }
    py::dict d;
    d["t"] = times;
    d["states"] = states;
    d["zone"] = zones;
    d["termination"] = static_cast<int>(traj.termination);
    d["n_segments"] = traj.segments.size();
    return d;
}

}  // namespace

PYBIND11_MODULE(_pwlcanard, m) {
    m.doc() = "Piecewise-linear slow-fast systems: canards, folded singularities and MMOs";

    py::class_<Params>(m, "Params")
        .def(py::init<double, double, double, double>(), py::arg("p1"), py::arg("p2"),
             py::arg("p3"), py::arg("eps"))
        .def(py::init<double, double, double, double, double>(), py::arg("p1"), py::arg("p2"),
             py::arg("p3"), py::arg("eps"), py::arg("delta"))
        .def_readonly("p1", &Params::p1)
        .def_readonly("p2", &Params::p2)
        .def_readonly("p3", &Params::p3)
        .def_readonly("eps", &Params::eps)
        .def_readonly("delta", &Params::delta)
        .def("omega", &Params::omega);

    py::class_<ReturnParams>(m, "ReturnParams")
        .def(py::init<>())
        .def_readwrite("alpha1", &ReturnParams::alpha1)
        .def_readwrite("alpha2", &ReturnParams::alpha2)
        .def_readwrite("alpha3", &ReturnParams::alpha3)
        .def_readwrite("kappa", &ReturnParams::kappa)
        .def_readwrite("zeta", &ReturnParams::zeta)
        .def_readwrite("xi", &ReturnParams::xi)
        .def_readwrite("x0", &ReturnParams::x0);

    py::class_<PwlCurve>(m, "PwlCurve")
        .def("eval", &PwlCurve::eval)
        .def("slope_at", &PwlCurve::slope_at)
        .def_property_readonly("breakpoints", &PwlCurve::breakpoints)
        .def_property_readonly("slopes", &PwlCurve::slopes)
        .def_property_readonly("intercepts", &PwlCurve::intercepts);

    py::class_<SystemSpec>(m, "SystemSpec")
        .def_property_readonly("dimension", &SystemSpec::dimension)
        .def_property_readonly("eps", &SystemSpec::eps)
        .def_property_readonly("zone_count", &SystemSpec::zone_count)
        .def_property_readonly("provenance", &SystemSpec::provenance)
        .def("zone_index", &SystemSpec::zone_index)
        .def("field", &SystemSpec::field);

    py::class_<model::QuasiCanard>(m, "QuasiCanard")
        .def(py::init<>())
        .def_readwrite("k", &model::QuasiCanard::k)
        .def_readwrite("a", &model::QuasiCanard::a);

    py::class_<model::Arima>(m, "Arima")
        .def(py::init<>())
        .def_readwrite("beta", &model::Arima::beta)
        .def_readwrite("delta", &model::Arima::delta)
        .def_readwrite("x0", &model::Arima::x0)
        .def_readwrite("a", &model::Arima::a)
        .def_readwrite("s_left", &model::Arima::s_left)
        .def_readwrite("s_mid", &model::Arima::s_mid)
        .def_readwrite("s_right", &model::Arima::s_right);

    m.def("build_minimal_3d", &model::build_minimal_3d, py::arg("params"));
    m.def("build_global_return", &model::build_global_return, py::arg("params"), py::arg("ret"));
    m.def("build_planar",
          py::overload_cast<const model::QuasiCanard&, double>(&model::build_planar),
          py::arg("kind"), py::arg("eps"));
    m.def("build_planar", py::overload_cast<const model::Arima&, double>(&model::build_planar),
          py::arg("kind"), py::arg("eps"));
    m.def("build_planar_drifted",
          py::overload_cast<const model::QuasiCanard&, double, double>(
              &model::build_planar_drifted),
          py::arg("kind"), py::arg("c"), py::arg("eps"));
    m.def("build_planar_drifted",
          py::overload_cast<const model::Arima&, double, double>(&model::build_planar_drifted),
          py::arg("kind"), py::arg("c"), py::arg("eps"));
    m.def("minimal_curve", &model::minimal_curve);
    m.def("return_curve", &model::return_curve);
    m.def("four_zone_curve",
          py::overload_cast<double, double, double>(&model::four_zone_curve));
    m.def("quasi_canard_curve", &model::quasi_canard_curve);
    m.def("eval_pwl", &model::eval_pwl);
    m.def("constant_sao_condition", &model::constant_sao_condition);

    py::class_<ZoneFlow>(m, "ZoneFlow")
        .def(py::init([](const SystemSpec& spec, int zone) { return ZoneFlow(spec.zone(zone)); }),
             py::arg("spec"), py::arg("zone"))
        .def("flow", &ZoneFlow::flow, py::arg("state"), py::arg("t"))
        .def("x_dot", &ZoneFlow::x_dot)
        .def_property_readonly("rotating", &ZoneFlow::rotating)
        .def_property_readonly("omega", &ZoneFlow::omega)
        .def("crossing_time",
             [](const ZoneFlow& zf, const State& s, double plane, double horizon) -> py::object {
                 auto c = zf.crossing_time(s, plane, horizon);
                 if (!c) return py::none();
                 py::dict d;
                 d["t"] = c->t;
                 d["state"] = c->state;
                 d["grazing"] = c->grazing;
                 return d;
             });

    m.def("first_integral_H", &first_integral_H);
    m.def("central_flow_closed_form", &central_flow_closed_form);

    py::module_ geo = m.def_submodule("geometry");
    py::class_<geometry::SlowManifolds>(geo, "SlowManifolds")
        .def_readonly("lambda_A", &geometry::SlowManifolds::lambda_A)
        .def_readonly("lambda_R", &geometry::SlowManifolds::lambda_R)
        .def_readonly("y_star", &geometry::SlowManifolds::y_star)
        .def_readonly("z_star_A", &geometry::SlowManifolds::z_star_A)
        .def_readonly("z_star_R", &geometry::SlowManifolds::z_star_R)
        .def_readonly("line_A_bz", &geometry::SlowManifolds::line_A_bz)
        .def_readonly("line_A_rhs", &geometry::SlowManifolds::line_A_rhs)
        .def_readonly("line_R_bz", &geometry::SlowManifolds::line_R_bz)
        .def_readonly("line_R_rhs", &geometry::SlowManifolds::line_R_rhs)
        .def("plane_A_residual", &geometry::SlowManifolds::plane_A_residual)
        .def("plane_R_residual", &geometry::SlowManifolds::plane_R_residual);
    geo.def("slow_manifolds", &geometry::slow_manifolds);
    geo.def("classify", [](double p1, double p2, double p3) {
        auto c = geometry::classify(p1, p2, p3);
        py::dict d;
        d["class"] = geometry::to_string(c.kind);
        d["rotating"] = c.rotating;
        if (c.mu) d["mu"] = *c.mu;
        if (c.sign_class) d["sign_class"] = geometry::to_string(*c.sign_class);
        return d;
    });
    geo.def("max_winding",
            py::overload_cast<double, double, double>(&geometry::max_winding));
    geo.def("max_winding_general", py::overload_cast<const Params&>(&geometry::max_winding));
    geo.def("t_star", &geometry::t_star);
    geo.def("rotation_axis", [](const Params& p) {
        auto ax = geometry::rotation_axis(p);
        py::dict d;
        d["y_level"] = ax.y_level;
        d["slope_xz"] = ax.slope_xz;
        d["canard_direction"] = ax.canard_direction;
        return d;
    });

    py::module_ hyb = m.def_submodule("hybrid");
    hyb.def(
        "integrate",
        [](const SystemSpec& spec, const State& s0, double horizon, double dense_step) {
            hybrid::IntegrateOptions opts;
            opts.dense_step = dense_step;
            return trajectory_dict(hybrid::integrate(spec, s0, horizon, opts));
        },
        py::arg("spec"), py::arg("s0"), py::arg("horizon"), py::arg("dense_step") = 0.0);
    hyb.def("winding_number", [](const SystemSpec& spec, const State& s0, double horizon,
                                 const Params& params) {
        auto traj = hybrid::integrate(spec, s0, horizon);
        auto w = hybrid::winding_number(traj, params);
        py::dict d;
        d["turns"] = w.turns;
        d["residual"] = w.residual;
        d["total_angle"] = w.total_angle;
        return d;
    });
    hyb.def(
        "integrate_smooth_reference",
        [](const Params& params, const State& s0, double horizon, double rtol) {
            return trajectory_dict(hybrid::integrate_smooth_reference(params, s0, horizon, rtol));
        },
        py::arg("params"), py::arg("s0"), py::arg("horizon"), py::arg("rtol") = 1e-10);

    py::module_ can = m.def_submodule("canard");
    py::class_<canard::CanardSolution>(can, "CanardSolution")
        .def_readonly("k", &canard::CanardSolution::k)
        .def_readonly("z", &canard::CanardSolution::z)
        .def_readonly("y", &canard::CanardSolution::y)
        .def_readonly("entry", &canard::CanardSolution::entry)
        .def_readonly("flight_time", &canard::CanardSolution::flight_time)
        .def_readonly("winding", &canard::CanardSolution::winding)
        .def_readonly("root_residual", &canard::CanardSolution::root_residual)
        .def_readonly("reversibility_error", &canard::CanardSolution::reversibility_error)
        .def_readonly("residence_sup_x", &canard::CanardSolution::residence_sup_x)
        .def_readonly("reversible", &canard::CanardSolution::reversible)
        .def_readonly("resident", &canard::CanardSolution::resident)
        .def_readonly("parity", &canard::CanardSolution::parity);
    can.def("maximal_canards", [](const Params& p) {
        auto res = canard::maximal_canards(p);
        py::dict d;
        d["canards"] = res.canards;
        d["warnings"] = res.warnings;
        d["window"] = py::make_tuple(res.window_lo, res.window_hi);
        d["n_candidates"] = res.candidates.size();
        return d;
    });
    can.def("canard_coordinates_leading", [](const Params& p, int k) {
        auto lc = canard::canard_coordinates_leading(p, k);
        return py::make_tuple(lc.y, lc.z);
    });
    py::class_<canard::SelectedCanard>(can, "SelectedCanard")
        .def_readonly("k", &canard::SelectedCanard::k)
        .def_readonly("delta_k", &canard::SelectedCanard::delta_k)
        .def_readonly("entry", &canard::SelectedCanard::entry)
        .def_readonly("flight_time", &canard::SelectedCanard::flight_time)
        .def("eval", &canard::SelectedCanard::eval);
    can.def("selected_canard", &canard::selected_canard, py::arg("p1"), py::arg("p2"),
            py::arg("p3"), py::arg("eps"), py::arg("k"));
    can.def("weak_canard_gap", &canard::weak_canard_gap);
    can.def("q_rational", [](const Params& p, double z) {
        auto rep = canard::q_rational(p, z);
        py::dict d;
        d["value"] = rep.value;
        d["zeros"] = py::make_tuple(rep.z1, rep.z2);
        d["poles"] = py::make_tuple(rep.pole1, rep.pole2);
        d["asymptote"] = rep.asymptote;
        return d;
    });

    py::module_ sing = m.def_submodule("singular");
    sing.def("reduced_flow", &singular::reduced_flow, py::arg("params"), py::arg("zone_sign"),
             py::arg("xz"), py::arg("t"));
    sing.def("smooth_reduced_flow", &singular::smooth_reduced_flow);
    sing.def("tangency_classification",
             [](const Params& p) { return singular::to_string(singular::tangency_classification(p)); });
    sing.def("singular_canard_directions", [](const Params& p) {
        auto d = singular::singular_canard_directions(p);
        py::dict out;
        out["weak_coef_x"] = d.weak_coef_x;
        out["weak_coef_z"] = d.weak_coef_z;
        out["strong_dz"] = d.strong_dz;
        out["strong_dx"] = d.strong_dx;
        out["weak_exists_as_canard"] = d.weak_exists_as_canard;
        return out;
    });
    sing.def(
        "singular_portrait",
        [](const Params& p, double z_min, double z_max, double x_min, double x_max, bool opened,
           double delta_tilde, int grid_n) {
            singular::Window w{z_min, z_max, x_min, x_max};
            auto port = singular::singular_portrait(p, w, opened, delta_tilde, grid_n);
            py::dict d;
            d["kind"] = geometry::to_string(port.kind);
            d["tangency"] = singular::to_string(port.tangency);
            d["weak_connected"] = port.weak_connected;
            d["strong_connected"] = port.strong_connected;
            d["weak_exists_as_canard"] = port.weak_exists_as_canard;
            d["n_field_samples"] = port.field.size();
            return d;
        },
        py::arg("params"), py::arg("z_min"), py::arg("z_max"), py::arg("x_min"),
        py::arg("x_max"), py::arg("opened") = true, py::arg("delta_tilde") = 0.1,
        py::arg("grid_n") = 24);

    py::module_ pl = m.def_submodule("planar");
    pl.def("find_cycle", [](const SystemSpec& spec, double a) -> py::object {
        auto c = planar::find_cycle(spec, a);
        if (!c) return py::none();
        py::dict d;
        d["a"] = c->a;
        d["amplitude"] = c->amplitude;
        d["period"] = c->period;
        d["y_fixed"] = c->y_fixed;
        d["displacement_residual"] = c->displacement_residual;
        d["neutral_edge"] = c->neutral_edge;
        return d;
    });
    pl.def("explosion_scan_arima", [](const model::Arima& base, double eps, double a_min,
                                      double a_max, int n, double refine) {
        auto scan = planar::explosion_scan(base, eps, a_min, a_max, n, refine);
        py::dict d;
        d["a"] = scan.a;
        d["amplitude"] = scan.amplitude;
        d["transition_found"] = scan.transition_found;
        d["a_lo"] = scan.a_lo;
        d["a_hi"] = scan.a_hi;
        d["width"] = scan.width();
        return d;
    });
    pl.def("transient_mmo", [](const SystemSpec& spec, const PwlCurve& curve, const State& s0,
                               double horizon, double theta) {
        auto tm = planar::transient_mmo(spec, curve, s0, horizon, theta);
        py::list events;
        for (const auto& ev : tm.events) {
            py::dict e;
            e["t_start"] = ev.t_start;
            e["t_end"] = ev.t_end;
            e["range"] = ev.range();
            e["lao"] = ev.lao;
            events.append(e);
        }
        py::dict d;
        d["threshold"] = tm.threshold;
        d["events"] = events;
        return d;
    }, py::arg("spec"), py::arg("curve"), py::arg("s0"), py::arg("horizon"),
       py::arg("theta") = 0.0);

    py::module_ mm = m.def_submodule("mmo");
    mm.def("central_spectrum", [](const Params& p, const ReturnParams& r) {
        auto cs = mmo::central_spectrum(p, r);
        py::dict d;
        py::list eig;
        for (auto& e : cs.eigenvalues) eig.append(py::make_tuple(e.real(), e.imag()));
        d["eigenvalues"] = eig;
        d["max_abs_real"] = cs.max_abs_real;
        d["constant_sao"] = cs.constant_sao;
        return d;
    });
    mm.def("poincare_map", [](const SystemSpec& spec, double section_x, int direction,
                              const State& s, double horizon) -> py::object {
        auto r = mmo::poincare_map(spec, mmo::Section{section_x, direction}, s, horizon);
        if (!r) return py::none();
        return py::cast(*r);
    });
    mm.def("find_periodic_mmo", [](const SystemSpec& spec, const Params& p,
                                   const ReturnParams& r, const State& seed, double burn_in,
                                   double tol) {
        mmo::MmoOptions opts;
        opts.burn_in = burn_in;
        opts.tol = tol;
        auto orb = mmo::find_periodic_mmo(spec, p, r, seed, opts);
        py::dict d;
        d["anchor"] = orb.anchor;
        d["period"] = orb.period;
        d["residual"] = orb.residual;
        d["signature"] = orb.orbit_signature.pairs;
        d["signature_text"] = orb.orbit_signature.str();
        d["sao_amplitude_spread"] = orb.sao_amplitude_spread;
        py::list mult;
        for (auto& q : orb.multipliers) mult.append(py::make_tuple(q.real(), q.imag()));
        d["multipliers"] = mult;
        return d;
    }, py::arg("spec"), py::arg("params"), py::arg("ret"), py::arg("seed"),
       py::arg("burn_in") = 3000.0, py::arg("tol") = 1e-8);
    mm.def("signature", [](const SystemSpec& spec, const State& s0, double horizon, double delta,
                           double x0) {
        auto traj = hybrid::integrate(spec, s0, horizon);
        auto sig = mmo::signature(traj, delta, x0);
        py::dict d;
        d["pairs"] = sig.pairs;
        d["text"] = sig.str();
        return d;
    });
    mm.def("demo_params", &mmo::demo_params);
    mm.def("demo_return_params", &mmo::demo_return_params, py::arg("constant_sao") = false);
    mm.def("demo_seed", &mmo::demo_seed);
}
