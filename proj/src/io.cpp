#include "pwl/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace pwl::io {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const hybrid::Trajectory& traj, int dimension) {
    os << (dimension == 2 ? "t,x,y,zone\n" : "t,x,y,z,zone\n");
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        os << fmt(traj.t[i]);
        for (int c = 0; c < dimension; ++c) os << ',' << fmt(traj.s[i](c));
        os << ',' << traj.sample_zone[i] << '\n';
    }
}

void write_trajectory_csv(const std::string& path, const hybrid::Trajectory& traj,
                          int dimension) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_trajectory_csv(os, traj, dimension);
}

json classification_json(const geometry::SingularityClass& cls) {
    json j;
    j["class"] = geometry::to_string(cls.kind);
    j["rotating"] = cls.rotating;
    if (cls.mu) j["mu"] = *cls.mu;
    if (cls.sign_class) j["sign_class"] = geometry::to_string(*cls.sign_class);
    if (cls.mu_integer_boundary) j["mu_integer_boundary"] = true;
    return j;
}

json canard_json(const canard::CanardSolution& sol) {
    json j;
    j["k"] = sol.k;
    j["z"] = sol.z;
    j["y"] = sol.y;
    j["entry"] = {sol.entry(0), sol.entry(1), sol.entry(2)};
    j["flight_time"] = sol.flight_time;
    j["winding"] = sol.winding;
    j["root_residual"] = sol.root_residual;
    j["reversibility_error"] = sol.reversibility_error;
    j["flight_time_error"] = sol.flight_time_error;
    j["residence_sup_x"] = sol.residence_sup_x;
    j["reversible"] = sol.reversible;
    j["resident"] = sol.resident;
    j["parity"] = sol.parity;
    return j;
}

json canard_search_json(const Params& params, const canard::CanardSearch& search) {
    json j;
    j["params"] = {{"p1", params.p1}, {"p2", params.p2}, {"p3", params.p3},
                   {"eps", params.eps}, {"delta", params.delta}};
    if (params.p1 > 0.0 && params.p2 * params.p3 != 0.0)
        j["mu"] = geometry::max_winding(params);
    j["count"] = search.canards.size();
    j["window"] = {search.window_lo, search.window_hi};
    j["canards"] = json::array();
    for (const auto& c : search.canards) j["canards"].push_back(canard_json(c));
    j["candidates"] = json::array();
    for (const auto& c : search.candidates) {
        j["candidates"].push_back({{"z", c.z},
                                   {"theta", c.theta},
                                   {"k", c.k},
                                   {"system_residual", c.system_residual},
                                   {"system_ok", c.system_ok},
                                   {"validated", c.validated},
                                   {"note", c.note}});
    }
    j["warnings"] = search.warnings;
    return j;
}

json selected_json(const canard::SelectedCanard& sel) {
    json j;
    j["k"] = sel.k;
    j["delta_k"] = sel.delta_k;
    j["entry"] = {sel.entry(0), sel.entry(1), sel.entry(2)};
    j["flight_time"] = sel.flight_time;
    return j;
}

namespace {
json polyline_json(const singular::Polyline& p) {
    json pts = json::array();
    for (const auto& q : p.pts) pts.push_back({q(0), q(1)});
    return json{{"zone", p.zone}, {"role", p.role}, {"points_zx", pts}};
}
}  // namespace

json portrait_json(const singular::SingularPortrait& portrait) {
    json j;
    j["kind"] = geometry::to_string(portrait.kind);
    j["tangency"] = singular::to_string(portrait.tangency);
    j["opened"] = portrait.opened;
    j["delta_tilde"] = portrait.delta_tilde;
    j["window"] = {{"z_min", portrait.window.z_min},
                   {"z_max", portrait.window.z_max},
                   {"x_min", portrait.window.x_min},
                   {"x_max", portrait.window.x_max}};
    j["weak_connected"] = portrait.weak_connected;
    j["strong_connected"] = portrait.strong_connected;
    j["weak_exists_as_canard"] = portrait.weak_exists_as_canard;
    j["tangency_points_zx"] = json::array();
    for (const auto& p : portrait.tangency_points) j["tangency_points_zx"].push_back({p(0), p(1)});
    for (const char* name : {"half_lines", "weak", "strong", "equilibria"}) j[name] = json::array();
    for (const auto& p : portrait.half_lines) j["half_lines"].push_back(polyline_json(p));
    for (const auto& p : portrait.weak_pieces) j["weak"].push_back(polyline_json(p));
    for (const auto& p : portrait.strong_pieces) j["strong"].push_back(polyline_json(p));
    for (const auto& p : portrait.equilibria_lines) j["equilibria"].push_back(polyline_json(p));
    if (portrait.funnel) {
        json f;
        f["gate_z"] = {portrait.funnel->gate_z_lo, portrait.funnel->gate_z_hi};
        f["boundary"] = json::array();
        for (const auto& p : portrait.funnel->boundary) f["boundary"].push_back(polyline_json(p));
        j["funnel"] = f;
    }
    return j;
}

json cycle_json(const planar::Cycle& cycle) {
    json j;
    j["found"] = true;
    j["a"] = cycle.a;
    j["section_x"] = cycle.section_x;
    j["y_fixed"] = cycle.y_fixed;
    j["amplitude"] = cycle.amplitude;
    j["period"] = cycle.period;
    j["displacement_residual"] = cycle.displacement_residual;
    j["neutral_edge"] = cycle.neutral_edge;
    return j;
}

json scan_json(const planar::ExplosionScan& scan) {
    json j;
    j["relaxation_amplitude"] = scan.relaxation_amplitude;
    j["transition_found"] = scan.transition_found;
    if (scan.transition_found) {
        j["a_lo"] = scan.a_lo;
        j["a_hi"] = scan.a_hi;
        j["width"] = scan.width();
    }
    return j;
}

json transient_json(const planar::TransientMmo& tm) {
    json j;
    j["threshold"] = tm.threshold;
    j["events"] = json::array();
    for (const auto& ev : tm.events)
        j["events"].push_back({{"t_start", ev.t_start},
                               {"t_end", ev.t_end},
                               {"x_min", ev.x_min},
                               {"x_max", ev.x_max},
                               {"kind", ev.lao ? "LAO" : "SAO"}});
    return j;
}

json signature_json(const mmo::MmoSignature& sig) {
    json pairs = json::array();
    for (const auto& [L, s] : sig.pairs) pairs.push_back({L, s});
    return json{{"pairs", pairs},
                {"text", sig.str()},
                {"lao_threshold_x", sig.lao_threshold_x},
                {"sao_band", sig.sao_band}};
}

json periodic_orbit_json(const mmo::PeriodicOrbit& orbit) {
    json j;
    j["anchor"] = {orbit.anchor(0), orbit.anchor(1), orbit.anchor(2)};
    j["period"] = orbit.period;
    j["residual"] = orbit.residual;
    j["multipliers"] = json::array();
    for (const auto& m : orbit.multipliers) j["multipliers"].push_back({m.real(), m.imag()});
    j["signature"] = signature_json(orbit.orbit_signature);
    j["sao_amplitude_spread"] = orbit.sao_amplitude_spread;
    j["sao_count"] = orbit.sao_count;
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << '\n';
}

}  // namespace pwl::io
