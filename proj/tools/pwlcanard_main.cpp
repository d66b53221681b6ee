#include "pwl/canard.hpp"
#include "pwl/geometry.hpp"
#include "pwl/hybrid.hpp"
#include "pwl/io.hpp"
#include "pwl/mmo.hpp"
#include "pwl/model.hpp"
#include "pwl/parallel.hpp"
#include "pwl/planar.hpp"
#include "pwl/singular.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

using pwl::io::json;

// Per-scenario option store: CLI flag wins over config key wins over default.
class Options {
  public:
    Options(CLI::App* cmd, json cfg) : cmd_(cmd), cfg_(std::move(cfg)) {}

    double num(const std::string& flag, const std::string& key, double fallback) const {
        if (const CLI::Option* o = cmd_->get_option_no_throw("--" + flag); o && o->count())
            return std::stod(o->results().front());
        if (cfg_.contains(key)) return cfg_.at(key).get<double>();
        return fallback;
    }
    std::string str(const std::string& flag, const std::string& key,
                    const std::string& fallback) const {
        if (const CLI::Option* o = cmd_->get_option_no_throw("--" + flag); o && o->count())
            return o->results().front();
        if (cfg_.contains(key)) return cfg_.at(key).get<std::string>();
        return fallback;
    }
    bool flag(const std::string& flag_name, const std::string& key, bool fallback) const {
        if (const CLI::Option* o = cmd_->get_option_no_throw("--" + flag_name); o && o->count())
            return true;
        if (cfg_.contains(key)) return cfg_.at(key).get<bool>();
        return fallback;
    }
    bool has(const std::string& flag, const std::string& key) const {
        const CLI::Option* o = cmd_->get_option_no_throw("--" + flag);
        return (o && o->count()) || cfg_.contains(key);
    }

  private:
    CLI::App* cmd_;
    json cfg_;
};

pwl::Params params_from(const Options& opt) {
    const double p1 = opt.num("p1", "p1", 1.0);
    const double p2 = opt.num("p2", "p2", -1.0);
    const double p3 = opt.num("p3", "p3", 0.1);
    const double eps = opt.num("eps", "eps", 1e-2);
    if (opt.has("delta", "delta"))
        return pwl::Params(p1, p2, p3, eps, opt.num("delta", "delta", 0.0));
    return pwl::Params(p1, p2, p3, eps);
}

pwl::ReturnParams return_from(const Options& opt) {
    pwl::ReturnParams ret;
    ret.alpha1 = opt.num("alpha1", "alpha1", 0.0);
    ret.alpha2 = opt.num("alpha2", "alpha2", 0.0);
    ret.alpha3 = opt.num("alpha3", "alpha3", 0.0);
    ret.kappa = opt.num("kappa", "kappa", 0.0);
    ret.zeta = opt.num("zeta", "zeta", 0.0);
    ret.xi = opt.num("xi", "xi", 0.0);
    ret.x0 = opt.num("x0", "x0", 1.0);
    return ret;
}

pwl::model::Arima arima_from(const Options& opt) {
    pwl::model::Arima k;
    k.beta = opt.num("beta", "beta", k.beta);
    k.delta = opt.num("pdelta", "planar_delta", k.delta);
    k.x0 = opt.num("px0", "planar_x0", k.x0);
    k.a = opt.num("a", "a", k.a);
    k.s_left = opt.num("s-left", "s_left", k.s_left);
    k.s_mid = opt.num("s-mid", "s_mid", k.s_mid);
    k.s_right = opt.num("s-right", "s_right", k.s_right);
    return k;
}

pwl::model::QuasiCanard quasi_from(const Options& opt) {
    pwl::model::QuasiCanard k;
    k.k = opt.num("k", "k", k.k);
    k.a = opt.num("a", "a", k.a);
    return k;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        pwl::io::write_json(out_path, j);
}

// Registers the shared numeric flags so get_option_no_throw can find them.
void add_common_numeric(CLI::App* c, const std::vector<std::string>& names) {
    for (const auto& n : names)
        c->add_option("--" + n, "(see README; config key with the same name)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piecewise-linear slow-fast systems: canards, folded singularities and MMOs"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON scenario file; flags override its keys");

    auto* c_classify = app.add_subcommand("classify", "Folded-singularity classification");
    add_common_numeric(c_classify, {"p1", "p2", "p3"});
    c_classify->add_option("--out", "Output JSON path (stdout if omitted)");

    auto* c_sim = app.add_subcommand("simulate", "Integrate a trajectory and export CSV");
    add_common_numeric(c_sim, {"p1", "p2", "p3", "eps", "delta", "alpha1", "alpha2", "alpha3",
                               "kappa", "zeta", "xi", "x0", "k", "a", "beta", "pdelta", "px0",
                               "s-left", "s-mid", "s-right", "c", "x", "y", "z", "horizon",
                               "dense-step"});
    c_sim->add_option("--system", "minimal | return | quasi | arima | quasi-drift | arima-drift");
    c_sim->add_option("--out", "Trajectory CSV path");

    auto* c_can = app.add_subcommand("canards", "Locate and validate maximal canards");
    add_common_numeric(c_can, {"p1", "p2", "p3", "eps", "delta"});
    c_can->add_option("--out", "Output JSON path");
    c_can->add_option("--traj-dir", "Directory for per-canard trajectory CSVs");

    auto* c_sel = app.add_subcommand("selected", "Closed-form selected canard (delta = delta_k)");
    add_common_numeric(c_sel, {"p1", "p2", "p3", "eps", "kidx", "samples"});
    c_sel->add_option("--out", "Output JSON path");
    c_sel->add_option("--csv", "Closed-form samples CSV path");

    auto* c_sing = app.add_subcommand("singular", "Singular (eps = 0) phase-portrait dataset");
    add_common_numeric(c_sing, {"p1", "p2", "p3", "eps", "delta-tilde", "zmin", "zmax", "xmin",
                                "xmax", "grid"});
    c_sing->add_flag("--two-zonal", "Do not open the central strip");
    c_sing->add_option("--out", "Portrait JSON path");
    c_sing->add_option("--field-csv", "Field-sample CSV path");

    auto* c_pc = app.add_subcommand("planar-cycle", "Planar limit cycle via the return map");
    add_common_numeric(c_pc, {"eps", "k", "a", "beta", "pdelta", "px0", "s-left", "s-mid",
                              "s-right"});
    c_pc->add_option("--kind", "quasi | arima");
    c_pc->add_option("--out", "Output JSON path");
    c_pc->add_option("--csv", "One-period orbit CSV path");

    auto* c_ps = app.add_subcommand("planar-scan", "Amplitude-vs-a scan with transition refinement");
    add_common_numeric(c_ps, {"eps", "k", "beta", "pdelta", "px0", "s-left", "s-mid", "s-right",
                              "a-min", "a-max", "n", "refine"});
    c_ps->add_option("--kind", "quasi | arima");
    c_ps->add_option("--out", "Output JSON path");
    c_ps->add_option("--csv", "Scan table CSV path");

    auto* c_tm = app.add_subcommand("transient-mmo", "Drifted planar system with SAO/LAO labels");
    add_common_numeric(c_tm, {"eps", "k", "a", "beta", "pdelta", "px0", "s-left", "s-mid",
                              "s-right", "c", "x", "y", "a0", "horizon", "theta"});
    c_tm->add_option("--kind", "quasi | arima");
    c_tm->add_option("--out", "Events JSON path");
    c_tm->add_option("--csv", "Trajectory CSV path");

    auto* c_mmo = app.add_subcommand("mmo", "Periodic MMO with global return");
    add_common_numeric(c_mmo, {"p1", "p2", "p3", "eps", "delta", "alpha1", "alpha2", "alpha3",
                               "kappa", "zeta", "xi", "x0", "burn-in", "tol", "seed-x", "seed-y",
                               "seed-z"});
    c_mmo->add_flag("--demo", "Use the repository demo return parameters");
    c_mmo->add_flag("--demo-constant-sao", "Use the constant-SAO demo variant");
    c_mmo->add_option("--out", "Summary JSON path");
    c_mmo->add_option("--csv", "One-period orbit CSV path");

    auto* c_sweep = app.add_subcommand("sweep", "Sweep one parameter of the minimal system");
    add_common_numeric(c_sweep, {"p1", "p2", "p3", "eps", "min", "max", "n"});
    c_sweep->add_option("--param", "p1 | p2 | p3 | eps");
    c_sweep->add_option("--out", "CSV path (value,class,mu,canard_count)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json cfg;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::invalid_argument("cannot open config " + config_path);
            is >> cfg;
        }

        if (c_classify->parsed()) {
            Options opt(c_classify, cfg);
            auto cls = pwl::geometry::classify(opt.num("p1", "p1", 1.0),
                                               opt.num("p2", "p2", -1.0),
                                               opt.num("p3", "p3", 0.1));
            emit(pwl::io::classification_json(cls), opt.str("out", "out", ""));
        } else if (c_sim->parsed()) {
            Options opt(c_sim, cfg);
            const std::string system = opt.str("system", "system", "minimal");
            const double horizon = opt.num("horizon", "horizon", 100.0);
            pwl::hybrid::IntegrateOptions iopts;
            iopts.dense_step = opt.num("dense-step", "dense_step", 0.0);

            pwl::State s0;
            std::optional<pwl::SystemSpec> spec;
            if (system == "minimal") {
                spec = pwl::model::build_minimal_3d(params_from(opt));
                s0 = pwl::State(3);
                s0 << opt.num("x", "x", -0.5), opt.num("y", "y", 0.0), opt.num("z", "z", -0.1);
            } else if (system == "return") {
                spec = pwl::model::build_global_return(params_from(opt), return_from(opt));
                s0 = pwl::State(3);
                s0 << opt.num("x", "x", -0.5), opt.num("y", "y", 0.0), opt.num("z", "z", -0.1);
            } else if (system == "quasi" || system == "arima") {
                const double eps = opt.num("eps", "eps", 0.1);
                spec = system == "quasi" ? pwl::model::build_planar(quasi_from(opt), eps)
                                         : pwl::model::build_planar(arima_from(opt), eps);
                s0 = pwl::State(2);
                s0 << opt.num("x", "x", 0.0), opt.num("y", "y", 0.5);
            } else if (system == "quasi-drift" || system == "arima-drift") {
                const double eps = opt.num("eps", "eps", 0.1);
                const double c = opt.num("c", "c", -0.001);
                spec = system == "quasi-drift"
                           ? pwl::model::build_planar_drifted(quasi_from(opt), c, eps)
                           : pwl::model::build_planar_drifted(arima_from(opt), c, eps);
                s0 = pwl::State(3);
                s0 << opt.num("x", "x", 0.0), opt.num("y", "y", 0.5), opt.num("a0", "a0", 1.0);
            } else {
                throw std::invalid_argument("simulate: unknown --system " + system);
            }
            auto traj = pwl::hybrid::integrate(*spec, s0, horizon, iopts);
            const std::string out = opt.str("out", "out", "trajectory.csv");
            pwl::io::write_trajectory_csv(out, traj, spec->dimension());
        } else if (c_can->parsed()) {
            Options opt(c_can, cfg);
            auto params = params_from(opt);
            auto search = pwl::canard::maximal_canards(params);
            emit(pwl::io::canard_search_json(params, search), opt.str("out", "out", ""));
            const std::string dir = opt.str("traj-dir", "traj_dir", "");
            if (!dir.empty()) {
                auto spec = pwl::model::build_minimal_3d(params);
                for (const auto& sol : search.canards) {
                    auto traj = pwl::hybrid::integrate(spec, sol.entry, sol.flight_time);
                    pwl::io::write_trajectory_csv(dir + "/canard_k" + std::to_string(sol.k) +
                                                      ".csv",
                                                  traj, 3);
                }
            }
        } else if (c_sel->parsed()) {
            Options opt(c_sel, cfg);
            const int k = static_cast<int>(opt.num("kidx", "k", 0.0));
            auto sel = pwl::canard::selected_canard(opt.num("p1", "p1", 1.0),
                                                    opt.num("p2", "p2", -1.0),
                                                    opt.num("p3", "p3", 0.2),
                                                    opt.num("eps", "eps", 1e-2), k);
            emit(pwl::io::selected_json(sel), opt.str("out", "out", ""));
            const std::string csv = opt.str("csv", "csv", "");
            if (!csv.empty()) {
                const int n = static_cast<int>(opt.num("samples", "samples", 512.0));
                std::ofstream os(csv);
                os << "t,x,y,z\n";
                for (int i = 0; i <= n; ++i) {
                    const double t = sel.flight_time * i / n;
                    const auto s = sel.eval(t);
                    os << pwl::io::fmt(t) << ',' << pwl::io::fmt(s(0)) << ','
                       << pwl::io::fmt(s(1)) << ',' << pwl::io::fmt(s(2)) << '\n';
                }
            }
        } else if (c_sing->parsed()) {
            Options opt(c_sing, cfg);
            auto params = params_from(opt);
            pwl::singular::Window win;
            win.z_min = opt.num("zmin", "z_min", -1.0);
            win.z_max = opt.num("zmax", "z_max", 1.0);
            win.x_min = opt.num("xmin", "x_min", -1.0);
            win.x_max = opt.num("xmax", "x_max", 1.0);
            const bool opened = !opt.flag("two-zonal", "two_zonal", false);
            const double dt = opt.num("delta-tilde", "delta_tilde",
                                      0.1 * (win.x_max - win.x_min) * 0.5);
            const int grid = static_cast<int>(opt.num("grid", "grid", 24.0));
            auto portrait = pwl::singular::singular_portrait(params, win, opened, dt, grid);
            emit(pwl::io::portrait_json(portrait), opt.str("out", "out", ""));
            const std::string csv = opt.str("field-csv", "field_csv", "");
            if (!csv.empty()) {
                std::ofstream os(csv);
                os << "z,x,dz,dx,zone\n";
                for (const auto& f : portrait.field)
                    os << pwl::io::fmt(f.z) << ',' << pwl::io::fmt(f.x) << ','
                       << pwl::io::fmt(f.dz) << ',' << pwl::io::fmt(f.dx) << ',' << f.zone
                       << '\n';
            }
        } else if (c_pc->parsed()) {
            Options opt(c_pc, cfg);
            const std::string kind = opt.str("kind", "kind", "arima");
            const double eps = opt.num("eps", "eps", 0.1);
            const double a = opt.num("a", "a", 0.0);
            auto spec = kind == "quasi" ? pwl::model::build_planar(quasi_from(opt), eps)
                                        : pwl::model::build_planar(arima_from(opt), eps);
            auto cyc = pwl::planar::find_cycle(spec, a);
            json j = cyc ? pwl::io::cycle_json(*cyc) : json{{"found", false}, {"a", a}};
            emit(j, opt.str("out", "out", ""));
            const std::string csv = opt.str("csv", "csv", "");
            if (cyc && !csv.empty()) pwl::io::write_trajectory_csv(csv, cyc->orbit, 2);
        } else if (c_ps->parsed()) {
            Options opt(c_ps, cfg);
            const std::string kind = opt.str("kind", "kind", "arima");
            const double eps = opt.num("eps", "eps", 0.1);
            const double a0 = opt.num("a-min", "a_min", -0.1);
            const double a1 = opt.num("a-max", "a_max", 0.4);
            const int n = static_cast<int>(opt.num("n", "n", 21.0));
            const double refine = opt.num("refine", "refine", 1e-7);
            pwl::planar::ExplosionScan scan =
                kind == "quasi"
                    ? pwl::planar::explosion_scan(quasi_from(opt), eps, a0, a1, n, refine)
                    : pwl::planar::explosion_scan(arima_from(opt), eps, a0, a1, n, refine);
            emit(pwl::io::scan_json(scan), opt.str("out", "out", ""));
            const std::string csv = opt.str("csv", "csv", "");
            if (!csv.empty()) {
                std::ofstream os(csv);
                os << "a,amplitude,period\n";
                for (std::size_t i = 0; i < scan.a.size(); ++i)
                    os << pwl::io::fmt(scan.a[i]) << ',' << pwl::io::fmt(scan.amplitude[i])
                       << ',' << pwl::io::fmt(scan.period[i]) << '\n';
            }
        } else if (c_tm->parsed()) {
            Options opt(c_tm, cfg);
            const std::string kind = opt.str("kind", "kind", "quasi");
            const double eps = opt.num("eps", "eps", 0.1);
            const double c = opt.num("c", "c", -0.001);
            const double horizon = opt.num("horizon", "horizon", 3000.0);
            pwl::State s0(3);
            pwl::SystemSpec spec = kind == "quasi"
                                       ? pwl::model::build_planar_drifted(quasi_from(opt), c, eps)
                                       : pwl::model::build_planar_drifted(arima_from(opt), c, eps);
            pwl::PwlCurve curve = kind == "quasi"
                                      ? pwl::model::planar_curve(quasi_from(opt))
                                      : pwl::model::planar_curve(arima_from(opt));
            s0 << opt.num("x", "x", 1.3), opt.num("y", "y", curve.eval(1.3)),
                opt.num("a0", "a0", 1.1);
            auto tm = pwl::planar::transient_mmo(spec, curve, s0, horizon,
                                                 opt.num("theta", "theta", 0.0));
            emit(pwl::io::transient_json(tm), opt.str("out", "out", ""));
            const std::string csv = opt.str("csv", "csv", "");
            if (!csv.empty()) pwl::io::write_trajectory_csv(csv, tm.trajectory, 3);
        } else if (c_mmo->parsed()) {
            Options opt(c_mmo, cfg);
            pwl::Params params = opt.flag("demo", "demo", false) ||
                                         opt.flag("demo-constant-sao", "demo_constant_sao", false)
                                     ? pwl::mmo::demo_params()
                                     : params_from(opt);
            pwl::ReturnParams ret;
            if (opt.flag("demo-constant-sao", "demo_constant_sao", false))
                ret = pwl::mmo::demo_return_params(true);
            else if (opt.flag("demo", "demo", false))
                ret = pwl::mmo::demo_return_params(false);
            else
                ret = return_from(opt);
            pwl::mmo::MmoOptions mopts;
            mopts.burn_in = opt.num("burn-in", "burn_in", 3000.0);
            mopts.tol = opt.num("tol", "tol", 1e-8);
            pwl::State seed(3);
            seed << opt.num("seed-x", "seed_x", -1.0), opt.num("seed-y", "seed_y", 0.6),
                opt.num("seed-z", "seed_z", -0.1);
            auto spec = pwl::model::build_global_return(params, ret);
            auto orbit = pwl::mmo::find_periodic_mmo(spec, params, ret, seed, mopts);
            json j = pwl::io::periodic_orbit_json(orbit);
            j["constant_sao_condition"] = pwl::model::constant_sao_condition(params, ret);
            j["central_spectrum_max_re"] = pwl::mmo::central_spectrum(params, ret).max_abs_real;
            emit(j, opt.str("out", "out", ""));
            const std::string csv = opt.str("csv", "csv", "");
            if (!csv.empty()) pwl::io::write_trajectory_csv(csv, orbit.orbit, 3);
        } else if (c_sweep->parsed()) {
            Options opt(c_sweep, cfg);
            const std::string pname = opt.str("param", "param", "p3");
            const double lo = opt.num("min", "min", 0.05);
            const double hi = opt.num("max", "max", 0.5);
            const int n = static_cast<int>(opt.num("n", "n", 10.0));
            auto base = params_from(opt);

            struct Row {
                double value;
                std::string cls;
                double mu;
                int count;
            };
            std::vector<Row> rows(static_cast<std::size_t>(n));
            pwl::parallel_for(rows.size(), [&](std::size_t i) {
                pwl::Params p = base;
                const double v = lo + (hi - lo) * (n == 1 ? 0.0 : double(i) / (n - 1));
                if (pname == "p1") p = pwl::Params(v, base.p2, base.p3, base.eps);
                else if (pname == "p2") p = pwl::Params(base.p1, v, base.p3, base.eps);
                else if (pname == "p3") p = pwl::Params(base.p1, base.p2, v, base.eps);
                else if (pname == "eps") p = pwl::Params(base.p1, base.p2, base.p3, v);
                else throw std::invalid_argument("sweep: unknown --param " + pname);
                Row r;
                r.value = v;
                auto cls = pwl::geometry::classify(p.p1, p.p2, p.p3);
                r.cls = pwl::geometry::to_string(cls.kind);
                r.mu = cls.mu.value_or(std::numeric_limits<double>::quiet_NaN());
                int count = -1;
                try {
                    count = static_cast<int>(pwl::canard::maximal_canards(p).canards.size());
                } catch (const std::invalid_argument&) {
                    count = -1;  // FSN or non-rotating
                }
                r.count = count;
                rows[i] = std::move(r);
            });
            const std::string out = opt.str("out", "out", "");
            std::ostringstream os;
            os << "value,class,mu,canard_count\n";
            for (const auto& r : rows)
                os << pwl::io::fmt(r.value) << ',' << r.cls << ',' << pwl::io::fmt(r.mu) << ','
                   << r.count << '\n';
            if (out.empty()) {
                std::cout << os.str();
            } else {
                std::ofstream f(out);
                f << os.str();
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
