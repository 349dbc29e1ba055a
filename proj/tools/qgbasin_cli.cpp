// qgbasin: command-line front end for simulations, bound checks, linear modes
// and periodic-orbit searches.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgbasin/config.hpp"
#include "qgbasin/io.hpp"
#include "qgbasin/orbit.hpp"
#include "qgbasin/theory.hpp"
#include "qgbasin/timestepper.hpp"

using namespace qgbasin;

namespace {

enum Exit : int {
    ok = 0,
    usage = 2,
    blow_up = 3,
    not_converged = 4,
    check_failed = 5,
    condition_fails = 6,
};

struct Options {
    std::string config;
    std::vector<std::string> sets;
    bool newton = false;
    bool floquet = false;
    std::optional<double> tol;
};

// Key/value pairs printed to stdout and, optionally, mirrored to a summary file.
class Summary {
public:
    void add(const std::string& key, double v)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        add(key, std::string(buf));
    }
    void add(const std::string& key, int v) { add(key, std::to_string(v)); }
    void add(const std::string& key, bool v) { add(key, std::string(v ? "true" : "false")); }
    void add(const std::string& key, const char* v) { add(key, std::string(v)); }
    void add(const std::string& key, const std::string& v) { text_ += key + " = " + v + "\n"; }

    void emit(const std::optional<std::filesystem::path>& path) const
    {
        std::cout << text_ << std::flush;
        if (path) {
            write_file_atomic(*path, text_);
        }
    }

private:
    std::string text_;
};

std::vector<std::pair<std::string, std::string>> parse_sets(const std::vector<std::string>& sets)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError(s, 0, "--set expects key=value");
        }
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

RunConfig load(const Options& opt)
{
    RunConfig cfg = load_config(opt.config, parse_sets(opt.sets));
    if (opt.tol) {
        if (!(*opt.tol > 0.0)) {
            throw ConfigError("tol", 0, "--tol must be positive");
        }
        cfg.tol = *opt.tol;
    }
    return cfg;
}

std::optional<DissipativityEstimate> try_estimate(const RunConfig& cfg)
{
    if (!check_condition(cfg.params, cfg.domain).satisfied) {
        return std::nullopt;
    }
    return cfg.epsilon ? make_estimate(cfg.params, cfg.domain, cfg.forcing, *cfg.epsilon)
                       : make_estimate(cfg.params, cfg.domain, cfg.forcing);
}

void warn_cfl(const Dynamics& dyn, const StateView& s0, const StepConfig& stepping)
{
    const double limit = check_cfl(dyn, s0, stepping.cfl_safety);
    if (stepping.dt > limit) {
        std::cerr << "warning: dt = " << stepping.dt << " exceeds the advective limit " << limit
                  << " for the initial state\n";
    }
}

int run_simulation(const RunConfig& cfg, const std::optional<DissipativityEstimate>& est, Summary& out,
                   std::vector<DiagnosticsRecord>* records)
{
    if (!(cfg.stepping.t_end > 0.0)) {
        throw ConfigError("t_end", 0, "must be positive for this command");
    }
    const Dynamics dyn(cfg.domain, cfg.params, cfg.forcing);
    const StateView s0 = StateView::from_vorticity(make_initial_field(cfg), 0.0);
    warn_cfl(dyn, s0, cfg.stepping);

    IntegrateOptions opts;
    if (est && est->alpha > 0.0) {
        opts.envelope = make_envelope(*est, norm2(s0.omega));
    }
    try {
        Trajectory tr = integrate(dyn, s0, cfg.stepping, opts);
        write_diagnostics(tr.records, cfg.diagnostics_path);
        write_field(tr.state.omega, cfg.checkpoint_path);
        const DiagnosticsRecord& last = tr.records.back();
        out.add("t", last.t);
        out.add("enstrophy", last.enstrophy);
        out.add("energy", last.energy);
        out.add("records", static_cast<int>(tr.records.size()));
        out.add("diagnostics", cfg.diagnostics_path.string());
        out.add("checkpoint", cfg.checkpoint_path.string());
        if (records) {
            *records = std::move(tr.records);
        }
        return ok;
    } catch (const BlowUpError& e) {
        write_diagnostics(e.partial(), cfg.diagnostics_path);
        std::cerr << "error: " << e.what() << " (partial diagnostics in " << cfg.diagnostics_path.string() << ")\n";
        out.add("blow_up_time", e.time());
        return blow_up;
    }
}

int cmd_simulate(const Options& opt)
{
    const RunConfig cfg = load(opt);
    Summary out;
    const int code = run_simulation(cfg, try_estimate(cfg), out, nullptr);
    out.emit(cfg.summary_path);
    return code;
}

int cmd_verify_bound(const Options& opt)
{
    const RunConfig cfg = load(opt);
    const ConditionCheck cond = check_condition(cfg.params, cfg.domain);
    if (!cond.satisfied) {
        std::cerr << "error: dissipativity condition fails (margin " << cond.margin << "); no envelope to verify\n";
        return condition_fails;
    }
    const DissipativityEstimate est = *try_estimate(cfg);
    Summary out;
    std::vector<DiagnosticsRecord> records;
    const int code = run_simulation(cfg, est, out, &records);
    if (code != ok) {
        out.emit(cfg.summary_path);
        return code;
    }
    const EnvelopeReport rep = verify_envelope(records, est, records.front().enstrophy);
    out.add("epsilon", est.epsilon);
    out.add("alpha", est.alpha);
    out.add("M", est.M);
    out.add("absorbing_radius2", *est.absorbing_radius2);
    out.add("max_excess", rep.max_excess);
    out.add("tolerance", rep.tolerance);
    out.add("worst_t", records[rep.worst_index].t);
    out.add("inside_ball", records.back().enstrophy <= *est.absorbing_radius2 + 1e-6);
    out.add("pass", rep.pass);
    out.emit(cfg.summary_path);
    if (!rep.pass) {
        std::cerr << "error: enstrophy exceeds the envelope by " << rep.max_excess << " at t = "
                  << records[rep.worst_index].t << "\n";
        return check_failed;
    }
    return ok;
}

int cmd_linear_mode(const Options& opt)
{
    const RunConfig cfg = load(opt);
    const double tol = opt.tol.value_or(1e-3);
    if (cfg.mode_m > cfg.domain.mx() || cfg.mode_n > cfg.domain.my()) {
        throw ConfigError("mode_m", 0, "mode outside the truncation");
    }
    const LinearMode mode = dispersion(cfg.mode_m, cfg.mode_n, cfg.params.beta, cfg.domain);
    const Dynamics dyn(cfg.domain, {cfg.params.beta, 0.0, 0.0}, {});
    const SpectralField psi0 = linear_mode_field(mode, 0.0, cfg.domain);

    StepConfig stepping;
    stepping.dt = mode.period / cfg.steps_per_period;
    stepping.t_end = mode.period;
    stepping.record_every = cfg.steps_per_period;
    IntegrateOptions opts;
    opts.advection = Advection::linearized;
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(laplacian(psi0), 0.0), stepping, opts);
    const double err = l2_norm(tr.state.psi - linear_mode_field(mode, mode.period, cfg.domain)) / l2_norm(psi0);

    Summary out;
    out.add("m", mode.m);
    out.add("n", mode.n);
    out.add("sigma", mode.sigma);
    out.add("period", mode.period);
    out.add("dt", stepping.dt);
    out.add("relative_error", err);
    out.add("tolerance", tol);
    out.add("pass", err <= tol);
    out.emit(cfg.summary_path);
    return err <= tol ? ok : check_failed;
}

int cmd_check_condition(const Options& opt)
{
    const RunConfig cfg = load(opt);
    const ConditionCheck c = check_condition(cfg.params, cfg.domain);
    Summary out;
    out.add("lhs", c.lhs);
    out.add("rhs", c.rhs);
    out.add("margin", c.margin);
    out.add("satisfied", c.satisfied);
    if (c.satisfied) {
        const DissipativityEstimate est = *try_estimate(cfg);
        out.add("epsilon", est.epsilon);
        out.add("alpha", est.alpha);
        out.add("M", est.M);
        out.add("absorbing_radius2", *est.absorbing_radius2);
    }
    out.emit(cfg.summary_path);
    return c.satisfied ? ok : condition_fails;
}

int cmd_find_orbit(const Options& opt)
{
    const RunConfig cfg = load(opt);
    const Dynamics dyn(cfg.domain, cfg.params, cfg.forcing);
    const SpectralField w0 = make_initial_field(cfg);
    warn_cfl(dyn, StateView::from_vorticity(w0, 0.0), cfg.stepping);
    const PeriodMap map(dyn, cfg.stepping.dt);

    OrbitOptions oo;
    oo.tol = cfg.tol;
    oo.max_iter = cfg.max_iter;
    oo.krylov_dim = cfg.krylov_dim;
    oo.estimate = try_estimate(cfg);

    Summary out;
    try {
        OrbitResult orbit = find_orbit_picard(w0, map, oo);
        const int picard_iterations = orbit.iterations;
        if (opt.newton) {
            orbit = find_orbit_newton(orbit.omega_star, map, oo);
        }
        write_field(orbit.omega_star, cfg.checkpoint_path);

        out.add("method", to_string(orbit.method));
        out.add("converged", orbit.converged);
        out.add("residual", orbit.residual);
        out.add("iterations", orbit.iterations);
        if (opt.newton) {
            out.add("picard_iterations", picard_iterations);
            out.add("picard_fallback", orbit.picard_fallback);
        }
        out.add("steps_per_period", map.steps());
        out.add("enstrophy", norm2(orbit.omega_star));
        if (orbit.inside_ball) {
            out.add("absorbing_radius2", *oo.estimate->absorbing_radius2);
            out.add("inside_ball", *orbit.inside_ball);
        }
        if (orbit.residual_history.size() >= 4 && orbit.method == OrbitMethod::picard) {
            out.add("observed_contraction", observed_contraction(orbit.residual_history));
        }
        if (opt.floquet) {
            const FloquetEstimate f = estimate_floquet(orbit.omega_star, map, cfg.power_iters);
            if (!f.converged) {
                std::cerr << "warning: power iteration did not settle after " << f.iterations << " iterations\n";
            }
            out.add("floquet_magnitude", f.magnitude);
            out.add("floquet_converged", f.converged);
        }
        std::vector<std::pair<int, int>> seen;
        for (const ForcingTerm& t : cfg.forcing.terms) {
            if (std::find(seen.begin(), seen.end(), std::make_pair(t.m, t.n)) != seen.end()) {
                continue;
            }
            seen.emplace_back(t.m, t.n);
            const ModeHarmonics h = mode_harmonics(orbit.omega_star, map, t.m, t.n);
            const std::string key = "mode_" + std::to_string(t.m) + "_" + std::to_string(t.n);
            out.add(key + "_mean", h.mean);
            out.add(key + "_amplitude", h.amplitude);
        }
        out.add("checkpoint", cfg.checkpoint_path.string());
        out.emit(cfg.summary_path);
        if (!orbit.converged) {
            std::cerr << "error: no orbit within tolerance " << cfg.tol << " after " << orbit.iterations
                      << " iterations (best residual " << orbit.residual << ")\n";
            return not_converged;
        }
        return ok;
    } catch (const BlowUpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return blow_up;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Forced dissipative quasi-geostrophic basin solver"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config, "Configuration file")->required();
        sub->add_option("--set", opt.sets, "Override a config key, key=value (repeatable)");
        return sub;
    };

    auto* simulate = add_common(app.add_subcommand("simulate", "Integrate and write diagnostics and a checkpoint"));
    auto* verify = add_common(app.add_subcommand("verify-bound", "Simulate and check enstrophy against the envelope"));
    auto* linear = add_common(app.add_subcommand("linear-mode", "Propagate a basin mode for one period"));
    linear->add_option("--tol", opt.tol, "Relative L2 error allowed (default 1e-3)");
    auto* condition = add_common(app.add_subcommand("check-condition", "Evaluate the dissipativity condition"));
    auto* orbit = add_common(app.add_subcommand("find-orbit", "Search for a T-periodic solution"));
    orbit->add_flag("--newton", opt.newton, "Refine with Newton-GMRES after Picard");
    orbit->add_flag("--floquet", opt.floquet, "Estimate the dominant Floquet multiplier");
    orbit->add_option("--tol", opt.tol, "Fixed-point residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (*simulate) {
            return cmd_simulate(opt);
        }
        if (*verify) {
            return cmd_verify_bound(opt);
        }
        if (*linear) {
            return cmd_linear_mode(opt);
        }
        if (*condition) {
            return cmd_check_condition(opt);
        }
        if (*orbit) {
            return cmd_find_orbit(opt);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return usage;
}
