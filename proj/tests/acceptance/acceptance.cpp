// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qgbasin/config.hpp"
#include "qgbasin/io.hpp"
#include "qgbasin/orbit.hpp"
#include "qgbasin/theory.hpp"

using namespace qgbasin;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what + (ok ? "" : " [X]");
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string qoi(const std::string& name, double value, double threshold)
{
    return name + "=" + fmt("%.3e", value) + " (thr " + fmt("%.1e", threshold) + ")";
}

fs::path scratch_dir()
{
    std::random_device rd;
    const fs::path p = fs::temp_directory_path() / ("qgbasin_accept_" + std::to_string(rd()));
    fs::create_directories(p);
    return p;
}

struct CliRun {
    int code = -1;
    std::map<std::string, std::string> values;
};

CliRun run_cli(const fs::path& dir, const std::string& config_text, const std::string& args)
{
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << config_text;
    const fs::path out = dir / "stdout.txt";
    const std::string cmd = "cd '" + dir.string() + "' && '" QGBASIN_CLI "' " + args + " '" + cfg.string() + "' > '"
                            + out.string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    CliRun run;
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) {
            run.values[line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    return run;
}

double value_or_nan(const CliRun& r, const std::string& key)
{
    const auto it = r.values.find(key);
    return it == r.values.end() ? std::nan("") : std::stod(it->second);
}

// ---------------------------------------------------------------------------

Outcome criterion1()
{
    Outcome o;
    const Domain d = Domain::unit_square(4, 4);
    double worst = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        for (int m = 1; m <= 4; ++m) {
            for (int n = 1; n <= 4; ++n) {
                const double expected = -beta / (2.0 * pi * std::sqrt(double(m * m + n * n)));
                worst = std::max(worst, std::abs(dispersion(m, n, beta, d).sigma - expected) / std::abs(expected));
            }
        }
    }
    o.require(worst <= 1e-14, qoi("max rel err", worst, 1e-14));
    return o;
}

double linear_mode_error(int modes)
{
    const Domain d = Domain::unit_square(modes, modes);
    const LinearMode mode = dispersion(1, 1, 1.0, d);
    const Dynamics dyn(d, {1.0, 0.0, 0.0}, {});
    const SpectralField psi0 = linear_mode_field(mode, 0.0, d);
    IntegrateOptions opts;
    opts.advection = Advection::linearized;
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(laplacian(psi0), 0.0),
                                    {mode.period / 2000, mode.period, 2000, 0.5}, opts);
    return l2_norm(tr.state.psi - linear_mode_field(mode, mode.period, d)) / l2_norm(psi0);
}

Outcome criterion2()
{
    Outcome o;
    const double e64 = linear_mode_error(64);
    const double e32 = linear_mode_error(32);
    o.require(e64 <= 1e-3, qoi("rel L2 err at 64^2", e64, 1e-3));
    o.require(e64 < e32, "err at 32^2=" + fmt("%.3e", e32) + " > err at 64^2");
    return o;
}

Outcome criterion3()
{
    Outcome o;
    const Domain d = Domain::unit_square(32, 32);
    const SineTransform tr(d);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto draw = [&] {
        SpectralField f(d);
        for (double& c : f.coeffs()) {
            c = u(rng);
        }
        return f;
    };
    double worst_w = 0.0;
    double worst_p = 0.0;
    double worst_self = 0.0;
    for (int k = 0; k < 200; ++k) {
        const SpectralField psi = draw();
        const SpectralField omega = draw();
        const SpectralField j = jacobian(tr, psi, omega);
        const double scale = l2_norm(j) * l2_norm(omega);
        worst_w = std::max(worst_w, std::abs(inner(j, omega)) / scale);
        worst_p = std::max(worst_p, std::abs(inner(j, psi)) / scale);
        const SpectralField jj = jacobian(tr, psi, psi);
        const double self_scale = l2_norm(jacobian(tr, psi, omega)) * l2_norm(psi);
        worst_self = std::max(worst_self, l2_norm(jj) / self_scale);
    }
    o.require(worst_w <= 1e-10, qoi("<J,w>/(|J||w|)", worst_w, 1e-10));
    o.require(worst_p <= 1e-10, qoi("<J,psi>/(|J||w|)", worst_p, 1e-10));
    o.require(worst_self <= 1e-10, qoi("|J(f,f)|/scale", worst_self, 1e-10));
    return o;
}

Outcome criterion4()
{
    Outcome o;
    const Domain d = Domain::unit_square(64, 64);
    const PoincareReport r = poincare_scan(d);
    o.require(r.min_rayleigh >= pi / d.area(), "min quotient " + fmt("%.12g", r.min_rayleigh) + " >= pi/|D|");
    const double rel = std::abs(r.min_rayleigh - 2 * pi * pi) / (2 * pi * pi);
    o.require(rel <= 1e-12, qoi("rel dev from 2 pi^2", rel, 1e-12));
    return o;
}

Outcome criterion5()
{
    Outcome o;
    const Domain d = Domain::unit_square(32, 32);
    const ModelParams p{0.1, 0.05, 0.5};
    const ForcingSpec spec{1.0, {{1, 1, 2.0, 0.0, 0.0}}};
    const DissipativityEstimate est = make_estimate(p, d, spec);
    const double margin = (0.5 + pi * 0.05) - 0.5 * 0.1 * (1.0 / pi + 1.0);
    o.require(std::abs(est.sup_forcing_norm2 - 1.0) <= 1e-14, "sup |f|^2 = " + fmt("%.15g", est.sup_forcing_norm2));
    o.require(std::abs(est.epsilon - margin / 2) <= 1e-15, "eps = margin/2");
    const double ball = est.M / est.alpha;

    const Dynamics dyn(d, p, spec);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_excess = -1e300;
    double worst_final = -1e300;
    for (int k = 0; k < 20; ++k) {
        const SpectralField w0 = random_field(d, 100 + k, 2.0 * std::sqrt(u(rng)));
        const double e0 = norm2(w0);
        IntegrateOptions opts;
        opts.envelope = make_envelope(est, e0);
        const Trajectory tr = integrate(dyn, StateView::from_vorticity(w0, 0.0), {0.01, 10.0, 5, 0.5}, opts);
        for (const DiagnosticsRecord& r : tr.records) {
            worst_excess = std::max(worst_excess, r.enstrophy - *r.envelope);
        }
        worst_final = std::max(worst_final, tr.records.back().enstrophy - ball);
        if (e0 > 4.0) {
            o.require(false, "initial enstrophy above 4");
        }
    }
    o.require(worst_excess <= 1e-8, qoi("max(enstrophy - envelope)", worst_excess, 1e-8));
    o.require(worst_final <= 1e-6, qoi("max(final - M/alpha)", worst_final, 1e-6));
    return o;
}

Outcome criterion6(const fs::path& dir)
{
    Outcome o;
    const std::string cfg = "Lx = 1\nLy = 1\nMx = 8\nMy = 8\nbeta = 0\nnu = 0.01\nr = 0.1\n"
                            "period = 1\nforce = 1 1 1 0 0\ndt = 0.001\nmax_iter = 400\n";
    const CliRun run = run_cli(dir, cfg, "find-orbit --tol 1e-10");
    const double lambda = 0.01 * 2 * pi * pi + 0.1;
    const double closed = 1.0 / std::sqrt(lambda * lambda + 4 * pi * pi);
    const double residual = value_or_nan(run, "residual");
    const double amp = value_or_nan(run, "mode_1_1_amplitude");
    o.require(run.code == 0, "exit " + std::to_string(run.code));
    o.require(residual <= 1e-8, qoi("residual", residual, 1e-8));
    o.require(std::abs(amp - closed) <= 1e-6, qoi("|amp - " + fmt("%.6f", closed) + "|", std::abs(amp - closed), 1e-6));
    return o;
}

struct NonlinearOrbit {
    Domain domain = Domain::unit_square(32, 32);
    ModelParams params{0.1, 0.05, 0.5};
    ForcingSpec spec{1.0, {{1, 2, 1.0, 0.0, 0.2}, {2, 1, 0.0, 1.0, 0.0}}};
    PeriodMap map{Dynamics(domain, params, spec), 0.005};
    OrbitOptions options;
    OrbitResult picard{SpectralField(domain)};

    NonlinearOrbit()
    {
        options.tol = 1e-10;
        options.estimate = make_estimate(params, domain, spec);
        picard = find_orbit_picard(SpectralField(domain), map, options);
    }
};

Outcome criterion7(const NonlinearOrbit& n)
{
    Outcome o;
    const double margin = check_condition(n.params, n.domain).margin;
    o.require(std::abs(margin - 0.59116) <= 5e-6, "margin " + fmt("%.5f", margin));
    o.require(n.picard.converged && n.picard.residual <= 1e-8, qoi("picard residual", n.picard.residual, 1e-8));
    const double defect = periodicity_defect(n.picard.omega_star, n.map, 16);
    o.require(defect <= 1e-7, qoi("max_t |w(t+T)-w(t)|", defect, 1e-7));
    const double ens = norm2(n.picard.omega_star);
    const double ball = *n.options.estimate->absorbing_radius2;
    o.require(n.picard.inside_ball.value_or(false) && ens <= ball * (1 + 1e-6),
              "|w*|^2=" + fmt("%.4e", ens) + " <= M/alpha=" + fmt("%.4f", ball));
    SpectralField start = n.picard.omega_star;
    start.axpy(1.0, random_field(n.domain, 77, 0.5 * l2_norm(n.picard.omega_star)));
    const OrbitResult newton = find_orbit_newton(start, n.map, n.options);
    const double diff = l2_norm(newton.omega_star - n.picard.omega_star);
    o.require(newton.converged && diff <= 1e-6, qoi("|newton - picard|", diff, 1e-6));
    return o;
}

Outcome criterion8()
{
    Outcome o;
    {
        const Domain d = Domain::unit_square(16, 16);
        const ModelParams p{0.0, 0.03, 0.2};
        const Dynamics dyn(d, p, {});
        double worst = 0.0;
        for (auto [m, n] : {std::pair{1, 1}, std::pair{3, 2}, std::pair{7, 11}, std::pair{16, 16}}) {
            SpectralField w(d);
            w(m, n) = 1.3;
            const Trajectory tr = integrate(dyn, StateView::from_vorticity(w, 0.0), {0.05, 3.0, 100, 0.5});
            const double exact = 1.3 * std::exp(-(p.nu * pi * pi * (m * m + n * n) + p.r) * 3.0);
            worst = std::max(worst, std::abs(tr.state.omega(m, n) - exact));
        }
        o.require(worst <= 1e-13, qoi("diag decay err", worst, 1e-13));
    }
    {
        const Domain d = Domain::unit_square(16, 16);
        const Dynamics dyn(d, {1.0, 0.01, 0.1}, {1.0, {{1, 2, 1.0, 0.5, 0.0}}});
        const StateView s0 = StateView::from_vorticity(random_field(d, 5, 2.0), 0.0);
        auto run = [&](double dt) { return integrate(dyn, s0, {dt, 2.0, 1000000, 0.5}).state.omega; };
        const SpectralField a = run(0.008);
        const SpectralField b = run(0.004);
        const SpectralField c = run(0.002);
        const double ratio = l2_norm(a - b) / l2_norm(b - c);
        o.require(std::abs(ratio - 8.0) <= 1.0, "self-convergence ratio " + fmt("%.3f", ratio) + " (8 +- 1)");
    }
    return o;
}

Outcome criterion9(const NonlinearOrbit& n)
{
    Outcome o;
    const FloquetEstimate f = estimate_floquet(n.picard.omega_star, n.map, 60);
    const double observed = observed_contraction(n.picard.residual_history);
    o.require(f.magnitude < 1.0, "|mu|=" + fmt("%.5f", f.magnitude) + " < 1");
    const double rel = std::abs(f.magnitude - observed) / observed;
    o.require(rel <= 0.1, qoi("rel diff vs picard " + fmt("%.5f", observed), rel, 0.1));

    const Domain d = Domain::unit_square(16, 16);
    const ModelParams p{0.0, 0.05, 0.5};
    const PeriodMap rest(Dynamics(d, p, {1.0, {}}), 0.01);
    const FloquetEstimate fr = estimate_floquet(SpectralField(d), rest, 60);
    const double expected = std::exp(-(p.r + 2 * pi * pi * p.nu) * 1.0);
    o.require(std::abs(fr.magnitude - expected) <= 1e-6, qoi("rest |mu - e^-(r+2pi^2nu)T|", std::abs(fr.magnitude - expected), 1e-6));
    return o;
}

Outcome criterion10(const fs::path& dir)
{
    Outcome o;
    const std::string base = "Lx = 1\nLy = 1\nMx = 8\nMy = 8\nbeta = 0.1\nnu = 0.05\nr = 0.5\ndt = 0.01\n";

    int rejected = 0;
    const std::vector<std::pair<std::string, std::string>> bad = {
        {base + "nu = -0.1\n", "nu"},
        {base + "gamma = 1\n", "gamma"},
        {"Lx = 1\nLy = 1\nMx = 8\nMy = 8\nbeta = 0\nnu = 0\ndt = 0.1\n", "r"},
        {base + "record_every = x\n", "record_every"},
        {base + "force = 1 1 1 0 0\n", "period"},
        {base + "dt = 0.2\n", "dt"},
    };
    for (const auto& [text, key] : bad) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            rejected += e.key() == key;
        }
    }
    o.require(rejected == static_cast<int>(bad.size()), std::to_string(rejected) + "/" + std::to_string(bad.size()) + " configs rejected with key");

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<DiagnosticsRecord> recs(100);
    for (std::size_t k = 0; k < recs.size(); ++k) {
        recs[k] = {0.01 * double(k) + 1e-9 * u(rng), std::exp(30 * u(rng)), std::exp(30 * u(rng)), std::abs(u(rng)), {}};
        if (k % 2) {
            recs[k].envelope = std::exp(u(rng));
        }
    }
    write_diagnostics(recs, dir / "d.csv");
    const auto back = read_diagnostics(dir / "d.csv");
    bool csv_exact = back.size() == recs.size();
    for (std::size_t k = 0; csv_exact && k < recs.size(); ++k) {
        csv_exact = std::bit_cast<std::uint64_t>(back[k].t) == std::bit_cast<std::uint64_t>(recs[k].t)
                    && std::bit_cast<std::uint64_t>(back[k].enstrophy) == std::bit_cast<std::uint64_t>(recs[k].enstrophy)
                    && std::bit_cast<std::uint64_t>(back[k].energy) == std::bit_cast<std::uint64_t>(recs[k].energy)
                    && back[k].forcing_norm2 == recs[k].forcing_norm2 && back[k].envelope == recs[k].envelope;
    }
    o.require(csv_exact, "csv round trip bit-exact");

    const Domain fd(1.7, 0.9, 11, 6);
    SpectralField field(fd);
    for (double& c : field.coeffs()) {
        c = u(rng) * std::exp(20 * u(rng));
    }
    write_field(field, dir / "f.qgf");
    const SpectralField loaded = read_field(dir / "f.qgf");
    bool qgf_exact = loaded.domain() == fd;
    for (std::size_t k = 0; qgf_exact && k < field.size(); ++k) {
        qgf_exact = std::bit_cast<std::uint64_t>(loaded.coeffs()[k]) == std::bit_cast<std::uint64_t>(field.coeffs()[k]);
    }
    write_field(SpectralField(Domain::unit_square(4, 4)), dir / "z.qgf");
    o.require(qgf_exact && fs::file_size(dir / "z.qgf") == 160, "checkpoint round trip bit-exact, 4x4 = 160 bytes");

    struct Case {
        const char* label;
        std::string config;
        std::string args;
        int expected;
    };
    const std::vector<Case> cases = {
        {"check-condition ok", base, "check-condition", 0},
        {"simulate", base + "t_end = 0.5\ninitial = random 1 1\n", "simulate", 0},
        {"simulate blow-up", "Lx = 1\nLy = 1\nMx = 8\nMy = 8\nbeta = 0\nnu = 0\nr = 0\ndt = 0.5\nt_end = 50\n"
                             "initial = random 3 1000\n", "simulate", 3},
        {"find-orbit no convergence", base + "period = 1\nforce = 1 1 1 0 0\nmax_iter = 1\n", "find-orbit", 4},
        {"linear-mode tolerance", "Lx = 1\nLy = 1\nMx = 8\nMy = 2\nbeta = 1\nnu = 0\nr = 0\ndt = 1\nsteps_per_period = 50\n",
         "linear-mode --tol 1e-12", 5},
        {"verify-bound", base + "t_end = 1\ninitial = random 2 1.5\nperiod = 1\nforce = 1 1 2 0 0\n", "verify-bound", 0},
        {"check-condition fails", base, "check-condition --set beta=2", 6},
        {"config error", base + "nu = -1\n", "simulate", 2},
    };
    std::string table;
    bool codes_ok = true;
    for (const Case& c : cases) {
        const CliRun r = run_cli(dir, c.config, c.args);
        codes_ok = codes_ok && r.code == c.expected;
        if (r.code != c.expected) {
            table += std::string(" ") + c.label + "->" + std::to_string(r.code);
        }
    }
    o.require(codes_ok, "exit-code table {0,2,3,4,5,6}" + table);
    return o;
}

}  // namespace

int main()
{
    const fs::path dir = scratch_dir();
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        std::printf("criterion %2d %s: %s -- %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "dispersion relation", criterion1);
    report(2, "linear basin-mode propagation", criterion2);
    report(3, "jacobian identities", criterion3);
    report(4, "poincare constant", criterion4);
    report(5, "gronwall envelope", criterion5);
    report(6, "periodic orbit, linear oracle", [&] { return criterion6(dir); });
    std::optional<NonlinearOrbit> orbit;
    report(7, "periodic orbit, nonlinear", [&] {
        orbit.emplace();
        return criterion7(*orbit);
    });
    report(8, "integrator orders", criterion8);
    report(9, "floquet consistency", [&] {
        if (!orbit) {
            orbit.emplace();
        }
        return criterion9(*orbit);
    });
    report(10, "io contracts", [&] { return criterion10(dir); });

    fs::remove_all(dir);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
