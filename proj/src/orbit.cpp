#include "qgbasin/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qgbasin/gmres.hpp"

namespace qgbasin {

namespace {

bool within_tolerance(double residual, const SpectralField& omega, double tol)
{
    return residual <= tol * std::max(1.0, l2_norm(omega));
}

void finish(OrbitResult& result, const OrbitOptions& options)
{
    if (options.estimate && options.estimate->alpha > 0.0) {
        const double ball = options.estimate->M / options.estimate->alpha;
        result.inside_ball = norm2(result.omega_star) <= ball * (1.0 + 1e-6);
    }
}

std::vector<double> to_vector(const SpectralField& f)
{
    return {f.coeffs().begin(), f.coeffs().end()};
}

}  // namespace

PeriodMap::PeriodMap(Dynamics dynamics, double dt)
    : dynamics_(std::move(dynamics)), dt_(0.0), steps_(0)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("PeriodMap: dt must be positive");
    }
    const double period = dynamics_.forcing().period;
    steps_ = static_cast<int>(std::ceil(period / dt * (1.0 - 1e-12)));
    steps_ = std::max(steps_, 1);
    dt_ = period / steps_;
}

SpectralField PeriodMap::operator()(const SpectralField& omega0) const
{
    StepConfig cfg;
    cfg.dt = dt_;
    cfg.t_end = period();
    cfg.record_every = steps_;
    return integrate(dynamics_, StateView::from_vorticity(omega0, 0.0), cfg).state.omega;
}

void PeriodMap::run(const SpectralField& omega0, int periods,
                    const std::function<void(const StateView&, int)>& on_step) const
{
    StepConfig cfg;
    cfg.dt = dt_;
    cfg.t_end = periods * period();
    cfg.record_every = steps_;
    IntegrateOptions opts;
    opts.on_step = on_step;
    integrate(dynamics_, StateView::from_vorticity(omega0, 0.0), cfg, opts);
}

SpectralField flow_map(const SpectralField& omega0, const Dynamics& dynamics, const StepConfig& cfg)
{
    StepConfig c = cfg;
    c.t_end = dynamics.forcing().period;
    return integrate(dynamics, StateView::from_vorticity(omega0, 0.0), c).state.omega;
}

const char* to_string(OrbitMethod method)
{
    return method == OrbitMethod::picard ? "picard" : "newton_gmres";
}

OrbitResult find_orbit_picard(const SpectralField& omega0, const PeriodMap& map, const OrbitOptions& options)
{
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("find_orbit_picard: tol must be positive");
    }
    OrbitResult best(omega0);
    best.method = OrbitMethod::picard;
    best.residual = std::numeric_limits<double>::infinity();

    SpectralField omega = omega0;
    std::vector<double> history;
    for (int it = 0;; ++it) {
        SpectralField image = map(omega);
        const double residual = l2_norm(image - omega);
        history.push_back(residual);
        if (residual < best.residual) {
            best.omega_star = omega;
            best.residual = residual;
            best.iterations = it;
        }
        if (within_tolerance(residual, omega, options.tol)) {
            best.converged = true;
            break;
        }
        if (it >= options.max_iter) {
            break;
        }
        omega = std::move(image);
    }
    best.residual_history = std::move(history);
    finish(best, options);
    return best;
}

OrbitResult find_orbit_newton(const SpectralField& omega0, const PeriodMap& map, const OrbitOptions& options)
{
    if (options.krylov_dim < 1) {
        throw std::invalid_argument("find_orbit_newton: krylov_dim must be >= 1");
    }
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("find_orbit_newton: tol must be positive");
    }
    const Domain& domain = omega0.domain();
    OrbitResult result(omega0);
    result.method = OrbitMethod::newton_gmres;

    SpectralField omega = omega0;
    for (int it = 0;; ++it) {
        const SpectralField image = map(omega);
        const SpectralField f = image - omega;
        const double residual = l2_norm(f);
        result.residual_history.push_back(residual);
        result.omega_star = omega;
        result.residual = residual;
        result.iterations = it;
        if (within_tolerance(residual, omega, options.tol)) {
            result.converged = true;
            break;
        }
        if (it >= options.max_iter) {
            break;
        }

        const double omega_norm = l2_norm(omega);
        const LinearOperator jv = [&](const std::vector<double>& v) {
            const SpectralField dir(domain, v);
            const double v_norm = l2_norm(dir);
            if (v_norm == 0.0) {
                return std::vector<double>(v.size(), 0.0);
            }
            const double h = options.fd_step * (omega_norm > 0.0 ? omega_norm : 1.0) / v_norm;
            SpectralField shifted = omega;
            shifted.axpy(h, dir);
            SpectralField out = map(shifted);
            out -= image;
            out *= 1.0 / h;
            out -= dir;
            return to_vector(out);
        };
        std::vector<double> rhs = to_vector(f);
        for (double& x : rhs) {
            x = -x;
        }
        const GmresResult solve = gmres(jv, rhs, options.krylov_dim,
                                        options.krylov_dim * options.krylov_restarts, options.gmres_tol);
        if (solve.converged) {
            omega.axpy(1.0, SpectralField(domain, solve.x));
        } else {
            result.picard_fallback = true;
            omega = image;
        }
    }
    finish(result, options);
    return result;
}

FloquetEstimate estimate_floquet(const SpectralField& omega_star, const PeriodMap& map, int power_iters,
                                 double fd_step, double rel_tol, std::uint64_t seed)
{
    if (power_iters < 1) {
        throw std::invalid_argument("estimate_floquet: power_iters must be >= 1");
    }
    const Domain& domain = omega_star.domain();
    const SpectralField base = map(omega_star);
    const double star_norm = l2_norm(omega_star);
    const double h = fd_step * (star_norm > 0.0 ? star_norm : 1.0);

    SpectralField v = random_field(domain, seed, 1.0);
    FloquetEstimate est;
    double previous = -1.0;
    for (int k = 0; k < power_iters; ++k) {
        SpectralField shifted = omega_star;
        shifted.axpy(h, v);
        SpectralField w = map(shifted);
        w -= base;
        w *= 1.0 / h;
        const double mu = l2_norm(w);
        est.magnitude = mu;
        est.iterations = k + 1;
        if (mu == 0.0) {
            est.converged = true;
            break;
        }
        if (previous >= 0.0 && std::abs(mu - previous) <= rel_tol * mu) {
            est.converged = true;
            break;
        }
        previous = mu;
        v = std::move(w);
        v *= 1.0 / mu;
    }
    return est;
}

double observed_contraction(const std::vector<double>& residuals, int count)
{
    if (count < 1 || residuals.size() < static_cast<std::size_t>(count) + 1) {
        throw std::invalid_argument("observed_contraction: not enough residuals");
    }
    const double last = residuals.back();
    const double first = residuals[residuals.size() - 1 - count];
    return std::pow(last / first, 1.0 / count);
}

double periodicity_defect(const SpectralField& omega_star, const PeriodMap& map, int samples)
{
    const int n = map.steps();
    std::vector<int> phases;
    for (int s = 0; s < samples; ++s) {
        phases.push_back(static_cast<int>(std::lround(static_cast<double>(s) * n / samples)));
    }
    std::vector<std::optional<SpectralField>> first(phases.size());
    double defect = 0.0;
    map.run(omega_star, 2, [&](const StateView& state, int step) {
        for (std::size_t p = 0; p < phases.size(); ++p) {
            if (step == phases[p]) {
                first[p] = state.omega;
            } else if (step == phases[p] + n && first[p]) {
                defect = std::max(defect, l2_norm(state.omega - *first[p]));
            }
        }
    });
    return defect;
}

ModeHarmonics mode_harmonics(const SpectralField& omega_star, const PeriodMap& map, int m, int n)
{
    const int steps = map.steps();
    const double w = 2.0 * std::numbers::pi / map.period();
    ModeHarmonics h;
    map.run(omega_star, 1, [&](const StateView& state, int step) {
        if (step >= steps) {
            return;
        }
        const double a = state.omega(m, n);
        h.mean += a;
        h.cos_coeff += a * std::cos(w * state.t);
        h.sin_coeff += a * std::sin(w * state.t);
    });
    h.mean /= steps;
    h.cos_coeff *= 2.0 / steps;
    h.sin_coeff *= 2.0 / steps;
    h.amplitude = std::hypot(h.cos_coeff, h.sin_coeff);
    return h;
}

}  // namespace qgbasin
