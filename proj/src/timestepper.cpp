#include "qgbasin/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qgbasin {

void StepConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("StepConfig: dt must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("StepConfig: t_end must be >= 0");
    }
    if (record_every < 1) {
        throw std::invalid_argument("StepConfig: record_every must be >= 1");
    }
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) {
        throw std::invalid_argument("StepConfig: cfl_safety must lie in (0, 1]");
    }
}

BlowUpError::BlowUpError(double time, std::vector<DiagnosticsRecord> partial)
    : std::runtime_error("non-finite vorticity at t = " + std::to_string(time)),
      time_(time), partial_(std::move(partial))
{
}

namespace {

// field <- exp(-lambda h) * field, mode by mode
void decay(const Dynamics& dynamics, SpectralField& field, double h)
{
    const Domain& d = dynamics.domain();
    for (int m = 1; m <= d.mx(); ++m) {
        for (int n = 1; n <= d.my(); ++n) {
            field(m, n) *= std::exp(-dynamics.dissipation_rate(m, n) * h);
        }
    }
}

}  // namespace

StateView step(const Dynamics& dynamics, const StateView& state, double dt, Advection advection)
{
    const double t = state.t;
    const SpectralField n1 = dynamics.explicit_part(state, advection);

    SpectralField w2 = state.omega;
    w2.axpy(0.5 * dt, n1);
    decay(dynamics, w2, 0.5 * dt);
    const SpectralField n2 = dynamics.explicit_part(StateView::from_vorticity(w2, t + 0.5 * dt), advection);

    SpectralField half_n2 = n2;
    decay(dynamics, half_n2, 0.5 * dt);  // E(h/2) N2

    SpectralField w3 = state.omega;
    w3.axpy(-dt, n1);
    decay(dynamics, w3, dt);
    w3.axpy(2.0 * dt, half_n2);
    const SpectralField n3 = dynamics.explicit_part(StateView::from_vorticity(w3, t + dt), advection);

    SpectralField next = state.omega;
    next.axpy(dt / 6.0, n1);
    decay(dynamics, next, dt);
    next.axpy(4.0 * dt / 6.0, half_n2);
    next.axpy(dt / 6.0, n3);

    if (!next.all_finite()) {
        throw BlowUpError(t + dt);
    }
    return StateView::from_vorticity(std::move(next), t + dt);
}

DiagnosticsRecord diagnose(const Dynamics& dynamics, const StateView& state, std::optional<double> envelope)
{
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.enstrophy = norm2(state.omega);
    rec.energy = 0.5 * grad_norm2(state.psi);
    rec.forcing_norm2 = norm2(forcing_at(dynamics.forcing(), dynamics.domain(), state.t));
    rec.envelope = envelope;
    return rec;
}

Trajectory integrate(const Dynamics& dynamics, StateView state, const StepConfig& cfg,
                     const IntegrateOptions& options)
{
    cfg.validate();
    const double t0 = state.t;
    auto record = [&](const StateView& s) {
        std::optional<double> bound;
        if (options.envelope) {
            bound = options.envelope(s.t - t0);
        }
        return diagnose(dynamics, s, bound);
    };

    std::vector<DiagnosticsRecord> records;
    records.push_back(record(state));
    if (options.on_step) {
        options.on_step(state, 0);
    }

    const double span = cfg.t_end - t0;
    if (span <= 0.0) {
        return Trajectory{std::move(state), std::move(records)};
    }
    // A relative slack keeps roundoff in span / dt from adding a sliver step.
    const auto steps = static_cast<long>(std::ceil(span / cfg.dt * (1.0 - 1e-12)));
    for (long k = 0; k < steps; ++k) {
        const bool last = (k + 1 == steps);
        const double t_next = last ? cfg.t_end : t0 + static_cast<double>(k + 1) * cfg.dt;
        const double h = t_next - state.t;
        try {
            state = step(dynamics, state, h, options.advection);
        } catch (const BlowUpError& e) {
            throw BlowUpError(e.time(), std::move(records));
        }
        state.t = t_next;
        if (last || (k + 1) % cfg.record_every == 0) {
            records.push_back(record(state));
        }
        if (options.on_step) {
            options.on_step(state, static_cast<int>(k + 1));
        }
    }
    return Trajectory{std::move(state), std::move(records)};
}

double check_cfl(const Dynamics& dynamics, const StateView& state, double cfl_safety)
{
    const Domain& d = dynamics.domain();
    const double u_max = dynamics.transform().dy(state.psi).max_abs();
    const double v_max = dynamics.transform().dx(state.psi).max_abs();
    const double k_min2 = d.wavenumber2(1, 1);
    const double c_beta = dynamics.params().beta / k_min2;
    const double speed = std::max({u_max, v_max, c_beta});
    if (speed == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return cfl_safety * std::min(d.grid_dx(), d.grid_dy()) / speed;
}

}  // namespace qgbasin
