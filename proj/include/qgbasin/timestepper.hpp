#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qgbasin/dynamics.hpp"

namespace qgbasin {

struct StepConfig {
    double dt = 0.0;
    double t_end = 0.0;  ///< absolute end time
    int record_every = 10;
    double cfl_safety = 0.5;

    void validate() const;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double enstrophy = 0.0;      ///< ||omega||^2
    double energy = 0.0;         ///< 0.5 ||grad psi||^2
    double forcing_norm2 = 0.0;  ///< ||f(t)||^2
    std::optional<double> envelope;
};

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double time, std::vector<DiagnosticsRecord> partial = {});

    double time() const { return time_; }
    const std::vector<DiagnosticsRecord>& partial() const { return partial_; }

private:
    double time_;
    std::vector<DiagnosticsRecord> partial_;
};

/// Upper bound on enstrophy as a function of time elapsed since the start of a run.
using EnvelopeFn = std::function<double(double elapsed)>;

struct IntegrateOptions {
    Advection advection = Advection::nonlinear;
    EnvelopeFn envelope;
    /// Called after the initial state (step 0) and after every step.
    std::function<void(const StateView&, int step)> on_step;
};

struct Trajectory {
    StateView state;
    std::vector<DiagnosticsRecord> records;
};

/// One integrating-factor RK3 step: the diagonal decay nu k^2 + r is applied
/// exactly through exp(-(nu k^2 + r) dt), the remaining terms by Kutta's
/// third-order scheme. Throws BlowUpError on a non-finite result.
StateView step(const Dynamics& dynamics, const StateView& state, double dt,
               Advection advection = Advection::nonlinear);

/// Steps from state.t to cfg.t_end, shrinking the last step to land on t_end.
/// Records the initial state, every record_every-th step and the final state.
Trajectory integrate(const Dynamics& dynamics, StateView state, const StepConfig& cfg,
                     const IntegrateOptions& options = {});

DiagnosticsRecord diagnose(const Dynamics& dynamics, const StateView& state,
                           std::optional<double> envelope = std::nullopt);

/// Largest advectively stable step: safety * min(dx, dy) / max(|u|, |v|, c_beta)
/// with (u, v) = (-psi_y, psi_x) on the padded mesh and c_beta = beta / k_min^2
/// the long Rossby wave speed. +infinity when nothing moves.
double check_cfl(const Dynamics& dynamics, const StateView& state, double cfl_safety);

}  // namespace qgbasin
