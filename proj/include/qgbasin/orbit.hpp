#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qgbasin/dynamics.hpp"
#include "qgbasin/spectral_field.hpp"
#include "qgbasin/theory.hpp"
#include "qgbasin/timestepper.hpp"

namespace qgbasin {

/// The period-T flow map of the forced dynamics, anchored at forcing phase t = 0.
/// Steps are uniform: the requested dt is shrunk to T / ceil(T / dt).
class PeriodMap {
public:
    PeriodMap(Dynamics dynamics, double dt);

    const Dynamics& dynamics() const { return dynamics_; }
    double period() const { return dynamics_.forcing().period; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }

    SpectralField operator()(const SpectralField& omega0) const;

    /// Integrates `periods` periods from omega0 at t = 0, calling on_step after
    /// every step (and once for the initial state with step = 0).
    void run(const SpectralField& omega0, int periods,
             const std::function<void(const StateView&, int step)>& on_step) const;

private:
    Dynamics dynamics_;
    double dt_;
    int steps_;
};

/// Phi_T(omega0) via integrate.
SpectralField flow_map(const SpectralField& omega0, const Dynamics& dynamics, const StepConfig& cfg);

enum class OrbitMethod { picard, newton_gmres };

const char* to_string(OrbitMethod method);

struct OrbitOptions {
    double tol = 1e-8;
    int max_iter = 200;
    int krylov_dim = 20;
    int krylov_restarts = 3;
    double gmres_tol = 1e-3;
    double fd_step = 1e-6;
    /// When armed (alpha > 0) the result reports whether omega* lies in the absorbing ball.
    std::optional<DissipativityEstimate> estimate;
};

struct OrbitResult {
    explicit OrbitResult(SpectralField omega) : omega_star(std::move(omega)) {}

    SpectralField omega_star;
    double residual = 0.0;  ///< ||Phi_T(omega*) - omega*||
    int iterations = 0;
    OrbitMethod method = OrbitMethod::picard;
    bool converged = false;
    std::optional<double> floquet_magnitude;
    std::optional<bool> inside_ball;
    /// Newton only: a Krylov solve stagnated and a Picard step was taken instead.
    bool picard_fallback = false;
    /// Residual at every evaluated iterate, in order.
    std::vector<double> residual_history;
};

/// omega <- Phi_T(omega) until ||Phi_T(omega) - omega|| <= tol max(1, ||omega||).
/// Returns the best iterate with converged = false when max_iter runs out.
OrbitResult find_orbit_picard(const SpectralField& omega0, const PeriodMap& map, const OrbitOptions& options);

/// Newton on F(omega) = Phi_T(omega) - omega with finite-difference Jacobian-vector
/// products and restarted GMRES solves.
OrbitResult find_orbit_newton(const SpectralField& omega0, const PeriodMap& map, const OrbitOptions& options);

struct FloquetEstimate {
    double magnitude = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Dominant |mu| of D Phi_T at omega* by power iteration on finite-difference
/// directional derivatives.
FloquetEstimate estimate_floquet(const SpectralField& omega_star, const PeriodMap& map, int power_iters,
                                 double fd_step = 1e-6, double rel_tol = 1e-10, std::uint64_t seed = 7);

/// Geometric mean of the last `count` successive residual ratios.
double observed_contraction(const std::vector<double>& residuals, int count = 3);

/// max over `samples` phases of ||omega(t + T) - omega(t)|| along the trajectory from omega*.
double periodicity_defect(const SpectralField& omega_star, const PeriodMap& map, int samples = 16);

struct ModeHarmonics {
    double mean = 0.0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
    double amplitude = 0.0;
};

/// First-harmonic content of coefficient (m, n) over one period of the orbit,
/// from the uniformly spaced step values.
ModeHarmonics mode_harmonics(const SpectralField& omega_star, const PeriodMap& map, int m, int n);

}  // namespace qgbasin
