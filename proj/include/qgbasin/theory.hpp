#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qgbasin/domain.hpp"
#include "qgbasin/dynamics.hpp"
#include "qgbasin/spectral_field.hpp"
#include "qgbasin/timestepper.hpp"

namespace qgbasin {

// ---------------------------------------------------------------------------
// Dissipativity

/// r + pi nu / |D| > beta (|D| / pi + 1) / 2
struct ConditionCheck {
    bool satisfied = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  ///< lhs - rhs
};

ConditionCheck check_condition(const ModelParams& params, const Domain& domain);

/// sup over one period of ||f(., ., t)||^2. Closed form for a single term;
/// for several terms the quadratic trigonometric polynomial is sampled at 720
/// phases and each local maximum refined by Newton's method.
double forcing_sup_norm2(const ForcingSpec& spec, const Domain& domain);

struct DissipativityEstimate {
    double epsilon = 0.0;
    double alpha = 0.0;  ///< r + pi nu / |D| - beta (|D| / pi + 1) / 2 - epsilon
    double sup_forcing_norm2 = 0.0;
    double M = 0.0;      ///< sup_t ||f||^2 / epsilon
    std::optional<double> absorbing_radius2;  ///< M / alpha, only when alpha > 0
    bool satisfied = false;
};

/// Condition holds but epsilon leaves alpha <= 0.
class EpsilonTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Condition fails, so no positive epsilon gives alpha > 0.
class ConditionViolated : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

DissipativityEstimate make_estimate(const ModelParams& params, const Domain& domain,
                                    const ForcingSpec& spec, double epsilon);
/// Uses epsilon = margin / 2. Throws ConditionViolated when the margin is not positive.
DissipativityEstimate make_estimate(const ModelParams& params, const Domain& domain,
                                    const ForcingSpec& spec);

/// (E0 - M / alpha) exp(-2 alpha t) + M / alpha
double gronwall_envelope(const DissipativityEstimate& est, double e0, double t);
EnvelopeFn make_envelope(const DissipativityEstimate& est, double e0);

struct EnvelopeReport {
    double max_excess = 0.0;  ///< max over records of enstrophy - envelope(t)
    double tolerance = 0.0;
    std::size_t worst_index = 0;
    bool pass = false;
};

/// Envelope time is measured from the first record.
EnvelopeReport verify_envelope(const std::vector<DiagnosticsRecord>& records,
                               const DissipativityEstimate& est, double e0);

// ---------------------------------------------------------------------------
// Poincare inequality

struct PoincareReport {
    double poincare_bound = 0.0;  ///< pi / |D|
    double min_rayleigh = 0.0;    ///< min over retained modes of grad_norm2 / norm2
    double sharp_constant = 0.0;  ///< pi^2 (1 / Lx^2 + 1 / Ly^2)
    bool holds = false;
};

double rayleigh_quotient(const SpectralField& f);
/// Exhaustive scan of single-mode Rayleigh quotients; any field's quotient is a
/// weighted mean of these, so the scan minimum bounds every field.
PoincareReport poincare_scan(const Domain& domain);

// ---------------------------------------------------------------------------
// Linear basin modes on the unit square

struct LinearMode {
    int m = 1;
    int n = 1;
    double beta = 0.0;
    double sigma = 0.0;               ///< -beta / (2 pi sqrt(m^2 + n^2))
    double period = 0.0;              ///< 2 pi / |sigma|
    double carrier_wavenumber = 0.0;  ///< beta / (2 sigma)
};

LinearMode dispersion(int m, int n, double beta, const Domain& domain);

/// cos(k x + sigma t) sin(m pi x) sin(n pi y) at a point.
double linear_mode_value(const LinearMode& mode, double x, double y, double t);
/// Exact Galerkin projection of the mode's stream function at time t.
SpectralField linear_mode_field(const LinearMode& mode, double t, const Domain& domain);

// ---------------------------------------------------------------------------
// Forced response without beta

/// The T-periodic solution of d(omega_mn)/dt = -lambda omega_mn + a_cos cos(W t)
/// + a_sin sin(W t) + a_const, lambda = nu k^2 + r, W = 2 pi / T.
struct ForcedResponse {
    int m = 1;
    int n = 1;
    double lambda = 0.0;
    double frequency = 0.0;
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
    double mean = 0.0;

    /// Magnitude of the first harmonic.
    double amplitude() const;
    double operator()(double t) const;
    SpectralField field_at(double t, const Domain& domain) const;
};

/// Requires beta == 0 and a single forcing term.
ForcedResponse linear_forced_response(const ModelParams& params, const ForcingSpec& spec,
                                      const Domain& domain);

}  // namespace qgbasin
