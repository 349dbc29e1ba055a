#pragma once

#include <vector>

#include "qgbasin/domain.hpp"
#include "qgbasin/sine_transform.hpp"
#include "qgbasin/spectral_field.hpp"

namespace qgbasin {

/// Physical constants of the vorticity equation. Zeros are accepted here so the
/// inviscid linear basin modes can be reproduced.
struct ModelParams {
    double beta = 0.0;  ///< meridional gradient of the Coriolis parameter
    double nu = 0.0;    ///< viscosity
    double r = 0.0;     ///< Ekman drag

    void validate() const;
};

/// One spatial mode of the wind forcing with first-harmonic time dependence:
/// [a_cos cos(2 pi t / T) + a_sin sin(2 pi t / T) + a_const] sin(m pi x / Lx) sin(n pi y / Ly).
struct ForcingTerm {
    int m = 1;
    int n = 1;
    double a_cos = 0.0;
    double a_sin = 0.0;
    double a_const = 0.0;
};

struct ForcingSpec {
    double period = 1.0;
    std::vector<ForcingTerm> terms;

    double angular_frequency() const;
    /// Throws if T <= 0, a coefficient is non-finite, or a mode is outside the truncation.
    void validate(const Domain& domain) const;
};

SpectralField forcing_at(const ForcingSpec& spec, const Domain& domain, double t);

/// Prognostic vorticity with its diagnosed stream function.
struct StateView {
    SpectralField omega;
    SpectralField psi;
    double t = 0.0;

    static StateView from_vorticity(SpectralField omega, double t);
};

enum class Advection { nonlinear, linearized };

/// Galerkin matrix of d/dx on the x sine basis: entry (k, m) is the sin(k pi x / Lx)
/// coefficient of d/dx sin(m pi x / Lx). Couples only modes of opposite parity.
class BetaCoupling {
public:
    explicit BetaCoupling(const Domain& domain);

    const Domain& domain() const { return domain_; }
    /// 1-based row k, column m.
    double operator()(int k, int m) const { return matrix_[static_cast<std::size_t>(k - 1) * size_ + (m - 1)]; }

    /// Projection of beta * psi_x onto the sine basis.
    SpectralField apply(const SpectralField& psi, double beta) const;

private:
    Domain domain_;
    int size_;
    std::vector<double> matrix_;
};

/// Jacobian psi_x omega_y - psi_y omega_x on the padded mesh, before projection.
GridField jacobian_on_grid(const SineTransform& transform, const SpectralField& psi,
                           const SpectralField& omega);
SpectralField jacobian(const SineTransform& transform, const SpectralField& psi,
                       const SpectralField& omega);
SpectralField beta_term(const BetaCoupling& coupling, const SpectralField& psi, double beta);

/// Right-hand side of omega_t + J(psi, omega) + beta psi_x = nu lap(omega) - r omega + f.
class Dynamics {
public:
    Dynamics(const Domain& domain, const ModelParams& params, ForcingSpec forcing);

    const Domain& domain() const { return domain_; }
    const ModelParams& params() const { return params_; }
    const ForcingSpec& forcing() const { return forcing_; }
    const SineTransform& transform() const { return transform_; }
    const BetaCoupling& coupling() const { return coupling_; }

    SpectralField tendency(const StateView& state) const;
    /// tendency without the Jacobian.
    SpectralField linear_tendency(const StateView& state) const;
    SpectralField tendency(const StateView& state, Advection advection) const;

    /// Everything except the diagonal dissipation: -J(psi, omega) - beta psi_x + f.
    SpectralField explicit_part(const StateView& state, Advection advection) const;

    /// nu k^2 + r for mode (m, n); the diagonal decay rate.
    double dissipation_rate(int m, int n) const { return params_.nu * domain_.wavenumber2(m, n) + params_.r; }

private:
    Domain domain_;
    ModelParams params_;
    ForcingSpec forcing_;
    SineTransform transform_;
    BetaCoupling coupling_;
};

}  // namespace qgbasin
