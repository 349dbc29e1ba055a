#include "qgbasin/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qgbasin {

void ModelParams::validate() const
{
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument(std::string("ModelParams: ") + name + " must be finite and >= 0");
        }
    };
    check(beta, "beta");
    check(nu, "nu");
    check(r, "r");
}

double ForcingSpec::angular_frequency() const
{
    return 2.0 * std::numbers::pi / period;
}

void ForcingSpec::validate(const Domain& domain) const
{
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw std::invalid_argument("ForcingSpec: period must be positive and finite");
    }
    for (const ForcingTerm& term : terms) {
        if (term.m < 1 || term.m > domain.mx() || term.n < 1 || term.n > domain.my()) {
            throw std::invalid_argument("ForcingSpec: mode (" + std::to_string(term.m) + ", "
                                        + std::to_string(term.n) + ") outside the truncation");
        }
        if (!std::isfinite(term.a_cos) || !std::isfinite(term.a_sin) || !std::isfinite(term.a_const)) {
            throw std::invalid_argument("ForcingSpec: non-finite amplitude");
        }
    }
}

SpectralField forcing_at(const ForcingSpec& spec, const Domain& domain, double t)
{
    spec.validate(domain);
    // Reduce the phase first so t and t + T give bit-identical fields.
    const double phase = 2.0 * std::numbers::pi * (t / spec.period - std::floor(t / spec.period));
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    SpectralField f(domain);
    for (const ForcingTerm& term : spec.terms) {
        f(term.m, term.n) += term.a_cos * c + term.a_sin * s + term.a_const;
    }
    return f;
}

StateView StateView::from_vorticity(SpectralField omega, double t)
{
    SpectralField psi = invert_laplacian(omega);
    return StateView{std::move(omega), std::move(psi), t};
}

BetaCoupling::BetaCoupling(const Domain& domain)
    : domain_(domain), size_(domain.mx()), matrix_(static_cast<std::size_t>(size_) * size_, 0.0)
{
    // (2 / Lx) int_0^Lx cos(m pi x / Lx) sin(k pi x / Lx) dx = 4 k / (pi (k^2 - m^2)) for k + m odd.
    for (int k = 1; k <= size_; ++k) {
        for (int m = 1; m <= size_; ++m) {
            if ((k + m) % 2 == 0) {
                continue;
            }
            const double projection = 4.0 * k / (std::numbers::pi * static_cast<double>(k * k - m * m));
            matrix_[static_cast<std::size_t>(k - 1) * size_ + (m - 1)] = domain.kx(m) * projection;
        }
    }
}

SpectralField BetaCoupling::apply(const SpectralField& psi, double beta) const
{
    require_same_domain(domain_, psi.domain(), "beta_term");
    const int my = domain_.my();
    SpectralField out(domain_);
    if (beta == 0.0) {
        return out;
    }
    const auto in = psi.coeffs();
    auto res = out.coeffs();
    for (int k = 1; k <= size_; ++k) {
        double* row_out = res.data() + static_cast<std::size_t>(k - 1) * my;
        const double* row_b = matrix_.data() + static_cast<std::size_t>(k - 1) * size_;
        for (int m = 1; m <= size_; ++m) {
            const double b = row_b[m - 1];
            if (b == 0.0) {
                continue;
            }
            const double* row_in = in.data() + static_cast<std::size_t>(m - 1) * my;
            for (int n = 0; n < my; ++n) {
                row_out[n] += b * row_in[n];
            }
        }
    }
    out *= beta;
    return out;
}

GridField jacobian_on_grid(const SineTransform& transform, const SpectralField& psi,
                           const SpectralField& omega)
{
    require_same_domain(psi.domain(), omega.domain(), "jacobian");
    const GridField psi_x = transform.dx(psi);
    const GridField psi_y = transform.dy(psi);
    const GridField omega_x = transform.dx(omega);
    const GridField omega_y = transform.dy(omega);
    GridField j(transform.domain());
    auto out = j.values();
    const auto px = psi_x.values();
    const auto py = psi_y.values();
    const auto ox = omega_x.values();
    const auto oy = omega_y.values();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = px[k] * oy[k] - py[k] * ox[k];
    }
    return j;
}

SpectralField jacobian(const SineTransform& transform, const SpectralField& psi,
                       const SpectralField& omega)
{
    return transform.from_grid(jacobian_on_grid(transform, psi, omega));
}

SpectralField beta_term(const BetaCoupling& coupling, const SpectralField& psi, double beta)
{
    return coupling.apply(psi, beta);
}

Dynamics::Dynamics(const Domain& domain, const ModelParams& params, ForcingSpec forcing)
    : domain_(domain), params_(params), forcing_(std::move(forcing)), transform_(domain), coupling_(domain)
{
    params_.validate();
    forcing_.validate(domain_);
}

SpectralField Dynamics::explicit_part(const StateView& state, Advection advection) const
{
    SpectralField out = forcing_at(forcing_, domain_, state.t);
    out.axpy(-1.0, coupling_.apply(state.psi, params_.beta));
    if (advection == Advection::nonlinear) {
        out.axpy(-1.0, jacobian(transform_, state.psi, state.omega));
    }
    return out;
}

SpectralField Dynamics::tendency(const StateView& state, Advection advection) const
{
    SpectralField out = explicit_part(state, advection);
    for (int m = 1; m <= domain_.mx(); ++m) {
        for (int n = 1; n <= domain_.my(); ++n) {
            out(m, n) -= dissipation_rate(m, n) * state.omega(m, n);
        }
    }
    return out;
}

SpectralField Dynamics::tendency(const StateView& state) const
{
    return tendency(state, Advection::nonlinear);
}

SpectralField Dynamics::linear_tendency(const StateView& state) const
{
    return tendency(state, Advection::linearized);
}

}  // namespace qgbasin
