#include "qgbasin/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>

#include "qgbasin/errors.hpp"

namespace qgbasin {

namespace {

constexpr double pi = std::numbers::pi;

void require_unit_square(const Domain& domain, const char* what)
{
    if (!domain.is_unit_square()) {
        throw UnsupportedDomain(std::string(what) + ": basin modes are defined on the unit square only");
    }
}

// Per-mode amplitudes a cos + b sin + c collected from the term list.
struct ModeAmplitude {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

// q(theta) = p0 + p1 cos + p2 sin + p3 cos 2 theta + p4 sin 2 theta
struct TrigQuadratic {
    double p[5] = {0, 0, 0, 0, 0};

    double value(double th) const
    {
        return p[0] + p[1] * std::cos(th) + p[2] * std::sin(th) + p[3] * std::cos(2 * th) + p[4] * std::sin(2 * th);
    }
    double d1(double th) const
    {
        return -p[1] * std::sin(th) + p[2] * std::cos(th) - 2 * p[3] * std::sin(2 * th) + 2 * p[4] * std::cos(2 * th);
    }
    double d2(double th) const
    {
        return -p[1] * std::cos(th) - p[2] * std::sin(th) - 4 * p[3] * std::cos(2 * th) - 4 * p[4] * std::sin(2 * th);
    }
};

// int_0^1 cos(a x + phi) dx
double cos_integral(double a, double phi)
{
    if (std::abs(a) < 1e-6) {
        return std::cos(phi) - 0.5 * a * std::sin(phi) - a * a / 6.0 * std::cos(phi);
    }
    return (std::sin(a + phi) - std::sin(phi)) / a;
}

}  // namespace

ConditionCheck check_condition(const ModelParams& params, const Domain& domain)
{
    const double area = domain.area();
    ConditionCheck c;
    c.lhs = params.r + pi * params.nu / area;
    c.rhs = 0.5 * params.beta * (area / pi + 1.0);
    c.margin = c.lhs - c.rhs;
    c.satisfied = c.lhs > c.rhs;
    return c;
}

double forcing_sup_norm2(const ForcingSpec& spec, const Domain& domain)
{
    spec.validate(domain);
    std::map<std::pair<int, int>, ModeAmplitude> modes;
    for (const ForcingTerm& t : spec.terms) {
        ModeAmplitude& a = modes[{t.m, t.n}];
        a.a += t.a_cos;
        a.b += t.a_sin;
        a.c += t.a_const;
    }
    const double weight = 0.25 * domain.area();
    if (modes.empty()) {
        return 0.0;
    }
    if (modes.size() == 1) {
        const ModeAmplitude& a = modes.begin()->second;
        const double peak = std::hypot(a.a, a.b) + std::abs(a.c);
        return weight * peak * peak;
    }

    // (a c + b s + c0)^2 = (a^2 + b^2) / 2 + c0^2 + 2 a c0 cos + 2 b c0 sin
    //                      + (a^2 - b^2) / 2 cos 2th + a b sin 2th
    TrigQuadratic q;
    for (const auto& [key, a] : modes) {
        q.p[0] += weight * (0.5 * (a.a * a.a + a.b * a.b) + a.c * a.c);
        q.p[1] += weight * 2.0 * a.a * a.c;
        q.p[2] += weight * 2.0 * a.b * a.c;
        q.p[3] += weight * 0.5 * (a.a * a.a - a.b * a.b);
        q.p[4] += weight * a.a * a.b;
    }
    constexpr int samples = 720;
    std::vector<double> vals(samples);
    for (int k = 0; k < samples; ++k) {
        vals[k] = q.value(2.0 * pi * k / samples);
    }
    double best = *std::max_element(vals.begin(), vals.end());
    for (int k = 0; k < samples; ++k) {
        const double prev = vals[(k + samples - 1) % samples];
        const double next = vals[(k + 1) % samples];
        if (vals[k] < prev || vals[k] < next) {
            continue;
        }
        double th = 2.0 * pi * k / samples;
        for (int it = 0; it < 50; ++it) {
            const double h = q.d2(th);
            if (h >= 0.0) {
                break;
            }
            const double delta = q.d1(th) / h;
            th -= delta;
            if (std::abs(delta) < 1e-15) {
                break;
            }
        }
        best = std::max(best, q.value(th));
    }
    return best;
}

DissipativityEstimate make_estimate(const ModelParams& params, const Domain& domain,
                                    const ForcingSpec& spec, double epsilon)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("make_estimate: epsilon must be positive");
    }
    const ConditionCheck cond = check_condition(params, domain);
    DissipativityEstimate est;
    est.epsilon = epsilon;
    est.satisfied = cond.satisfied;
    est.alpha = cond.margin - epsilon;
    est.sup_forcing_norm2 = forcing_sup_norm2(spec, domain);
    est.M = est.sup_forcing_norm2 / epsilon;
    if (cond.satisfied && est.alpha <= 0.0) {
        throw EpsilonTooLarge("make_estimate: epsilon = " + std::to_string(epsilon)
                              + " is not below the margin " + std::to_string(cond.margin));
    }
    if (est.alpha > 0.0) {
        est.absorbing_radius2 = est.M / est.alpha;
    }
    return est;
}

DissipativityEstimate make_estimate(const ModelParams& params, const Domain& domain, const ForcingSpec& spec)
{
    const ConditionCheck cond = check_condition(params, domain);
    if (!cond.satisfied) {
        throw ConditionViolated("make_estimate: dissipativity condition fails (margin "
                                + std::to_string(cond.margin) + ")");
    }
    return make_estimate(params, domain, spec, 0.5 * cond.margin);
}

double gronwall_envelope(const DissipativityEstimate& est, double e0, double t)
{
    if (!(est.alpha > 0.0)) {
        throw std::domain_error("gronwall_envelope: alpha must be positive");
    }
    const double floor = est.M / est.alpha;
    return (e0 - floor) * std::exp(-2.0 * est.alpha * t) + floor;
}

EnvelopeFn make_envelope(const DissipativityEstimate& est, double e0)
{
    gronwall_envelope(est, e0, 0.0);  // validates alpha
    return [est, e0](double t) { return gronwall_envelope(est, e0, t); };
}

EnvelopeReport verify_envelope(const std::vector<DiagnosticsRecord>& records,
                               const DissipativityEstimate& est, double e0)
{
    EnvelopeReport report;
    report.tolerance = 1e-8 * std::max(e0, 1.0);
    report.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < records.size(); ++k) {
        const double elapsed = records[k].t - records.front().t;
        const double excess = records[k].enstrophy - gronwall_envelope(est, e0, elapsed);
        if (excess > report.max_excess) {
            report.max_excess = excess;
            report.worst_index = k;
        }
    }
    if (records.empty()) {
        report.max_excess = 0.0;
    }
    report.pass = report.max_excess <= report.tolerance;
    return report;
}

double rayleigh_quotient(const SpectralField& f)
{
    return grad_norm2(f) / norm2(f);
}

PoincareReport poincare_scan(const Domain& domain)
{
    PoincareReport report;
    report.poincare_bound = pi / domain.area();
    report.min_rayleigh = std::numeric_limits<double>::infinity();
    SpectralField probe(domain);
    for (int m = 1; m <= domain.mx(); ++m) {
        for (int n = 1; n <= domain.my(); ++n) {
            probe(m, n) = 1.0;
            report.min_rayleigh = std::min(report.min_rayleigh, rayleigh_quotient(probe));
            probe(m, n) = 0.0;
        }
    }
    report.sharp_constant = pi * pi * (1.0 / (domain.lx() * domain.lx()) + 1.0 / (domain.ly() * domain.ly()));
    report.holds = report.min_rayleigh >= report.poincare_bound;
    return report;
}

LinearMode dispersion(int m, int n, double beta, const Domain& domain)
{
    require_unit_square(domain, "dispersion");
    if (m < 1 || n < 1) {
        throw std::invalid_argument("dispersion: mode indices must be >= 1");
    }
    if (!(beta > 0.0)) {
        throw std::invalid_argument("dispersion: beta must be positive");
    }
    LinearMode mode;
    mode.m = m;
    mode.n = n;
    mode.beta = beta;
    const double root = std::sqrt(static_cast<double>(m * m + n * n));
    mode.sigma = -beta / (2.0 * pi * root);
    mode.period = 2.0 * pi / std::abs(mode.sigma);
    mode.carrier_wavenumber = beta / (2.0 * mode.sigma);
    return mode;
}

double linear_mode_value(const LinearMode& mode, double x, double y, double t)
{
    return std::cos(mode.carrier_wavenumber * x + mode.sigma * t) * std::sin(mode.m * pi * x)
           * std::sin(mode.n * pi * y);
}

SpectralField linear_mode_field(const LinearMode& mode, double t, const Domain& domain)
{
    require_unit_square(domain, "linear_mode_field");
    if (mode.n > domain.my()) {
        throw std::invalid_argument("linear_mode_field: mode n outside the truncation");
    }
    const double k = mode.carrier_wavenumber;
    const double phi = mode.sigma * t;
    // int_0^1 cos(k x + phi) cos(q x) dx
    auto g = [&](double q) { return 0.5 * (cos_integral(k + q, phi) + cos_integral(k - q, phi)); };
    SpectralField f(domain);
    for (int p = 1; p <= domain.mx(); ++p) {
        // 2 int cos(kx + phi) sin(m pi x) sin(p pi x) dx
        f(p, mode.n) = g((mode.m - p) * pi) - g((mode.m + p) * pi);
    }
    return f;
}

double ForcedResponse::amplitude() const
{
    return std::hypot(cos_coeff, sin_coeff);
}

double ForcedResponse::operator()(double t) const
{
    return cos_coeff * std::cos(frequency * t) + sin_coeff * std::sin(frequency * t) + mean;
}

SpectralField ForcedResponse::field_at(double t, const Domain& domain) const
{
    SpectralField f(domain);
    f(m, n) = (*this)(t);
    return f;
}

ForcedResponse linear_forced_response(const ModelParams& params, const ForcingSpec& spec, const Domain& domain)
{
    if (params.beta != 0.0) {
        throw std::invalid_argument("linear_forced_response: requires beta = 0");
    }
    if (spec.terms.size() != 1) {
        throw std::invalid_argument("linear_forced_response: requires exactly one forcing term");
    }
    spec.validate(domain);
    const ForcingTerm& term = spec.terms.front();
    ForcedResponse resp;
    resp.m = term.m;
    resp.n = term.n;
    resp.lambda = params.nu * domain.wavenumber2(term.m, term.n) + params.r;
    if (!(resp.lambda > 0.0)) {
        throw std::invalid_argument("linear_forced_response: decay rate nu k^2 + r must be positive");
    }
    resp.frequency = spec.angular_frequency();
    const double lam = resp.lambda;
    const double w = resp.frequency;
    const double den = lam * lam + w * w;
    resp.cos_coeff = (lam * term.a_cos - w * term.a_sin) / den;
    resp.sin_coeff = (w * term.a_cos + lam * term.a_sin) / den;
    resp.mean = term.a_const / lam;
    return resp;
}

}  // namespace qgbasin
