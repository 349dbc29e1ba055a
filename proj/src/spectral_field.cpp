#include "qgbasin/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qgbasin/errors.hpp"

namespace qgbasin {

SpectralField::SpectralField(const Domain& domain)
    : domain_(domain), coeffs_(static_cast<std::size_t>(domain.mode_count()), 0.0)
{
}

SpectralField::SpectralField(const Domain& domain, std::vector<double> coeffs)
    : domain_(domain), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != static_cast<std::size_t>(domain.mode_count())) {
        throw std::invalid_argument("SpectralField: expected " + std::to_string(domain.mode_count())
                                    + " coefficients, got " + std::to_string(coeffs_.size()));
    }
}

bool SpectralField::all_finite() const
{
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

double SpectralField::evaluate(double x, double y) const
{
    std::vector<double> sy(static_cast<std::size_t>(domain_.my()));
    for (int n = 1; n <= domain_.my(); ++n) {
        sy[n - 1] = std::sin(domain_.ky(n) * y);
    }
    double sum = 0.0;
    for (int m = 1; m <= domain_.mx(); ++m) {
        const double sx = std::sin(domain_.kx(m) * x);
        double row = 0.0;
        for (int n = 1; n <= domain_.my(); ++n) {
            row += (*this)(m, n) * sy[n - 1];
        }
        sum += sx * row;
    }
    return sum;
}

SpectralField& SpectralField::operator+=(const SpectralField& other)
{
    return axpy(1.0, other);
}

SpectralField& SpectralField::operator-=(const SpectralField& other)
{
    return axpy(-1.0, other);
}

SpectralField& SpectralField::operator*=(double s)
{
    for (double& c : coeffs_) {
        c *= s;
    }
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other)
{
    require_same_domain(domain_, other.domain_, "SpectralField arithmetic");
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
        coeffs_[k] += s * other.coeffs_[k];
    }
    return *this;
}

GridField::GridField(const Domain& domain)
    : domain_(domain),
      values_(static_cast<std::size_t>(domain.padded_nx()) * domain.padded_ny(), 0.0)
{
}

double GridField::max_abs() const
{
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

void require_same_domain(const Domain& a, const Domain& b, const char* context)
{
    if (!(a == b)) {
        throw DomainMismatch(context);
    }
}

SpectralField laplacian(const SpectralField& f)
{
    const Domain& d = f.domain();
    SpectralField out(d);
    for (int m = 1; m <= d.mx(); ++m) {
        for (int n = 1; n <= d.my(); ++n) {
            out(m, n) = -d.wavenumber2(m, n) * f(m, n);
        }
    }
    return out;
}

SpectralField invert_laplacian(const SpectralField& w)
{
    const Domain& d = w.domain();
    SpectralField out(d);
    for (int m = 1; m <= d.mx(); ++m) {
        for (int n = 1; n <= d.my(); ++n) {
            out(m, n) = -w(m, n) / d.wavenumber2(m, n);
        }
    }
    return out;
}

double inner(const SpectralField& f, const SpectralField& g)
{
    require_same_domain(f.domain(), g.domain(), "inner");
    const auto a = f.coeffs();
    const auto b = g.coeffs();
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sum += a[k] * b[k];
    }
    return 0.25 * f.domain().area() * sum;
}

double norm2(const SpectralField& f)
{
    return inner(f, f);
}

double l2_norm(const SpectralField& f)
{
    return std::sqrt(norm2(f));
}

double grad_norm2(const SpectralField& f)
{
    const Domain& d = f.domain();
    double sum = 0.0;
    for (int m = 1; m <= d.mx(); ++m) {
        for (int n = 1; n <= d.my(); ++n) {
            sum += d.wavenumber2(m, n) * f(m, n) * f(m, n);
        }
    }
    return 0.25 * d.area() * sum;
}

SpectralField random_field(const Domain& domain, std::uint64_t seed, double l2)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralField f(domain);
    for (int m = 1; m <= domain.mx(); ++m) {
        for (int n = 1; n <= domain.my(); ++n) {
            f(m, n) = normal(rng) / static_cast<double>(m * m + n * n);
        }
    }
    const double current = l2_norm(f);
    if (current > 0.0) {
        f *= l2 / current;
    }
    return f;
}

}  // namespace qgbasin
