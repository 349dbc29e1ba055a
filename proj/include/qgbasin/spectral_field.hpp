#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qgbasin/domain.hpp"

namespace qgbasin {

/// Coefficients a_mn of g(x, y) = sum a_mn sin(m pi x / Lx) sin(n pi y / Ly),
/// 1 <= m <= Mx, 1 <= n <= My, stored row-major with m outer.
///
/// Every represented field vanishes on the basin boundary, so both the
/// stream-function and vorticity Dirichlet conditions hold by construction.
class SpectralField {
public:
    explicit SpectralField(const Domain& domain);
    SpectralField(const Domain& domain, std::vector<double> coeffs);

    const Domain& domain() const { return domain_; }

    double& operator()(int m, int n) { return coeffs_[index(m, n)]; }
    double operator()(int m, int n) const { return coeffs_[index(m, n)]; }

    std::span<double> coeffs() { return coeffs_; }
    std::span<const double> coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }

    bool all_finite() const;
    /// Point evaluation by direct summation.
    double evaluate(double x, double y) const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double s);
    /// this += s * other
    SpectralField& axpy(double s, const SpectralField& other);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

private:
    std::size_t index(int m, int n) const
    {
        return static_cast<std::size_t>(m - 1) * domain_.my() + static_cast<std::size_t>(n - 1);
    }

    Domain domain_;
    std::vector<double> coeffs_;
};

/// Values on the closed padded mesh, boundary nodes included, row-major with i (x) outer.
class GridField {
public:
    explicit GridField(const Domain& domain);

    const Domain& domain() const { return domain_; }
    int nx() const { return domain_.padded_nx(); }
    int ny() const { return domain_.padded_ny(); }

    double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * ny() + j]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * ny() + j]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double max_abs() const;

private:
    Domain domain_;
    std::vector<double> values_;
};

void require_same_domain(const Domain& a, const Domain& b, const char* context);

SpectralField laplacian(const SpectralField& f);
/// Dirichlet inverse of the Laplacian; exact on the sine basis (no zero mode).
SpectralField invert_laplacian(const SpectralField& w);

/// Exact L2 inner product from coefficients: (Lx Ly / 4) sum f_mn g_mn.
double inner(const SpectralField& f, const SpectralField& g);
double norm2(const SpectralField& f);
/// L2 norm, sqrt(norm2).
double l2_norm(const SpectralField& f);
/// Integral of |grad f|^2.
double grad_norm2(const SpectralField& f);

/// Random field with coefficient variance falling off as 1 / (m^2 + n^2)^2,
/// rescaled to the requested L2 norm. Deterministic in the seed.
SpectralField random_field(const Domain& domain, std::uint64_t seed, double l2);

}  // namespace qgbasin
