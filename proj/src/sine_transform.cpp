#include "qgbasin/sine_transform.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace qgbasin {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_plan make_plan(int n0, int n1, fftw_r2r_kind k0, fftw_r2r_kind k1)
{
    std::vector<double> scratch(static_cast<std::size_t>(n0) * n1);
    std::lock_guard lock(planner_mutex());
    return fftw_plan_r2r_2d(n0, n1, scratch.data(), scratch.data(), k0, k1,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
}

}  // namespace

struct SineTransform::Plans {
    fftw_plan sin_sin = nullptr;
    fftw_plan cos_sin = nullptr;
    fftw_plan sin_cos = nullptr;

    Plans(int nx, int ny)
    {
        const int ix = nx - 2;
        const int iy = ny - 2;
        sin_sin = make_plan(ix, iy, FFTW_RODFT00, FFTW_RODFT00);
        cos_sin = make_plan(nx, iy, FFTW_REDFT00, FFTW_RODFT00);
        sin_cos = make_plan(ix, ny, FFTW_RODFT00, FFTW_REDFT00);
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(sin_sin);
        fftw_destroy_plan(cos_sin);
        fftw_destroy_plan(sin_cos);
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SineTransform::SineTransform(const Domain& domain)
    : domain_(domain), plans_(std::make_shared<const Plans>(domain.padded_nx(), domain.padded_ny()))
{
}

// DST-I of length N evaluates 2 sum_j X_j sin(pi (j+1)(k+1) / (N+1)) and DCT-I of
// length n evaluates X_0 + (-1)^k X_{n-1} + 2 sum_{j=1}^{n-2} X_j cos(pi j k / (n-1)),
// so a series coefficient c enters as c / 2 per direction.

GridField SineTransform::to_grid(const SpectralField& f) const
{
    require_same_domain(domain_, f.domain(), "to_grid");
    const int nx = domain_.padded_nx();
    const int ny = domain_.padded_ny();
    const int ix = nx - 2;
    const int iy = ny - 2;
    std::vector<double> buf(static_cast<std::size_t>(ix) * iy, 0.0);
    for (int m = 1; m <= domain_.mx(); ++m) {
        for (int n = 1; n <= domain_.my(); ++n) {
            buf[static_cast<std::size_t>(m - 1) * iy + (n - 1)] = 0.25 * f(m, n);
        }
    }
    fftw_execute_r2r(plans_->sin_sin, buf.data(), buf.data());
    GridField g(domain_);
    for (int i = 1; i <= ix; ++i) {
        for (int j = 1; j <= iy; ++j) {
            g.at(i, j) = buf[static_cast<std::size_t>(i - 1) * iy + (j - 1)];
        }
    }
    return g;
}

SpectralField SineTransform::from_grid(const GridField& g) const
{
    require_same_domain(domain_, g.domain(), "from_grid");
    const int nx = domain_.padded_nx();
    const int ny = domain_.padded_ny();
    const int ix = nx - 2;
    const int iy = ny - 2;
    std::vector<double> buf(static_cast<std::size_t>(ix) * iy);
    for (int i = 1; i <= ix; ++i) {
        for (int j = 1; j <= iy; ++j) {
            buf[static_cast<std::size_t>(i - 1) * iy + (j - 1)] = g.at(i, j);
        }
    }
    fftw_execute_r2r(plans_->sin_sin, buf.data(), buf.data());
    const double scale = 1.0 / (static_cast<double>(nx - 1) * (ny - 1));
    SpectralField f(domain_);
    for (int m = 1; m <= domain_.mx(); ++m) {
        for (int n = 1; n <= domain_.my(); ++n) {
            f(m, n) = scale * buf[static_cast<std::size_t>(m - 1) * iy + (n - 1)];
        }
    }
    return f;
}

GridField SineTransform::dx(const SpectralField& f) const
{
    require_same_domain(domain_, f.domain(), "dx");
    const int nx = domain_.padded_nx();
    const int iy = domain_.padded_ny() - 2;
    std::vector<double> buf(static_cast<std::size_t>(nx) * iy, 0.0);
    for (int m = 1; m <= domain_.mx(); ++m) {
        const double k = domain_.kx(m);
        for (int n = 1; n <= domain_.my(); ++n) {
            buf[static_cast<std::size_t>(m) * iy + (n - 1)] = 0.25 * k * f(m, n);
        }
    }
    fftw_execute_r2r(plans_->cos_sin, buf.data(), buf.data());
    GridField g(domain_);
    for (int i = 0; i < nx; ++i) {
        for (int j = 1; j <= iy; ++j) {
            g.at(i, j) = buf[static_cast<std::size_t>(i) * iy + (j - 1)];
        }
    }
    return g;
}

GridField SineTransform::dy(const SpectralField& f) const
{
    require_same_domain(domain_, f.domain(), "dy");
    const int ix = domain_.padded_nx() - 2;
    const int ny = domain_.padded_ny();
    std::vector<double> buf(static_cast<std::size_t>(ix) * ny, 0.0);
    for (int m = 1; m <= domain_.mx(); ++m) {
        for (int n = 1; n <= domain_.my(); ++n) {
            buf[static_cast<std::size_t>(m - 1) * ny + n] = 0.25 * domain_.ky(n) * f(m, n);
        }
    }
    fftw_execute_r2r(plans_->sin_cos, buf.data(), buf.data());
    GridField g(domain_);
    for (int i = 1; i <= ix; ++i) {
        for (int j = 0; j < ny; ++j) {
            g.at(i, j) = buf[static_cast<std::size_t>(i - 1) * ny + j];
        }
    }
    return g;
}

}  // namespace qgbasin
