#pragma once

#include <cmath>
#include <numbers>

namespace qgbasin {

/// Rectangular basin [0, Lx] x [0, Ly] with a sine-mode truncation and the
/// padded quadrature mesh used for products.
///
/// The quadrature mesh is the closed uniform mesh x_i = i * Lx / (padded_nx - 1),
/// i = 0 .. padded_nx - 1, boundary nodes included. With padded_nx >= 2 Mx + 1
/// quadratic products of retained modes are integrated and projected exactly.
class Domain {
public:
    /// padded_nx / padded_ny of 0 select the minimum 2 M + 1.
    Domain(double lx, double ly, int mx, int my, int padded_nx = 0, int padded_ny = 0);

    static Domain unit_square(int mx, int my) { return Domain(1.0, 1.0, mx, my); }

    double lx() const { return lx_; }
    double ly() const { return ly_; }
    int mx() const { return mx_; }
    int my() const { return my_; }
    int padded_nx() const { return nx_; }
    int padded_ny() const { return ny_; }

    double area() const { return lx_ * ly_; }
    int mode_count() const { return mx_ * my_; }

    double kx(int m) const { return m * std::numbers::pi / lx_; }
    double ky(int n) const { return n * std::numbers::pi / ly_; }
    /// (m pi / Lx)^2 + (n pi / Ly)^2, the negated Laplacian eigenvalue of mode (m, n).
    double wavenumber2(int m, int n) const
    {
        const double a = kx(m);
        const double b = ky(n);
        return a * a + b * b;
    }

    double grid_dx() const { return lx_ / (nx_ - 1); }
    double grid_dy() const { return ly_ / (ny_ - 1); }
    double grid_x(int i) const { return i * grid_dx(); }
    double grid_y(int j) const { return j * grid_dy(); }

    bool is_unit_square() const { return lx_ == 1.0 && ly_ == 1.0; }

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    double lx_;
    double ly_;
    int mx_;
    int my_;
    int nx_;
    int ny_;
};

}  // namespace qgbasin
