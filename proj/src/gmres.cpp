#include "qgbasin/gmres.hpp"

#include <cmath>
#include <stdexcept>

namespace qgbasin {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}

double norm(const std::vector<double>& a)
{
    return std::sqrt(dot(a, a));
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, const std::vector<double>& b, int restart,
                  int max_iterations, double rel_tol)
{
    if (restart < 1) {
        throw std::invalid_argument("gmres: restart length must be >= 1");
    }
    const std::size_t size = b.size();
    GmresResult out;
    out.x.assign(size, 0.0);
    const double b_norm = norm(b);
    if (b_norm == 0.0) {
        out.converged = true;
        return out;
    }

    std::vector<double> r = b;
    double beta = b_norm;
    while (out.iterations < max_iterations) {
        const int m = restart;
        std::vector<std::vector<double>> basis;
        basis.reserve(m + 1);
        basis.emplace_back(size);
        for (std::size_t k = 0; k < size; ++k) {
            basis[0][k] = r[k] / beta;
        }
        // Hessenberg columns, rotated in place.
        std::vector<std::vector<double>> h(m, std::vector<double>(m + 1, 0.0));
        std::vector<double> cs(m, 0.0);
        std::vector<double> sn(m, 0.0);
        std::vector<double> g(m + 1, 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && out.iterations < max_iterations; ++j) {
            std::vector<double> w = apply(basis[j]);
            ++out.iterations;
            // Modified Gram-Schmidt, twice for stability.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const double hij = dot(w, basis[i]);
                    h[j][i] += hij;
                    for (std::size_t k = 0; k < size; ++k) {
                        w[k] -= hij * basis[i][k];
                    }
                }
            }
            const double w_norm = norm(w);
            h[j][j + 1] = w_norm;

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[j][i] + sn[i] * h[j][i + 1];
                h[j][i + 1] = -sn[i] * h[j][i] + cs[i] * h[j][i + 1];
                h[j][i] = t;
            }
            const double denom = std::hypot(h[j][j], h[j][j + 1]);
            cs[j] = denom == 0.0 ? 1.0 : h[j][j] / denom;
            sn[j] = denom == 0.0 ? 0.0 : h[j][j + 1] / denom;
            h[j][j] = denom;
            h[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            out.relative_residual = std::abs(g[j + 1]) / b_norm;
            if (out.relative_residual <= rel_tol || w_norm == 0.0) {
                ++j;
                break;
            }
            basis.emplace_back(size);
            for (std::size_t k = 0; k < size; ++k) {
                basis[j + 1][k] = w[k] / w_norm;
            }
        }

        // Back substitution on the j x j triangle.
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int c = i + 1; c < j; ++c) {
                s -= h[c][i] * y[c];
            }
            y[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
        }
        for (int i = 0; i < j; ++i) {
            for (std::size_t k = 0; k < size; ++k) {
                out.x[k] += y[i] * basis[i][k];
            }
        }

        if (out.relative_residual <= rel_tol) {
            out.converged = true;
            return out;
        }
        if (out.iterations >= max_iterations) {
            break;
        }
        // Restart from the true residual.
        const std::vector<double> ax = apply(out.x);
        for (std::size_t k = 0; k < size; ++k) {
            r[k] = b[k] - ax[k];
        }
        beta = norm(r);
        out.relative_residual = beta / b_norm;
        if (out.relative_residual <= rel_tol) {
            out.converged = true;
            return out;
        }
    }
    out.converged = out.relative_residual <= rel_tol;
    return out;
}

}  // namespace qgbasin
