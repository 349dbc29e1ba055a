#pragma once

#include <functional>
#include <vector>

namespace qgbasin {

using LinearOperator = std::function<std::vector<double>(const std::vector<double>&)>;

struct GmresResult {
    std::vector<double> x;
    double relative_residual = 0.0;
    int iterations = 0;  ///< total Arnoldi steps, i.e. operator applications
    bool converged = false;
};

/// Restarted GMRES(restart) for A x = b from x0 = 0 with Givens-rotation least
/// squares. Stops once ||b - A x|| <= rel_tol ||b|| or after max_iterations
/// operator applications.
GmresResult gmres(const LinearOperator& apply, const std::vector<double>& b, int restart,
                  int max_iterations, double rel_tol);

}  // namespace qgbasin
