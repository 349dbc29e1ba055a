#include "qgbasin/domain.hpp"

#include <stdexcept>
#include <string>

namespace qgbasin {

Domain::Domain(double lx, double ly, int mx, int my, int padded_nx, int padded_ny)
    : lx_(lx), ly_(ly), mx_(mx), my_(my),
      nx_(padded_nx == 0 ? 2 * mx + 1 : padded_nx),
      ny_(padded_ny == 0 ? 2 * my + 1 : padded_ny)
{
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw std::invalid_argument("Domain: Lx and Ly must be positive and finite");
    }
    if (mx < 1 || my < 1) {
        throw std::invalid_argument("Domain: Mx and My must be at least 1");
    }
    if (nx_ < 2 * mx + 1 || ny_ < 2 * my + 1) {
        throw std::invalid_argument("Domain: padded grid must have at least 2M+1 points per direction (got "
                                    + std::to_string(nx_) + "x" + std::to_string(ny_) + ")");
    }
}

}  // namespace qgbasin
