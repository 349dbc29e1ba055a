#pragma once

#include <memory>

#include "qgbasin/domain.hpp"
#include "qgbasin/spectral_field.hpp"

namespace qgbasin {

/// Fast sine/cosine synthesis and sine projection between a SpectralField and
/// the padded closed mesh of its Domain, backed by FFTW r2r plans.
///
/// Plans are created once and are immutable; copies share them, and all
/// transforms may run concurrently.
class SineTransform {
public:
    explicit SineTransform(const Domain& domain);

    const Domain& domain() const { return domain_; }

    /// Evaluate the sine series on the padded mesh.
    GridField to_grid(const SpectralField& f) const;
    /// Galerkin projection of mesh values onto the retained sine modes.
    /// Exact for sine series with x-frequencies below 2 (padded_nx - 1) - Mx
    /// (and likewise in y); boundary nodes carry no weight.
    SpectralField from_grid(const GridField& g) const;

    /// Exact spectral derivatives evaluated on the padded mesh.
    GridField dx(const SpectralField& f) const;
    GridField dy(const SpectralField& f) const;

private:
    struct Plans;

    Domain domain_;
    std::shared_ptr<const Plans> plans_;
};

}  // namespace qgbasin
