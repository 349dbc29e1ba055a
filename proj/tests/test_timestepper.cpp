#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "qgbasin/theory.hpp"
#include "qgbasin/timestepper.hpp"

using namespace qgbasin;
using oracle::pi;

TEST_CASE("rest state is preserved exactly")
{
    const Domain d = Domain::unit_square(8, 8);
    const Dynamics dyn(d, {1.0, 0.01, 0.1}, {});
    StepConfig cfg{0.05, 2.0, 5, 0.5};
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(SpectralField(d), 0.0), cfg);
    CHECK(oracle::max_abs(tr.state.omega) == 0.0);
    CHECK(tr.state.t == 2.0);
}

TEST_CASE("integrating factor is exact on a decaying single mode")
{
    const Domain d = Domain::unit_square(8, 8);
    const Dynamics dyn(d, {0.0, 0.01, 0.1}, {});
    SpectralField w(d);
    w(1, 1) = 1.0;
    StepConfig cfg{0.01, 1.0, 10, 0.5};
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(w, 0.0), cfg);
    const double expected = std::exp(-(0.1 + 0.01 * 2 * pi * pi) * 1.0);
    CHECK(std::abs(tr.state.omega(1, 1) - expected) <= 1e-13 * expected);
    CHECK(std::abs(tr.state.omega(1, 1) - std::exp(-0.297392)) < 1e-6);
}

TEST_CASE("integrate bookkeeping")
{
    const Domain d = Domain::unit_square(4, 4);
    const Dynamics dyn(d, {0.5, 0.01, 0.1}, {});
    const StateView s0 = StateView::from_vorticity(oracle::random_coeffs(d, 1), 0.0);

    SUBCASE("t_end = 0 returns the initial state and one record")
    {
        const Trajectory tr = integrate(dyn, s0, {0.1, 0.0, 1, 0.5});
        CHECK(tr.records.size() == 1);
        CHECK(oracle::max_abs_diff(tr.state.omega, s0.omega) == 0.0);
    }

    SUBCASE("records and a trimmed final step")
    {
        int calls = 0;
        IntegrateOptions opts;
        opts.on_step = [&](const StateView&, int) { ++calls; };
        const Trajectory tr = integrate(dyn, s0, {0.3, 1.0, 2, 0.5}, opts);
        // steps at 0.3, 0.6, 0.9, 1.0
        CHECK(calls == 5);
        CHECK(tr.records.size() == 3);
        CHECK(tr.records[1].t == doctest::Approx(0.6));
        CHECK(tr.records.back().t == 1.0);
        CHECK(tr.state.t == 1.0);
        for (const auto& r : tr.records) {
            CHECK(r.enstrophy >= 0.0);
            CHECK(r.energy >= 0.0);
            CHECK_FALSE(r.envelope.has_value());
        }
    }

    SUBCASE("deterministic")
    {
        const Trajectory a = integrate(dyn, s0, {0.01, 0.5, 10, 0.5});
        const Trajectory b = integrate(dyn, s0, {0.01, 0.5, 10, 0.5});
        CHECK(oracle::max_abs_diff(a.state.omega, b.state.omega) == 0.0);
    }

    SUBCASE("invalid configuration")
    {
        CHECK_THROWS_AS(integrate(dyn, s0, {0.0, 1.0, 1, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(integrate(dyn, s0, {0.1, 1.0, 0, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(integrate(dyn, s0, {0.1, 1.0, 1, 1.5}), std::invalid_argument);
    }
}

TEST_CASE("blow-up is reported with the failure time and partial diagnostics")
{
    const Domain d = Domain::unit_square(16, 16);
    const Dynamics dyn(d, {0.0, 0.0, 0.0}, {});
    const StateView s0 = StateView::from_vorticity(oracle::random_coeffs(d, 3, 1e3), 0.0);
    try {
        integrate(dyn, s0, {1.0, 1e4, 1, 0.5});
        FAIL("expected a blow-up");
    } catch (const BlowUpError& e) {
        CHECK(e.time() > 0.0);
        CHECK_FALSE(e.partial().empty());
        CHECK(e.partial().front().t == 0.0);
    }
}

TEST_CASE("energy drift without dissipation converges at third order")
{
    const Domain d = Domain::unit_square(12, 12);
    const Dynamics dyn(d, {1.0, 0.0, 0.0}, {});
    const StateView s0 = StateView::from_vorticity(random_field(d, 5, 2.0), 0.0);
    const double e0 = 0.5 * grad_norm2(s0.psi);
    auto drift = [&](double dt) {
        const Trajectory tr = integrate(dyn, s0, {dt, 2.0, 1000, 0.5});
        return std::abs(0.5 * grad_norm2(tr.state.psi) - e0);
    };
    const double coarse = drift(0.008);
    const double fine = drift(0.004);
    MESSAGE("energy drift ratio " << coarse / fine);
    CHECK(coarse / fine == doctest::Approx(8.0).epsilon(0.15));
}

TEST_CASE("linearized basin mode after one period")
{
    const Domain d = Domain::unit_square(32, 4);
    const Dynamics dyn(d, {1.0, 0.0, 0.0}, {});
    const LinearMode mode = dispersion(1, 1, 1.0, d);
    const SpectralField psi0 = linear_mode_field(mode, 0.0, d);
    IntegrateOptions opts;
    opts.advection = Advection::linearized;
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(laplacian(psi0), 0.0),
                                    {mode.period / 2000, mode.period, 100, 0.5}, opts);
    const double err = l2_norm(tr.state.psi - linear_mode_field(mode, mode.period, d)) / l2_norm(psi0);
    CHECK(err <= 1e-3);

    SUBCASE("energy is conserved by the linear beta dynamics")
    {
        SpectralField w(d);
        w(1, 1) = 1.0;
        const StateView s = StateView::from_vorticity(w, 0.0);
        const Trajectory shortrun = integrate(dyn, s, {0.01, 1.0, 100, 0.5}, opts);
        const double e0 = grad_norm2(s.psi);
        CHECK(std::abs(grad_norm2(shortrun.state.psi) - e0) <= 1e-10 * e0);
    }
}

TEST_CASE("dissipative unforced run stays under the Gronwall envelope")
{
    const Domain d = Domain::unit_square(16, 16);
    const ModelParams params{0.1, 0.05, 0.5};
    const Dynamics dyn(d, params, {});
    const SpectralField w0 = random_field(d, 8, 1.5);
    const double e0 = norm2(w0);
    const DissipativityEstimate est = make_estimate(params, d, {});
    IntegrateOptions opts;
    opts.envelope = make_envelope(est, e0);
    const Trajectory tr = integrate(dyn, StateView::from_vorticity(w0, 0.0), {0.01, 3.0, 10, 0.5}, opts);
    for (std::size_t k = 0; k < tr.records.size(); ++k) {
        const auto& r = tr.records[k];
        REQUIRE(r.envelope.has_value());
        CHECK(r.enstrophy <= *r.envelope + 1e-8);
        if (k > 0) {
            CHECK(r.enstrophy < tr.records[k - 1].enstrophy);
        }
    }
}

TEST_CASE("check_cfl")
{
    const Domain d = Domain::unit_square(8, 8);
    const Dynamics still(d, {0.0, 0.01, 0.1}, {});
    CHECK(check_cfl(still, StateView::from_vorticity(SpectralField(d), 0.0), 0.5)
          == std::numeric_limits<double>::infinity());

    const SpectralField w = oracle::random_coeffs(d, 2);
    const double a = check_cfl(still, StateView::from_vorticity(w, 0.0), 0.5);
    const double b = check_cfl(still, StateView::from_vorticity(2.0 * w, 0.0), 0.5);
    CHECK(b == doctest::Approx(a / 2).epsilon(1e-14));

    // psi = a_11 sin sin: the largest |grad psi| = pi |a_11| sits at the edge midpoints.
    SpectralField psi(d);
    psi(1, 1) = -0.7;
    const StateView s = StateView::from_vorticity(laplacian(psi), 0.0);
    const double v_max = still.transform().dx(s.psi).max_abs();
    CHECK(v_max == doctest::Approx(pi * 0.7).epsilon(1e-13));
    CHECK(check_cfl(still, s, 0.5) == doctest::Approx(0.5 * d.grid_dx() / (pi * 0.7)).epsilon(1e-13));

    const Dynamics rossby(d, {1.0, 0.0, 0.0}, {});
    const double c_beta = 1.0 / (2 * pi * pi);
    CHECK(check_cfl(rossby, StateView::from_vorticity(SpectralField(d), 0.0), 1.0)
          == doctest::Approx(d.grid_dx() / c_beta));
}
