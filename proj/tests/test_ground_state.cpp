#include "doctest.h"

#include "gpps/fft.hpp"
#include "gpps/ground_state.hpp"

#include <cmath>

using namespace gpps;

TEST_SUITE("groundstate")
{
    TEST_CASE("planar interpolation constant: two estimators agree")
    {
        const GNConstant c = estimate_cb();
        CHECK(c.value == doctest::Approx(5.8504).epsilon(1e-3));
        CHECK(c.spread < 1e-3);
        CHECK(c.value == c.shooting);
        // any grid field sits above the sharp constant
        const Grid g = make_grid(2, {10.0, 10.0, 0}, {128, 128, 1});
        const double jg = gn_quotient(gaussian_init(g, {1.0, 1.0, 1.0}));
        CHECK(jg == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
        CHECK(jg > c.value);
    }

    TEST_CASE("free harmonic ground state energies")
    {
        GradientFlowOptions opt;
        opt.tol = 1e-9;

        ModelParams p2;
        p2.kind = ModelKind::Limit2D;
        p2.beta = 0.0;
        p2.lambda = 0.0;
        const Grid g2 = make_grid(2, {8.0, 8.0, 0}, {64, 64, 1});
        const GroundStateResult r2 =
            minimize_gradient_flow(p2, gaussian_init(g2, {1.4, 0.7, 1.0}), opt);
        CHECK(r2.converged);
        CHECK(r2.energy.total == doctest::Approx(1.0).epsilon(1e-6));

        ModelParams p1;
        p1.kind = ModelKind::Limit1D;
        p1.beta = 0.0;
        p1.lambda = 0.0;
        const Grid g1 = make_grid(1, {8.0, 0, 0}, {64, 1, 1});
        const GroundStateResult r1 =
            minimize_gradient_flow(p1, gaussian_init(g1, {1.7, 1.0, 1.0}), opt);
        CHECK(r1.converged);
        CHECK(r1.energy.total == doctest::Approx(0.5).epsilon(1e-6));

        // converged profile is nonnegative with unit mass
        double mn = 1e300, m = 0.0;
        for (double v : r2.phi.v)
            mn = std::min(mn, v);
        for (double v : r2.phi.v)
            m += v * v;
        CHECK(mn >= -1e-12);
        CHECK(m * g2.cell_volume() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(!r2.history.empty());
    }

    TEST_CASE("regime classification covers the parameter chart")
    {
        const double cb = estimate_cb().value;
        ModelParams p;
        p.kind = ModelKind::Quasi2DI;
        p.eps = 0.5;
        p.axis = DipoleAxis(0.0, 0.0, 1.0);
        p.beta = 2.0;
        p.lambda = 0.5;
        CHECK(classify_regime(p, cb).outcome == RegimeOutcome::ExistsUniquePositive);
        p.beta = -10.0;
        p.lambda = 0.0;
        const RegimeVerdict nv = classify_regime(p, cb);
        CHECK(nv.outcome == RegimeOutcome::NotExists);
        CHECK(nv.margin > 0.0);

        p.kind = ModelKind::Quasi2DII;
        p.beta = 1.0;
        p.lambda = 1.0;
        p.axis = DipoleAxis(0.6, 0.0, 0.8); // tilted dipole, fractional model
        CHECK(classify_regime(p, cb).outcome == RegimeOutcome::NotExists);
        p.axis = DipoleAxis(1.0, 0.0, 0.0);
        p.beta = 3.0;
        CHECK(classify_regime(p, cb).outcome == RegimeOutcome::ExistsUniquePositive);

        p.kind = ModelKind::Gpps3D;
        p.beta = 2.0;
        p.lambda = 1.0;
        CHECK(classify_regime(p, cb).outcome == RegimeOutcome::ExistsUniquePositive);
        p.lambda = 3.0;
        CHECK(classify_regime(p, cb).outcome == RegimeOutcome::NotExists);

        CHECK_THROWS_AS(classify_regime(p, 0.0), std::invalid_argument);
    }

    TEST_CASE("uniqueness: independent seeds land on the same profile")
    {
        ModelParams p;
        p.kind = ModelKind::Quasi2DI;
        p.beta = 2.0;
        p.lambda = 0.5;
        p.eps = 0.5;
        p.axis = DipoleAxis(0.6, 0.0, 0.8);
        const double cb = estimate_cb().value;
        REQUIRE(classify_regime(p, cb).outcome == RegimeOutcome::ExistsUniquePositive);

        const Grid g = make_grid(2, {8.0, 8.0, 0}, {48, 48, 1});
        GradientFlowOptions opt;
        opt.tol = 1e-9;
        const GroundStateResult a = minimize_gradient_flow(p, random_smooth_init(g, 11), opt);
        const GroundStateResult b = minimize_gradient_flow(p, random_smooth_init(g, 97), opt);
        REQUIRE(a.converged);
        REQUIRE(b.converged);
        double dmax = 0.0;
        for (std::size_t i = 0; i < a.phi.v.size(); ++i)
            dmax = std::max(dmax, std::fabs(a.phi.v[i] - b.phi.v[i]));
        CHECK(dmax < 1e-6);
        CHECK(a.energy.total == doctest::Approx(b.energy.total).epsilon(1e-9));
    }

    TEST_CASE("concentration family diverges at the kinetic rate when lambda = 0")
    {
        ModelParams p;
        p.kind = ModelKind::Quasi2DI;
        p.beta = -10.0;
        p.lambda = 0.0;
        p.eps = 0.5;
        const Grid g = make_grid(2, {8.0, 8.0, 0}, {96, 96, 1});
        const ScalingProbe probe = scaling_probe_2dI(p, gaussian_init(g, {1.0, 1.0, 1.0}),
                                                     {0.5, 0.25, 0.125, 0.0625});
        for (std::size_t i = 1; i < probe.energies.size(); ++i)
            CHECK(probe.energies[i].total < probe.energies[i - 1].total);
        CHECK(probe.fitted_exponent == doctest::Approx(2.0).epsilon(0.1));
        CHECK(probe.leading_coefficient < 0.0);
    }

    TEST_CASE("anisotropic family diverges at the dipolar rate")
    {
        ModelParams p;
        p.kind = ModelKind::Quasi2DII;
        p.beta = 1.0;
        p.lambda = 1.0;
        p.eps = 0.5;
        p.axis = DipoleAxis(0.6, 0.0, 0.8);
        const double cb = estimate_cb().value;
        REQUIRE(classify_regime(p, cb).outcome == RegimeOutcome::NotExists);
        const Grid g = make_grid(2, {8.0, 8.0, 0}, {96, 96, 1});
        const ScalingProbe probe = scaling_probe_2dII(p, gaussian_init(g, {1.0, 1.0, 1.0}),
                                                      {0.5, 0.25, 0.125}, 8.0);
        for (std::size_t i = 1; i < probe.energies.size(); ++i)
            CHECK(probe.energies[i].total < probe.energies[i - 1].total);
        CHECK(probe.fitted_exponent == doctest::Approx(3.0).epsilon(0.07));
    }

    TEST_CASE("flow flags nonexistence instead of converging")
    {
        ModelParams p;
        p.kind = ModelKind::Quasi2DI;
        p.beta = -10.0;
        p.lambda = 0.0;
        p.eps = 0.5;
        const Grid g = make_grid(2, {8.0, 8.0, 0}, {64, 64, 1});
        GradientFlowOptions opt;
        opt.max_iterations = 4000;
        const GroundStateResult r =
            minimize_gradient_flow(p, gaussian_init(g, {0.8, 0.8, 1.0}), opt);
        CHECK((r.nonexistence_suspected || !r.converged));
    }
}
