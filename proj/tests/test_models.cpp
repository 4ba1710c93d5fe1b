#include "doctest.h"

#include "gpps/fft.hpp"
#include "gpps/ground_state.hpp"
#include "gpps/models.hpp"

#include <cmath>
#include <complex>

using namespace gpps;

namespace {

Grid grid_for(ModelKind k)
{
    const int d = model_dimension(k);
    if (d == 1)
        return make_grid(1, {12.0, 0, 0}, {128, 1, 1});
    if (d == 2)
        return make_grid(2, {8.0, 8.0, 0}, {48, 48, 1});
    return make_grid(3, {6.0, 6.0, 6.0}, {24, 24, 24});
}

ModelParams params_for(ModelKind k)
{
    ModelParams p;
    p.kind = k;
    p.beta = 1.3;
    p.lambda = 0.6;
    p.eps = 0.5;
    p.axis = DipoleAxis(0.48, 0.36, 0.8);
    p.potential.kind = PotentialSpec::Kind::Harmonic;
    validate(p);
    return p;
}

} // namespace

TEST_SUITE("models")
{
    TEST_CASE("names, dimensions, validation")
    {
        CHECK(model_dimension(ModelKind::Gpps3D) == 3);
        CHECK(model_dimension(ModelKind::Quasi2DII) == 2);
        CHECK(model_dimension(ModelKind::Limit1D) == 1);
        CHECK(model_name(ModelKind::Quasi2DI) == "quasi2d_I");
        CHECK(model_name(ModelKind::Gpps3D) == "gpps3d");

        ModelParams p;
        p.kind = ModelKind::Quasi2DI;
        p.eps = 0.0;
        CHECK_THROWS_AS(validate(p), std::invalid_argument);
        p.eps = 1.5;
        CHECK_THROWS_AS(validate(p), std::invalid_argument);
        p.eps = 1.0;
        CHECK_NOTHROW(validate(p));
        p.kind = ModelKind::Limit2D; // limit models carry no thickness
        p.eps = 7.0;
        CHECK_NOTHROW(validate(p));
        p.beta = NAN;
        CHECK_THROWS_AS(validate(p), std::invalid_argument);
    }

    TEST_CASE("potential field closed forms")
    {
        const Grid g = make_grid(2, {4.0, 4.0, 0}, {16, 16, 1});
        PotentialSpec s;
        s.kind = PotentialSpec::Kind::Harmonic;
        s.gamma = {1.0, 2.0, 1.0};
        const RealField v = potential_field(g, s);
        const double x = g.coord(0, 3), y = g.coord(1, 11);
        CHECK(v.v[3 * 16 + 11] ==
              doctest::Approx(0.5 * (x * x + 4.0 * y * y)).epsilon(1e-14));

        s.kind = PotentialSpec::Kind::HarmonicPlusLattice;
        s.lattice_amplitude = 2.5;
        s.lattice_wavenumber = {1.0, 3.0, 1.0};
        const RealField vl = potential_field(g, s);
        const double sl = 2.5 * (std::sin(x) * std::sin(x) + std::sin(3 * y) * std::sin(3 * y));
        CHECK(vl.v[3 * 16 + 11] ==
              doctest::Approx(0.5 * (x * x + 4.0 * y * y) + sl).epsilon(1e-13));

        s.kind = PotentialSpec::Kind::HarmonicPlusLattice;
        s.lattice_amplitude = -1.0;
        CHECK_THROWS_AS(potential_field(g, s), std::invalid_argument);

        s.kind = PotentialSpec::Kind::Tabulated;
        s.table.assign(g.size(), -0.1);
        CHECK_THROWS_AS(potential_field(g, s), std::invalid_argument);
    }

    TEST_CASE("coefficient assembly algebra")
    {
        Coefficient c;
        c.num = 3.0;
        c.den = 2.0;
        c.tp = -1; // one factor 1/sqrt(2 pi)
        c.ep = -1;
        c.wb = 1.0;
        c.wl = 2.0;
        const double want = 1.5 / std::sqrt(2.0 * M_PI) / 0.25 * (1.3 + 2.0 * 0.6);
        CHECK(c.value(1.3, 0.6, 0.25) == doctest::Approx(want).epsilon(1e-14));
    }

    TEST_CASE("coefficient audit prints the assembled numbers")
    {
        for (ModelKind k : {ModelKind::Gpps3D, ModelKind::Quasi2DI, ModelKind::Quasi2DII,
                            ModelKind::Quasi1D, ModelKind::Limit2D, ModelKind::Limit1D}) {
            const std::string audit = coefficient_audit(params_for(k));
            CHECK(!audit.empty());
            CHECK(audit.find(model_name(k)) != std::string::npos);
        }
    }

    TEST_CASE("energy splits against the hamiltonian quadratic form")
    {
        // quadratic interaction terms enter <H psi, psi> with weight two:
        // Re<H psi, psi> = E_kin + E_pot + 2 E_contact + 2 E_dip
        for (ModelKind k : {ModelKind::Gpps3D, ModelKind::Quasi2DI, ModelKind::Quasi2DII,
                            ModelKind::Quasi1D, ModelKind::Limit2D, ModelKind::Limit1D}) {
            const ModelParams p = params_for(k);
            const Grid g = grid_for(k);
            const ComplexField psi = random_smooth_init(g, 42);
            const EnergyBreakdown e = energy(p, psi);
            const ComplexField h = hamiltonian_apply(p, psi);
            cdouble quad(0.0, 0.0);
            for (std::size_t i = 0; i < psi.v.size(); ++i)
                quad += h.v[i] * std::conj(psi.v[i]);
            quad *= g.cell_volume();
            const double want = e.kinetic + e.potential + 2.0 * e.contact + 2.0 * e.dipolar;
            CHECK(quad.real() == doctest::Approx(want).epsilon(1e-10));
            CHECK(std::fabs(quad.imag()) < 1e-10 * (1.0 + std::fabs(want)));
            CHECK(e.total ==
                  doctest::Approx(e.kinetic + e.potential + e.contact + e.dipolar).epsilon(1e-12));
        }
    }

    TEST_CASE("interaction energy equals half the density pairing")
    {
        for (ModelKind k : {ModelKind::Gpps3D, ModelKind::Quasi2DI, ModelKind::Quasi2DII,
                            ModelKind::Quasi1D, ModelKind::Limit2D, ModelKind::Limit1D}) {
            const ModelParams p = params_for(k);
            const Grid g = grid_for(k);
            const ModelOperator op(p, g);
            const ComplexField psi = random_smooth_init(g, 5);
            const RealField rho = density(psi);
            const RealField w = op.effective_potential_density(rho);
            double pair = 0.0;
            for (std::size_t i = 0; i < rho.v.size(); ++i)
                pair += rho.v[i] * w.v[i];
            pair *= 0.5 * g.cell_volume();
            const EnergyBreakdown e = op.energy(psi);
            CHECK(pair == doctest::Approx(e.contact + e.dipolar).epsilon(1e-10));
        }
    }

    TEST_CASE("operator rejects mismatched grids")
    {
        const ModelParams p = params_for(ModelKind::Quasi2DI);
        const ModelOperator op(p, grid_for(ModelKind::Quasi2DI));
        const ComplexField other = zeros_complex(make_grid(2, {4.0, 4.0, 0}, {16, 16, 1}));
        CHECK_THROWS_AS(op.energy(other), std::invalid_argument);
        CHECK_THROWS_AS(ModelOperator(p, make_grid(1, {4.0, 0, 0}, {16, 1, 1})),
                        std::invalid_argument);
    }

    TEST_CASE("limit model couplings depend on the axis through n3 only")
    {
        ModelParams a = params_for(ModelKind::Limit2D);
        ModelParams b = a;
        a.axis = DipoleAxis(0.6, 0.0, 0.8);
        b.axis = DipoleAxis(0.0, 0.6, 0.8);
        CHECK(local_coefficient(a).value(a.beta, a.lambda, a.eps) ==
              doctest::Approx(local_coefficient(b).value(b.beta, b.lambda, b.eps))
                  .epsilon(1e-14));
    }
}
