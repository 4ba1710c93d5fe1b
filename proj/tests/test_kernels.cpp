#include "doctest.h"

#include "gpps/fft.hpp"
#include "gpps/kernels.hpp"

#include <cmath>
#include <random>

using namespace gpps;

namespace {

RealField gaussian_density(const Grid& g)
{
    RealField f = zeros_real(g);
    std::size_t i = 0;
    for (int a = 0; a < g.points[0]; ++a)
        for (int b = 0; b < g.points[1]; ++b, ++i) {
            const double r2 = g.coord(0, a) * g.coord(0, a) + g.coord(1, b) * g.coord(1, b);
            f.v[i] = std::exp(-r2);
        }
    return f;
}

} // namespace

TEST_SUITE("kernels")
{
    TEST_CASE("dipole axis normalization")
    {
        const DipoleAxis n(0.6, 0.0, 0.8);
        CHECK(n.n1 == doctest::Approx(0.6).epsilon(1e-15));
        const DipoleAxis m(2.0, 0.0, 0.0);
        CHECK(m.n1 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_THROWS_AS(DipoleAxis(0.0, 0.0, 0.0), std::invalid_argument);
    }

    TEST_CASE("planar kernel: closed form vs quadrature")
    {
        for (double eps : {1e-2, 0.1, 1.0, 10.0})
            for (double r : {1e-2, 0.3, 1.0, 7.0, 1e2}) {
                const double cf = symbol_u2d(r, eps);
                const double q = symbol_u2d_quadrature(r, eps);
                CHECK(std::fabs(cf - q) <= 1e-9 * std::fabs(q));
            }
        // vanishing thickness: plain coulomb decay 1/r
        CHECK(symbol_u2d(1e-8, 1.0) == doctest::Approx(1e8).epsilon(1e-7));
    }

    TEST_CASE("line kernel: closed form vs quadrature")
    {
        for (double eps : {1e-2, 0.1, 1.0, 10.0})
            for (double xi : {1e-2, 0.3, 1.0, 7.0, 1e2}) {
                const double cf = symbol_u1d(xi, eps);
                const double q = symbol_u1d_quadrature(xi, eps);
                CHECK(std::fabs(cf - q) <= 1e-9 * std::fabs(q));
            }
        CHECK(kernel_u1d_physical(0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(kernel_u1d_physical(1.0, 0.5) < kernel_u1d_physical(0.5, 0.5));
        CHECK(kernel_u1d_physical(-1.0, 0.5) == kernel_u1d_physical(1.0, 0.5));
    }

    TEST_CASE("multiplier bounds hold node-wise on constructed tables")
    {
        const Grid g2 = make_grid(2, {8.0, 8.0, 0}, {64, 64, 1});
        const Grid g1 = make_grid(1, {16.0, 0, 0}, {256, 1, 1});
        for (double eps : {0.05, 0.25, 1.0}) {
            const double bound2 = std::sqrt(2.0) / (std::sqrt(M_PI) * eps);
            const double bound1 = 2.0 * std::sqrt(2.0) / (std::sqrt(M_PI) * eps);
            for (auto axis : {DipoleAxis(0, 0, 1), DipoleAxis(0.6, 0, 0.8), DipoleAxis(1, 0, 0)}) {
                const auto t = nonlocal_table_2dI(g2, axis, eps);
                for (double v : t)
                    CHECK(std::fabs(v) <= bound2 * (1.0 + 1e-13));
            }
            const auto t1 = nonlocal_table_1d(g1, eps);
            for (double v : t1)
                CHECK(std::fabs(v) <= bound1 * (1.0 + 1e-13));
        }
    }

    TEST_CASE("3d dipole symbol range and decomposition identity")
    {
        CHECK(symbol_dip3d(0.0, 0.0, 2.5, DipoleAxis(0, 0, 1)) ==
              doctest::Approx(2.0).epsilon(1e-14));
        CHECK(symbol_dip3d(1.3, 0.0, 0.0, DipoleAxis(0, 0, 1)) ==
              doctest::Approx(-1.0).epsilon(1e-14));

        const Grid g = make_grid(3, {4.0, 4.0, 4.0}, {16, 16, 16});
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int trial = 0; trial < 3; ++trial) {
            const double beta = 2.0 * u(rng), lambda = 2.0 * u(rng);
            const DipoleAxis n(u(rng) + 1.1, u(rng), u(rng));
            const auto combined = dipolar_table_3d(g, n, beta, lambda);
            // (beta - lambda) + 3 lambda (n.xi)^2/|xi|^2 == beta + lambda Udip(xi)
            const auto udip = build_symbol(g, SymbolKind::Dip3D, {n});
            for (std::size_t i = 1; i < combined.size(); ++i)
                CHECK(std::fabs(combined[i] - (beta + lambda * udip.table[i].real())) < 1e-12);
            CHECK(combined[0] == doctest::Approx(beta - lambda).epsilon(1e-15));
        }
    }

    TEST_CASE("build_symbol zero-mode conventions")
    {
        const Grid g = make_grid(2, {6.0, 6.0, 0}, {32, 32, 1});
        SymbolParams p;
        p.eps = 0.5;
        CHECK(build_symbol(g, SymbolKind::U2dEps, p).table[0] == cdouble(0.0, 0.0));
        CHECK(build_symbol(g, SymbolKind::FracPoisson2D, p).table[0] == cdouble(0.0, 0.0));
        p.component = 0;
        CHECK(build_symbol(g, SymbolKind::Riesz2D, p).table[0] == cdouble(0.0, 0.0));
    }

    TEST_CASE("anisotropic planar symbol")
    {
        const DipoleAxis n(0.6, 0.0, 0.8);
        // (n1 x1 + n2 x2)^2 - n3^2 |x|^2 at (1, 2)
        const double want = (0.6 * 1.0) * (0.6 * 1.0) - 0.64 * 5.0;
        CHECK(symbol_aniso2d(1.0, 2.0, n) == doctest::Approx(want).epsilon(1e-14));
    }

    TEST_CASE("vertical dipoles repel in the plane: positive nonlocal response")
    {
        const Grid g = make_grid(2, {8.0, 8.0, 0}, {64, 64, 1});
        const RealField rho = gaussian_density(g);
        const RealField w = apply_nonlocal_2dI(rho, DipoleAxis(0, 0, 1), 0.5);
        const std::size_t center = (g.points[0] / 2) * g.points[1] + g.points[1] / 2;
        CHECK(w.v[center] > 0.0);
    }

    TEST_CASE("thin-layer transfer operator converges to the riesz transform")
    {
        const Grid g = make_grid(2, {10.0, 10.0, 0}, {128, 128, 1});
        const RealField f = gaussian_density(g);
        double prev = -1.0, first = 0.0;
        for (double eps : {1.0, 0.5, 0.25, 0.125}) {
            const RealField te = t_eps_alpha(f, eps, 0);
            const RealField rz = riesz_alpha(f, 0);
            double d2 = 0.0;
            for (std::size_t i = 0; i < te.v.size(); ++i)
                d2 += (te.v[i] - rz.v[i]) * (te.v[i] - rz.v[i]);
            const double dist = std::sqrt(d2 * g.cell_volume());
            if (prev >= 0.0)
                CHECK(dist < prev);
            else
                first = dist;
            prev = dist;
        }
        CHECK(prev < 0.25 * first);
    }
}
