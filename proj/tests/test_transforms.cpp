#include "doctest.h"

#include "gpps/fft.hpp"
#include "gpps/grid.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace gpps;

namespace {

ComplexField gaussian_unnormalized(const Grid& g)
{
    ComplexField f = zeros_complex(g);
    std::size_t i = 0;
    for (int a = 0; a < g.points[0]; ++a)
        for (int b = 0; b < g.points[1]; ++b)
            for (int c = 0; c < g.points[2]; ++c, ++i) {
                double r2 = g.coord(0, a) * g.coord(0, a);
                if (g.dim > 1)
                    r2 += g.coord(1, b) * g.coord(1, b);
                if (g.dim > 2)
                    r2 += g.coord(2, c) * g.coord(2, c);
                f.v[i] = std::exp(-0.5 * r2);
            }
    return f;
}

} // namespace

TEST_SUITE("transforms")
{
    TEST_CASE("grid wavenumber tables")
    {
        const Grid g = make_grid(1, {4.0, 0, 0}, {16, 1, 1});
        CHECK(g.k[0][0] == 0.0);
        CHECK(g.k[0][1] == doctest::Approx(M_PI / 4.0).epsilon(1e-15));
        CHECK(g.k[0][7] == doctest::Approx(7.0 * M_PI / 4.0).epsilon(1e-15));
        CHECK(g.k[0][8] == doctest::Approx(-8.0 * M_PI / 4.0).epsilon(1e-15)); // Nyquist
        CHECK(g.k[0][15] == doctest::Approx(-M_PI / 4.0).epsilon(1e-15));
        CHECK(g.kd[0][8] == 0.0); // derivative table drops the unpaired mode
        CHECK(g.kd[0][5] == g.k[0][5]);
        CHECK(g.spacing[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(g.coord(0, 0) == doctest::Approx(-4.0).epsilon(1e-15));
    }

    TEST_CASE("forward/inverse round trip")
    {
        const Grid g = make_grid(2, {6.0, 5.0, 0}, {32, 24, 1});
        ComplexField f = zeros_complex(g);
        // deterministic ragged field
        for (std::size_t i = 0; i < f.v.size(); ++i)
            f.v[i] = cdouble(std::sin(0.37 * i) + 0.2, std::cos(1.11 * i));
        const ComplexField back = inverse_transform(forward_transform(f));
        double err = 0.0;
        for (std::size_t i = 0; i < f.v.size(); ++i)
            err = std::max(err, std::abs(back.v[i] - f.v[i]));
        CHECK(err < 1e-12);
    }

    TEST_CASE("centered gaussian transforms to a positive gaussian")
    {
        const Grid g = make_grid(2, {12.0, 12.0, 0}, {128, 128, 1});
        const SpectralField s = forward_transform(gaussian_unnormalized(g));
        // fhat(xi) = 2 pi exp(-|xi|^2/2) for the 2d unit gaussian
        for (int i : {0, 1, 5, 120}) // includes the negative-frequency half
            for (int j : {0, 3, 64, 127}) {
                const double k2 = g.k[0][i] * g.k[0][i] + g.k[1][j] * g.k[1][j];
                const cdouble got = s.c[static_cast<std::size_t>(i) * 128 + j];
                CHECK(std::abs(got - 2.0 * M_PI * std::exp(-0.5 * k2)) < 1e-10);
            }
    }

    TEST_CASE("parseval on the discrete lattice")
    {
        const Grid g = make_grid(2, {8.0, 8.0, 0}, {64, 64, 1});
        RealField f = zeros_real(g);
        for (std::size_t i = 0; i < f.v.size(); ++i)
            f.v[i] = std::cos(0.41 * i) * std::exp(-1e-4 * (i % 977));
        std::vector<double> ones(g.size(), 1.0);
        double direct = 0.0;
        for (double x : f.v)
            direct += x * x;
        direct *= g.cell_volume();
        CHECK(spectral_quadratic_form(f, ones) == doctest::Approx(direct).epsilon(1e-12));
    }

    TEST_CASE("spectral derivative and kinetic form")
    {
        const Grid g = make_grid(2, {5.0, 5.0, 0}, {64, 64, 1});
        const double k1 = 3.0 * M_PI / 5.0, k2 = 2.0 * M_PI / 5.0; // lattice wavenumbers
        ComplexField f = zeros_complex(g);
        std::size_t i = 0;
        for (int a = 0; a < 64; ++a)
            for (int b = 0; b < 64; ++b, ++i)
                f.v[i] = std::sin(k1 * g.coord(0, a)) * std::cos(k2 * g.coord(1, b));
        const auto grad = gradient_spectral(f);
        double err = 0.0;
        i = 0;
        for (int a = 0; a < 64; ++a)
            for (int b = 0; b < 64; ++b, ++i) {
                const double dx = k1 * std::cos(k1 * g.coord(0, a)) * std::cos(k2 * g.coord(1, b));
                const double dy = -k2 * std::sin(k1 * g.coord(0, a)) * std::sin(k2 * g.coord(1, b));
                err = std::max(err, std::abs(grad[0].v[i] - dx));
                err = std::max(err, std::abs(grad[1].v[i] - dy));
            }
        CHECK(err < 1e-10);

        // two routes to int |grad f|^2
        double via_grad = 0.0;
        for (int a = 0; a < 2; ++a)
            for (const cdouble& z : grad[a].v)
                via_grad += std::norm(z);
        via_grad *= g.cell_volume();
        CHECK(kinetic_quadratic_form(f) == doctest::Approx(via_grad).epsilon(1e-12));

        // gaussian: int |grad e^{-r^2/2}|^2 = pi in 2d
        const Grid gg = make_grid(2, {10.0, 10.0, 0}, {96, 96, 1});
        CHECK(kinetic_quadratic_form(gaussian_unnormalized(gg)) ==
              doctest::Approx(M_PI).epsilon(1e-12));
    }

    TEST_CASE("multiplier application: |xi|^2 acts as the negative laplacian")
    {
        const Grid g = make_grid(2, {10.0, 10.0, 0}, {96, 96, 1});
        const ComplexField f = gaussian_unnormalized(g);
        const auto m = multiplier_table(
            g, [](double a, double b, double c) { return a * a + b * b + c * c; }, true);
        const ComplexField lap = apply_multiplier(f, m);
        double err = 0.0;
        std::size_t i = 0;
        for (int a = 0; a < 96; ++a)
            for (int b = 0; b < 96; ++b, ++i) {
                const double r2 =
                    g.coord(0, a) * g.coord(0, a) + g.coord(1, b) * g.coord(1, b);
                err = std::max(err, std::abs(lap.v[i] - (2.0 - r2) * std::exp(-0.5 * r2)));
            }
        CHECK(err < 1e-9);
    }

    TEST_CASE("spectral tail fraction separates smooth from marginal fields")
    {
        const Grid g = make_grid(1, {8.0, 0, 0}, {128, 1, 1});
        ComplexField smooth = zeros_complex(g);
        ComplexField rough = zeros_complex(g);
        const double khi = g.k[0][62]; // resolved mode just under the band edge
        for (int j = 0; j < 128; ++j) {
            const double x = g.coord(0, j);
            smooth.v[j] = std::exp(-0.5 * x * x);
            rough.v[j] = std::exp(cdouble(0.0, khi * x));
        }
        CHECK(spectral_tail_fraction(smooth, 0.875) < 1e-12);
        CHECK(spectral_tail_fraction(rough, 0.875) > 0.99);
    }

    TEST_CASE("stretched resampling agrees with the closed form")
    {
        const Grid g = make_grid(1, {8.0, 0, 0}, {64, 1, 1});
        const ComplexField f = gaussian_unnormalized(g);
        const ComplexField h = resample_stretched(f, {2.0, 1.0, 1.0});
        double err = 0.0;
        for (int j = 0; j < 64; ++j) {
            const double x = g.coord(0, j);
            const double want = std::fabs(2.0 * x) <= 8.0 ? std::exp(-2.0 * x * x) : 0.0;
            err = std::max(err, std::abs(h.v[j] - want));
        }
        CHECK(err < 1e-10);
    }

    TEST_CASE("field helpers")
    {
        const Grid g = make_grid(2, {4.0, 4.0, 0}, {32, 32, 1});
        ComplexField f = zeros_complex(g);
        for (std::size_t i = 0; i < f.v.size(); ++i)
            f.v[i] = cdouble(0.3, -0.4);
        CHECK(mass(f) == doctest::Approx(0.25 * 64.0).epsilon(1e-13));
        CHECK(norm_l2(f) == doctest::Approx(4.0).epsilon(1e-13));
        CHECK(max_abs(f) == doctest::Approx(0.5).epsilon(1e-15));
        scale(f, 2.0);
        CHECK(mass(f) == doctest::Approx(64.0).epsilon(1e-13));
        const RealField rho = density(f);
        CHECK(rho.v[7] == doctest::Approx(1.0).epsilon(1e-13));
    }
}
