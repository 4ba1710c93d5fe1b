#include "doctest.h"

#include "gpps/quadrature.hpp"
#include "gpps/special.hpp"

#include <cmath>

using namespace gpps;

TEST_SUITE("special")
{
    // erfcx(x) = (2/sqrt(pi)) int_0^inf exp(-t^2 - 2xt) dt; the integrand
    // decays within t <~ 40/(1+x), so a truncated adaptive pass is exact
    // to the tolerance
    static double erfcx_integral(double x)
    {
        const double cut = 40.0 / (1.0 + x);
        const double val = adaptive_simpson(
            [x](double t) { return std::exp(-t * t - 2.0 * x * t); }, 0.0, cut, 1e-14);
        return 2.0 / std::sqrt(M_PI) * val;
    }

    TEST_CASE("erfcx matches its integral representation")
    {
        CHECK(erfcx(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        for (double x : {1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
            CHECK(erfcx(x) == doctest::Approx(erfcx_integral(x)).epsilon(1e-12));
    }

    TEST_CASE("erfcx asymptotics survive the continued-fraction switch")
    {
        // 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6)) past any crossover
        for (double x : {30.0, 100.0, 1e4, 1e8}) {
            const double u = 1.0 / (2.0 * x * x);
            const double series =
                (1.0 - u * (1.0 - 3.0 * u * (1.0 - 5.0 * u))) / (x * std::sqrt(M_PI));
            CHECK(erfcx(x) == doctest::Approx(series).epsilon(1e-12));
        }
        // monotone decreasing
        double prev = erfcx(0.0);
        for (double x = 0.25; x < 50.0; x += 0.25) {
            const double v = erfcx(x);
            CHECK(v < prev);
            prev = v;
        }
    }

    // e^a E1(a) = int_0^inf e^-u/(u+a) du
    static double e1_scaled_integral(double a)
    {
        return adaptive_simpson([a](double u) { return std::exp(-u) / (u + a); }, 0.0, 60.0,
                                1e-15);
    }

    TEST_CASE("e1_scaled matches its integral representation")
    {
        for (double a : {1e-4, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 50.0})
            CHECK(e1_scaled(a) == doctest::Approx(e1_scaled_integral(a)).epsilon(1e-12));
    }

    TEST_CASE("e1_scaled brackets 1/(a+1) < e^a E1(a) < 1/a")
    {
        for (double a : {1e-6, 1e-3, 0.3, 1.0, 7.0, 1e3, 1e8}) {
            const double v = e1_scaled(a);
            CHECK(v > 1.0 / (a + 1.0));
            CHECK(v < 1.0 / a);
        }
    }
}
