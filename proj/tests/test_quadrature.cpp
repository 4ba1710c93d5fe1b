#include "doctest.h"

#include "gpps/quadrature.hpp"

#include <cmath>
#include <vector>

using namespace gpps;

TEST_SUITE("quadrature")
{
    TEST_CASE("adaptive simpson on smooth integrands")
    {
        CHECK(adaptive_simpson([](double x) { return x * x * x * x; }, 0.0, 1.0, 1e-12) ==
              doctest::Approx(0.2).epsilon(1e-11));
        CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
              doctest::Approx(2.0).epsilon(1e-11));
        // sharp interior peak forces genuine refinement
        const double v = adaptive_simpson(
            [](double x) { return std::exp(-400.0 * (x - 0.3) * (x - 0.3)); }, 0.0, 1.0, 1e-12);
        CHECK(v == doctest::Approx(std::sqrt(M_PI) / 20.0).epsilon(1e-9));
    }

    TEST_CASE("adaptive simpson refuses an exhausted budget")
    {
        CHECK_THROWS_AS(adaptive_simpson([](double x) { return std::sin(200.0 / (x + 1e-3)); },
                                         0.0, 1.0, 1e-14, 3),
                        std::runtime_error);
    }

    TEST_CASE("gauss-legendre nodes/weights")
    {
        const int n = 16;
        std::vector<double> x(n), w(n);
        gauss_legendre(n, -1.0, 1.0, x.data(), w.data());
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            sum += w[i];
            CHECK(x[i] == doctest::Approx(-x[n - 1 - i]).epsilon(1e-13)); // symmetric
        }
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));

        // exact for polynomials up to degree 2n-1 = 31
        for (int k : {2, 10, 24, 30, 31}) {
            double q = 0.0;
            for (int i = 0; i < n; ++i)
                q += w[i] * std::pow(x[i], k);
            const double exact = (k % 2 == 0) ? 2.0 / (k + 1) : 0.0;
            CHECK(q == doctest::Approx(exact).epsilon(1e-12));
        }

        // mapped interval, cubic
        gauss_legendre(8, 2.0, 5.0, x.data(), w.data());
        double q3 = 0.0;
        for (int i = 0; i < 8; ++i)
            q3 += w[i] * x[i] * x[i] * x[i];
        CHECK(q3 == doctest::Approx((625.0 - 16.0) / 4.0).epsilon(1e-13));
    }
}
