#include "gpps/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpps {

namespace {
constexpr double inv_sqrt_pi = 0.56418958354775628694807945156077;
}

double erfcx(double x)
{
    if (!(x >= 0.0))
        throw std::invalid_argument("erfcx: argument must be >= 0");

    if (x < 2.5) {
        // exp(x^2) stays small here, no cancellation in the product
        return std::exp(x * x) * std::erfc(x);
    }

    /* sqrt(pi) e^{x^2} erfc(x) = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
     * modified Lentz; partial numerators n/2 over constant denominators x. */
    const double tiny = 1e-300;
    double f = x, c = f, d = 0.0;
    for (int n = 1; n < 200; ++n) {
        const double a = 0.5 * n;
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            break;
    }
    return inv_sqrt_pi / f;
}

double e1_scaled(double a)
{
    if (!(a > 0.0))
        throw std::invalid_argument("e1_scaled: argument must be > 0");

    if (a <= 1.0) {
        // E1(a) = -gamma - ln a + sum_{k>=1} (-1)^{k+1} a^k / (k k!)
        constexpr double euler_gamma = 0.57721566490153286060651209008240;
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -a / k;
            const double add = -term / k; // (-1)^{k+1} a^k/(k k!)
            sum += add;
            if (std::fabs(add) < 1e-18 * std::fabs(sum))
                break;
        }
        return std::exp(a) * (-euler_gamma - std::log(a) + sum);
    }

    /* even contraction of the Stieltjes fraction:
     * e^a E1(a) = 1/(a+1 - 1/(a+3 - 4/(a+5 - 9/(a+7 - ...)))) */
    const double tiny = 1e-300;
    double b = a + 1.0;
    double f = b, c = f, d = 0.0;
    for (int n = 1; n < 300; ++n) {
        const double an = -static_cast<double>(n) * n;
        b += 2.0;
        d = b + an * d;
        if (d == 0.0) d = tiny;
        c = b + an / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            break;
    }
    return 1.0 / f;
}

} // namespace gpps
