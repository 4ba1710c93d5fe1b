#pragma once

#include <cmath>
#include <stdexcept>

namespace gpps {

/* Adaptive Simpson on [a,b] with absolute/relative tolerance mix.
 * Depth-limited recursion; throws if the budget is exhausted before the
 * local error estimate falls under tol (never returns a silent bad value). */
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 60)
{
    struct Rec {
        static double run(F& f, double a, double m, double b,
                          double fa, double fm, double fb,
                          double whole, double tol, int depth)
        {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double err = left + right - whole;
            if (std::fabs(err) <= 15.0 * tol)
                return left + right + err / 15.0;
            if (depth <= 0)
                throw std::runtime_error("adaptive_simpson: depth exhausted");
            return run(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                 + run(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::run(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

/* Nodes/weights of the n-point Gauss-Legendre rule on [a,b].
 * Newton iteration on Legendre polynomials; n is small (<=128) everywhere
 * this is used, so no caching subtleties. */
void gauss_legendre(int n, double a, double b, double* nodes, double* weights);

} // namespace gpps
