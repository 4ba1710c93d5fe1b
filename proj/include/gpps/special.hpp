#pragma once

namespace gpps {

/* Scaled complementary error function exp(x^2) erfc(x) for x >= 0.
 * Direct product below the crossover, Lentz continued fraction above;
 * avoids the overflow of exp(x^2) and keeps relative accuracy ~1e-14
 * over the whole range (the plain product loses everything past x ~ 26). */
double erfcx(double x);

/* Scaled exponential integral exp(a) E1(a) for a > 0.
 * Power series for small a, even-form continued fraction otherwise. */
double e1_scaled(double a);

} // namespace gpps
