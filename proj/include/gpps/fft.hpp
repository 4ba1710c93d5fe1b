#pragma once

#include "gpps/grid.hpp"

#include <functional>
#include <mutex>

namespace gpps {

/* Forward/inverse transforms in the integral-approximation scaling:
 *   fhat_k = h^d (-1)^{k1+..+kd} FFT[f]_k,   f = (2L)^{-d} IFFT[(-1)^k fhat].
 * The alternating sign is the phase exp(-i xi_k . x0) for the box starting
 * at x0 = -L; with it a centered Gaussian transforms to a positive Gaussian. */
SpectralField forward_transform(const ComplexField& f);
ComplexField inverse_transform(const SpectralField& s);

/* FFT -> pointwise multiply -> IFFT/N^d.  The multiplier is supplied per
 * spectral index (FFT order); phases cancel so none are applied.  The complex
 * overload serves odd (i*xi-type) symbols. */
ComplexField apply_multiplier(const ComplexField& f, const std::vector<double>& m);
ComplexField apply_multiplier(const ComplexField& f, const std::vector<cdouble>& m);
RealField apply_multiplier_real(const RealField& f, const std::vector<double>& m);

/* Build a multiplier table from a function of the wavenumber vector.
 * use_derivative_table selects the Nyquist-zeroed tables. */
std::vector<double> multiplier_table(const Grid& g,
                                     const std::function<double(double, double, double)>& m,
                                     bool use_derivative_table = false);

// spectral derivative along each axis, Nyquist row zeroed
std::vector<ComplexField> gradient_spectral(const ComplexField& f);
std::vector<RealField> gradient_spectral(const RealField& f);

// int |grad f|^2 evaluated spectrally (same derivative convention)
double kinetic_quadratic_form(const ComplexField& f);

// (2pi)^{-d} int m(xi) |fhat|^2 dxi on the discrete lattice
double spectral_quadratic_form(const RealField& f, const std::vector<double>& m);

// fraction of spectral mass with any |k_a| >= frac * k_max,a (alarm probe)
double spectral_tail_fraction(const ComplexField& f, double frac);

/* Sample f at the stretched points x * stretch[a] per axis, zero where the
 * argument leaves the box.  Integer stretch factors resolve to exact index
 * decimation; otherwise the trigonometric interpolant is evaluated axis by
 * axis (spectrally accurate for resolved fields, O(N^3) per axis). */
ComplexField resample_stretched(const ComplexField& f, std::array<double, 3> stretch);

/* FFTW's planner is a single non-reentrant global; every fftw_plan_* /
 * fftw_destroy_plan call anywhere in the process must hold this lock.
 * Executing distinct plans on distinct arrays is safe concurrently. */
std::mutex& planner_mutex();

} // namespace gpps
