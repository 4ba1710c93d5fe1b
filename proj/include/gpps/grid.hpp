#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace gpps {

using cdouble = std::complex<double>;

/* Uniform periodic grid on the box prod_a [-L_a, L_a), N_a points per axis,
 * N_a even.  Axis a carries wavenumbers pi*j/L_a with j in {0,..,N/2-1,
 * -N/2,..,-1} in FFT storage order, so there is exactly one zero mode and the
 * single unpaired Nyquist mode sits at j = -N/2.  Two tables per axis:
 *   k[a]  - full table, Nyquist kept (even-power multipliers, symbols)
 *   kd[a] - derivative table, Nyquist zeroed so d/dx maps real to real.
 */
struct Grid {
    int dim = 0;
    std::array<double, 3> half_extent{0.0, 0.0, 0.0};
    std::array<int, 3> points{1, 1, 1};
    std::array<double, 3> spacing{0.0, 0.0, 0.0};
    std::array<std::vector<double>, 3> k;
    std::array<std::vector<double>, 3> kd;

    std::size_t size() const
    {
        return static_cast<std::size_t>(points[0]) * points[1] * points[2];
    }
    double cell_volume() const
    {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= spacing[a];
        return v;
    }
    // coordinate of index j along axis a: -L + j*h
    double coord(int a, int j) const { return -half_extent[a] + j * spacing[a]; }

    bool operator==(const Grid& o) const
    {
        return dim == o.dim && half_extent == o.half_extent && points == o.points;
    }
};

Grid make_grid(int dim, std::array<double, 3> half_extent, std::array<int, 3> points);

struct ComplexField {
    Grid grid;
    std::vector<cdouble> v;
};
using Wavefunction = ComplexField;

struct RealField {
    Grid grid;
    std::vector<double> v;
};

/* DFT coefficients scaled to approximate fhat(xi) = int f exp(-i xi.x) dx,
 * stored in FFT index order. */
struct SpectralField {
    Grid grid;
    std::vector<cdouble> c;
};

ComplexField zeros_complex(const Grid& g);
RealField zeros_real(const Grid& g);
ComplexField to_complex(const RealField& f);
RealField density(const ComplexField& psi); // |psi|^2
RealField real_part(const ComplexField& f);

// rectangle rule, h^d weights; spectrally accurate for resolved fields
double integrate(const RealField& f);
cdouble integrate(const ComplexField& f);
double mass(const ComplexField& psi);       // int |psi|^2
double norm_l2(const ComplexField& psi);    // sqrt(mass)
double max_abs(const ComplexField& f);
void scale(ComplexField& f, double s);

// fraction of |f|^2 outside the centered half-box (resolution guard)
double mass_outside_half_box(const ComplexField& psi);

} // namespace gpps
