#pragma once

#include "gpps/grid.hpp"

namespace gpps {

// unit dipole orientation; constructor normalizes and rejects the zero vector
struct DipoleAxis {
    double n1 = 0.0, n2 = 0.0, n3 = 1.0;
    DipoleAxis() = default;
    DipoleAxis(double a, double b, double c);
};

enum class SymbolKind {
    Dip3D,         // -1 + 3 (n.xi)^2/|xi|^2, zero mode 0
    U2dEps,        // Uhat_eps^2d(|xi|), zero mode 0 by convention
    FracPoisson2D, // 1/|xi|, zero mode 0
    U1dEps,        // Uhat_eps^1d(xi), zero mode: finite limit not needed, 0
    Aniso2D,       // n_xi(xi) = (n1 xi1 + n2 xi2)^2 - n3^2 |xi|^2
    Riesz2D,       // i xi_a / |xi|
    TEpsAlpha,     // i xi_a Uhat_eps^2d(|xi|)
    RescaledDip3D, // (n.D xi)^2/|D xi|^2 with axis rescaling D (thin-layer forms)
};

struct SymbolParams {
    DipoleAxis axis;
    double eps = 1.0;
    int component = 0;                         // Riesz2D / TEpsAlpha
    std::array<double, 3> rescale{1.0, 1.0, 1.0}; // RescaledDip3D diag
};

// multiplier table in FFT index order, bound to the grid it was built on
struct KernelSymbol {
    SymbolKind kind;
    Grid grid;
    std::vector<cdouble> table;
};

KernelSymbol build_symbol(const Grid& g, SymbolKind kind, const SymbolParams& p);

// pointwise closed forms
double symbol_dip3d(double xi1, double xi2, double xi3, const DipoleAxis& n);
double symbol_u2d(double r, double eps);      // erfcx(eps r/sqrt2)/r, r > 0
double symbol_u1d(double xi, double eps);     // sqrt2 eps/sqrt(pi) e^a E1(a), a = eps^2 xi^2/2
double symbol_aniso2d(double xi1, double xi2, const DipoleAxis& n);

/* Independent evaluations of the defining integrals by adaptive quadrature
 * (audit path; also drives the kernel-check report):
 *   u2d: (2/(pi r)) int_0^{pi/2} exp(-(eps^2 r^2/2) tan^2 t) dt
 *   u1d: int_0^inf exp(-a(e^w - 1)) dw,  a = eps^2 xi^2/2, times sqrt2 eps/sqrt(pi)
 */
double symbol_u2d_quadrature(double r, double eps, double rel_tol = 1e-11);
double symbol_u1d_quadrature(double xi, double eps, double rel_tol = 1e-11);

// physical-space quasi-1d kernel U_eps(z) = erfcx(|z|/(sqrt2 eps))
double kernel_u1d_physical(double z, double eps);

/* Nonlocal terms of the effective models, as real Fourier multipliers on a
 * density.  Spectral coefficients:
 *   2dI : -n_xi(xi) Uhat_eps^2d(|xi|) rhohat
 *   2dII: -n_xi(xi) / |xi|           rhohat
 *   1d  : -xi^2 Uhat_eps^1d(xi)      rhohat
 *   3d  : ((beta-lambda) + 3 lambda (n.xi)^2/|xi|^2) rhohat, zero mode beta-lambda
 */
RealField apply_nonlocal_2dI(const RealField& rho, const DipoleAxis& n, double eps);
RealField apply_nonlocal_2dII(const RealField& rho, const DipoleAxis& n);
RealField apply_nonlocal_1d(const RealField& rho, double eps);
RealField apply_dipolar_3d(const RealField& rho, const DipoleAxis& n,
                           double beta, double lambda);

// T^eps_a = i xi_a Uhat_eps^2d and its eps -> 0 limit R_a = i xi_a/|xi|
RealField t_eps_alpha(const RealField& f, double eps, int alpha);
RealField riesz_alpha(const RealField& f, int alpha);

// real multiplier tables (cached by the model layer)
std::vector<double> nonlocal_table_2dI(const Grid& g, const DipoleAxis& n, double eps);
std::vector<double> nonlocal_table_2dII(const Grid& g, const DipoleAxis& n);
std::vector<double> nonlocal_table_1d(const Grid& g, double eps);
std::vector<double> dipolar_table_3d(const Grid& g, const DipoleAxis& n,
                                     double beta, double lambda);

} // namespace gpps
