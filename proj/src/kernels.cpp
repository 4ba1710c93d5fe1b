#include "gpps/kernels.hpp"

#include "gpps/fft.hpp"
#include "gpps/quadrature.hpp"
#include "gpps/special.hpp"

#include <cmath>
#include <stdexcept>

namespace gpps {

namespace {
constexpr double sqrt2 = 1.4142135623730950488;
constexpr double sqrt_pi = 1.7724538509055160273;

void require_dim(const Grid& g, int dim, const char* who)
{
    if (g.dim != dim)
        throw std::invalid_argument(std::string(who) + ": wrong grid dimension");
}
} // namespace

DipoleAxis::DipoleAxis(double a, double b, double c)
{
    const double r = std::sqrt(a * a + b * b + c * c);
    if (!(r > 0.0))
        throw std::invalid_argument("DipoleAxis: zero vector");
    n1 = a / r;
    n2 = b / r;
    n3 = c / r;
}

double symbol_dip3d(double xi1, double xi2, double xi3, const DipoleAxis& n)
{
    const double q2 = xi1 * xi1 + xi2 * xi2 + xi3 * xi3;
    if (q2 == 0.0)
        return 0.0;
    const double nd = n.n1 * xi1 + n.n2 * xi2 + n.n3 * xi3;
    return -1.0 + 3.0 * nd * nd / q2;
}

double symbol_u2d(double r, double eps)
{
    if (!(r > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("symbol_u2d: needs r > 0, eps > 0");
    return erfcx(eps * r / sqrt2) / r;
}

double symbol_u1d(double xi, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("symbol_u1d: needs eps > 0");
    const double a = 0.5 * eps * eps * xi * xi;
    if (a == 0.0)
        throw std::invalid_argument("symbol_u1d: xi = 0 is logarithmically divergent");
    return sqrt2 * eps / sqrt_pi * e1_scaled(a);
}

double symbol_aniso2d(double xi1, double xi2, const DipoleAxis& n)
{
    const double np = n.n1 * xi1 + n.n2 * xi2;
    return np * np - n.n3 * n.n3 * (xi1 * xi1 + xi2 * xi2);
}

double symbol_u2d_quadrature(double r, double eps, double rel_tol)
{
    if (!(r > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("symbol_u2d_quadrature: needs r > 0, eps > 0");
    const double c = 0.5 * eps * eps * r * r;
    auto f = [c](double t) {
        const double tn = std::tan(t);
        const double e = c * tn * tn;
        return e > 745.0 ? 0.0 : std::exp(-e);
    };
    // scale estimate from both asymptotics so the absolute tolerance tracks
    // the answer for c anywhere in [1e-13, 1e12]
    const double est = std::min(M_PI / 2.0, 0.5 * std::sqrt(M_PI / std::max(c, 1e-300)));
    const double integral = adaptive_simpson(f, 0.0, M_PI / 2.0, rel_tol * est);
    return 2.0 / (M_PI * r) * integral;
}

double symbol_u1d_quadrature(double xi, double eps, double rel_tol)
{
    if (!(eps > 0.0) || xi == 0.0)
        throw std::invalid_argument("symbol_u1d_quadrature: needs eps > 0, xi != 0");
    const double a = 0.5 * eps * eps * xi * xi;
    // e^a E1(a) = int_0^inf exp(-a(e^w - 1)) dw
    auto f = [a](double w) {
        const double e = a * std::expm1(w);
        return e > 745.0 ? 0.0 : std::exp(-e);
    };
    const double wmax = std::log1p(746.0 / a);
    const double est = (a < 1.0) ? -std::log(a) + 0.5 : 1.0 / a;
    const double integral = adaptive_simpson(f, 0.0, wmax, rel_tol * est);
    return sqrt2 * eps / sqrt_pi * integral;
}

double kernel_u1d_physical(double z, double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("kernel_u1d_physical: needs eps > 0");
    return erfcx(std::fabs(z) / (sqrt2 * eps));
}

KernelSymbol build_symbol(const Grid& g, SymbolKind kind, const SymbolParams& p)
{
    KernelSymbol s{kind, g, std::vector<cdouble>(g.size())};
    const DipoleAxis& n = p.axis;
    std::size_t i = 0;
    for (int k0 = 0; k0 < g.points[0]; ++k0)
        for (int k1 = 0; k1 < g.points[1]; ++k1)
            for (int k2 = 0; k2 < g.points[2]; ++k2, ++i) {
                const double x1 = g.k[0][k0], x2 = g.k[1][k1], x3 = g.k[2][k2];
                const double q2 = x1 * x1 + x2 * x2 + x3 * x3;
                const double r = std::sqrt(q2);
                // odd factors come from the derivative tables so the single
                // Nyquist mode stays inert and real fields stay real
                const double d1 = g.kd[0][k0], d2 = g.kd[1][k1], d3 = g.kd[2][k2];
                const double da = (p.component == 0) ? d1 : (p.component == 1 ? d2 : d3);
                switch (kind) {
                case SymbolKind::Dip3D:
                    s.table[i] = symbol_dip3d(x1, x2, x3, n);
                    break;
                case SymbolKind::U2dEps:
                    s.table[i] = (r > 0.0) ? symbol_u2d(r, p.eps) : 0.0;
                    break;
                case SymbolKind::FracPoisson2D:
                    s.table[i] = (r > 0.0) ? 1.0 / r : 0.0;
                    break;
                case SymbolKind::U1dEps:
                    s.table[i] = (x1 != 0.0) ? symbol_u1d(x1, p.eps) : 0.0;
                    break;
                case SymbolKind::Aniso2D:
                    s.table[i] = symbol_aniso2d(x1, x2, n);
                    break;
                case SymbolKind::Riesz2D:
                    s.table[i] = (r > 0.0) ? cdouble(0.0, da / r) : 0.0;
                    break;
                case SymbolKind::TEpsAlpha:
                    s.table[i] = (r > 0.0) ? cdouble(0.0, da * symbol_u2d(r, p.eps)) : 0.0;
                    break;
                case SymbolKind::RescaledDip3D: {
                    const double y1 = x1 * p.rescale[0], y2 = x2 * p.rescale[1],
                                 y3 = x3 * p.rescale[2];
                    const double qq = y1 * y1 + y2 * y2 + y3 * y3;
                    const double nd = n.n1 * y1 + n.n2 * y2 + n.n3 * y3;
                    s.table[i] = (qq > 0.0) ? nd * nd / qq : 0.0;
                    break;
                }
                }
            }
    return s;
}

std::vector<double> nonlocal_table_2dI(const Grid& g, const DipoleAxis& n, double eps)
{
    require_dim(g, 2, "nonlocal_table_2dI");
    return multiplier_table(g, [&](double x1, double x2, double) {
        const double r = std::hypot(x1, x2);
        if (r == 0.0) return 0.0;
        return -symbol_aniso2d(x1, x2, n) * symbol_u2d(r, eps);
    });
}

std::vector<double> nonlocal_table_2dII(const Grid& g, const DipoleAxis& n)
{
    require_dim(g, 2, "nonlocal_table_2dII");
    return multiplier_table(g, [&](double x1, double x2, double) {
        const double r = std::hypot(x1, x2);
        if (r == 0.0) return 0.0;
        return -symbol_aniso2d(x1, x2, n) / r;
    });
}

std::vector<double> nonlocal_table_1d(const Grid& g, double eps)
{
    require_dim(g, 1, "nonlocal_table_1d");
    return multiplier_table(g, [&](double x1, double, double) {
        if (x1 == 0.0) return 0.0;
        return -x1 * x1 * symbol_u1d(x1, eps);
    });
}

std::vector<double> dipolar_table_3d(const Grid& g, const DipoleAxis& n,
                                     double beta, double lambda)
{
    require_dim(g, 3, "dipolar_table_3d");
    return multiplier_table(g, [&](double x1, double x2, double x3) {
        const double q2 = x1 * x1 + x2 * x2 + x3 * x3;
        if (q2 == 0.0) return beta - lambda;
        const double nd = n.n1 * x1 + n.n2 * x2 + n.n3 * x3;
        return (beta - lambda) + 3.0 * lambda * nd * nd / q2;
    });
}

RealField apply_nonlocal_2dI(const RealField& rho, const DipoleAxis& n, double eps)
{
    return apply_multiplier_real(rho, nonlocal_table_2dI(rho.grid, n, eps));
}

RealField apply_nonlocal_2dII(const RealField& rho, const DipoleAxis& n)
{
    return apply_multiplier_real(rho, nonlocal_table_2dII(rho.grid, n));
}

RealField apply_nonlocal_1d(const RealField& rho, double eps)
{
    return apply_multiplier_real(rho, nonlocal_table_1d(rho.grid, eps));
}

RealField apply_dipolar_3d(const RealField& rho, const DipoleAxis& n,
                           double beta, double lambda)
{
    return apply_multiplier_real(rho, dipolar_table_3d(rho.grid, n, beta, lambda));
}

RealField t_eps_alpha(const RealField& f, double eps, int alpha)
{
    require_dim(f.grid, 2, "t_eps_alpha");
    if (alpha < 0 || alpha > 1)
        throw std::invalid_argument("t_eps_alpha: component must be 0 or 1");
    SymbolParams p;
    p.eps = eps;
    p.component = alpha;
    const KernelSymbol s = build_symbol(f.grid, SymbolKind::TEpsAlpha, p);
    return real_part(apply_multiplier(to_complex(f), s.table));
}

RealField riesz_alpha(const RealField& f, int alpha)
{
    require_dim(f.grid, 2, "riesz_alpha");
    if (alpha < 0 || alpha > 1)
        throw std::invalid_argument("riesz_alpha: component must be 0 or 1");
    SymbolParams p;
    p.component = alpha;
    const KernelSymbol s = build_symbol(f.grid, SymbolKind::Riesz2D, p);
    return real_part(apply_multiplier(to_complex(f), s.table));
}

} // namespace gpps
