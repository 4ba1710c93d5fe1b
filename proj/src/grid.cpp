#include "gpps/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace gpps {

Grid make_grid(int dim, std::array<double, 3> half_extent, std::array<int, 3> points)
{
    if (dim < 1 || dim > 3)
        throw std::invalid_argument("make_grid: dim must be 1, 2 or 3");
    Grid g;
    g.dim = dim;
    for (int a = 0; a < 3; ++a) {
        if (a >= dim) {
            g.half_extent[a] = 0.0;
            g.points[a] = 1;
            g.spacing[a] = 0.0;
            g.k[a] = {0.0};
            g.kd[a] = {0.0};
            continue;
        }
        const double L = half_extent[a];
        const int N = points[a];
        if (!(L > 0.0))
            throw std::invalid_argument("make_grid: half extent must be positive");
        if (N < 4 || N % 2 != 0)
            throw std::invalid_argument("make_grid: point count must be even and >= 4");
        g.half_extent[a] = L;
        g.points[a] = N;
        g.spacing[a] = 2.0 * L / N;
        g.k[a].resize(N);
        g.kd[a].resize(N);
        for (int j = 0; j < N; ++j) {
            const int js = (j < N / 2) ? j : j - N;
            g.k[a][j] = M_PI * js / L;
            g.kd[a][j] = (j == N / 2) ? 0.0 : g.k[a][j];
        }
    }
    return g;
}

ComplexField zeros_complex(const Grid& g) { return {g, std::vector<cdouble>(g.size())}; }
RealField zeros_real(const Grid& g) { return {g, std::vector<double>(g.size())}; }

ComplexField to_complex(const RealField& f)
{
    ComplexField out{f.grid, std::vector<cdouble>(f.v.size())};
    for (std::size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i];
    return out;
}

RealField density(const ComplexField& psi)
{
    RealField out{psi.grid, std::vector<double>(psi.v.size())};
    for (std::size_t i = 0; i < psi.v.size(); ++i) out.v[i] = std::norm(psi.v[i]);
    return out;
}

RealField real_part(const ComplexField& f)
{
    RealField out{f.grid, std::vector<double>(f.v.size())};
    for (std::size_t i = 0; i < f.v.size(); ++i) out.v[i] = f.v[i].real();
    return out;
}

double integrate(const RealField& f)
{
    double s = 0.0;
    for (double x : f.v) s += x;
    return s * f.grid.cell_volume();
}

cdouble integrate(const ComplexField& f)
{
    cdouble s = 0.0;
    for (const cdouble& x : f.v) s += x;
    return s * f.grid.cell_volume();
}

double mass(const ComplexField& psi)
{
    double s = 0.0;
    for (const cdouble& x : psi.v) s += std::norm(x);
    return s * psi.grid.cell_volume();
}

double norm_l2(const ComplexField& psi) { return std::sqrt(mass(psi)); }

double max_abs(const ComplexField& f)
{
    double m = 0.0;
    for (const cdouble& x : f.v) m = std::max(m, std::abs(x));
    return m;
}

void scale(ComplexField& f, double s)
{
    for (cdouble& x : f.v) x *= s;
}

double mass_outside_half_box(const ComplexField& psi)
{
    const Grid& g = psi.grid;
    double out = 0.0, tot = 0.0;
    std::size_t i = 0;
    for (int ix = 0; ix < g.points[0]; ++ix)
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                const double w = std::norm(psi.v[i]);
                tot += w;
                const bool outside =
                    (g.dim > 0 && std::fabs(g.coord(0, ix)) > 0.5 * g.half_extent[0]) ||
                    (g.dim > 1 && std::fabs(g.coord(1, iy)) > 0.5 * g.half_extent[1]) ||
                    (g.dim > 2 && std::fabs(g.coord(2, iz)) > 0.5 * g.half_extent[2]);
                if (outside) out += w;
            }
    return tot > 0.0 ? out / tot : 0.0;
}

} // namespace gpps
