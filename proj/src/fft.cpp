#include "gpps/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace gpps {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

namespace {

/* Plan cache keyed by shape+direction.  FFTW_ESTIMATE keeps planning cheap
 * and run-to-run deterministic; FFTW_UNALIGNED lets the new-array execute
 * API run on whatever buffers callers hand in.  Distinct-array execution is
 * thread safe, only cache access needs the lock. */
std::map<std::tuple<int, int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(const Grid& g, int sign)
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    const auto key = std::make_tuple(g.points[0], g.points[1], g.points[2], sign);
    if (const auto it = plan_cache.find(key); it != plan_cache.end())
        return it->second;
    std::vector<cdouble> a(g.size()), b(g.size());
    int n[3] = {g.points[0], g.points[1], g.points[2]};
    fftw_plan p = fftw_plan_dft(3, n,
                                reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(b.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p)
        throw std::runtime_error("fftw planning failed");
    plan_cache.emplace(key, p);
    return p;
}

void run_fft(const Grid& g, const cdouble* in, cdouble* out, int sign)
{
    fftw_execute_dft(get_plan(g, sign),
                     reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

// (-1)^(k0+k1+k2) over FFT indices; equals exp(-i xi_k . x0), x0 = -L
inline double corner_sign(int k0, int k1, int k2)
{
    return ((k0 + k1 + k2) & 1) ? -1.0 : 1.0;
}

template <class Fn>
void for_each_mode(const Grid& g, Fn&& fn)
{
    std::size_t i = 0;
    for (int k0 = 0; k0 < g.points[0]; ++k0)
        for (int k1 = 0; k1 < g.points[1]; ++k1)
            for (int k2 = 0; k2 < g.points[2]; ++k2, ++i)
                fn(i, k0, k1, k2);
}

} // namespace

SpectralField forward_transform(const ComplexField& f)
{
    const Grid& g = f.grid;
    SpectralField out{g, std::vector<cdouble>(g.size())};
    run_fft(g, f.v.data(), out.c.data(), FFTW_FORWARD);
    const double hvol = g.cell_volume();
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        out.c[i] *= hvol * corner_sign(k0, k1, k2);
    });
    return out;
}

ComplexField inverse_transform(const SpectralField& s)
{
    const Grid& g = s.grid;
    std::vector<cdouble> tmp(g.size());
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        tmp[i] = s.c[i] * corner_sign(k0, k1, k2);
    });
    ComplexField out{g, std::vector<cdouble>(g.size())};
    run_fft(g, tmp.data(), out.v.data(), FFTW_BACKWARD);
    const double inv = 1.0 / (g.size() * g.cell_volume()); // prod (2 L_a)
    for (cdouble& x : out.v) x *= inv;
    return out;
}

ComplexField apply_multiplier(const ComplexField& f, const std::vector<double>& m)
{
    const Grid& g = f.grid;
    if (m.size() != g.size())
        throw std::invalid_argument("apply_multiplier: table size mismatch");
    std::vector<cdouble> hat(g.size());
    run_fft(g, f.v.data(), hat.data(), FFTW_FORWARD);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= m[i];
    ComplexField out{g, std::vector<cdouble>(g.size())};
    run_fft(g, hat.data(), out.v.data(), FFTW_BACKWARD);
    const double inv = 1.0 / g.size();
    for (cdouble& x : out.v) x *= inv;
    return out;
}

ComplexField apply_multiplier(const ComplexField& f, const std::vector<cdouble>& m)
{
    const Grid& g = f.grid;
    if (m.size() != g.size())
        throw std::invalid_argument("apply_multiplier: table size mismatch");
    std::vector<cdouble> hat(g.size());
    run_fft(g, f.v.data(), hat.data(), FFTW_FORWARD);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= m[i];
    ComplexField out{g, std::vector<cdouble>(g.size())};
    run_fft(g, hat.data(), out.v.data(), FFTW_BACKWARD);
    const double inv = 1.0 / g.size();
    for (cdouble& x : out.v) x *= inv;
    return out;
}

RealField apply_multiplier_real(const RealField& f, const std::vector<double>& m)
{
    ComplexField c = apply_multiplier(to_complex(f), m);
    // real in, real even multiplier out: imaginary residue is roundoff
    return real_part(c);
}

std::vector<double> multiplier_table(const Grid& g,
                                     const std::function<double(double, double, double)>& m,
                                     bool use_derivative_table)
{
    const auto& t = use_derivative_table ? g.kd : g.k;
    std::vector<double> out(g.size());
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        out[i] = m(t[0][k0], t[1][k1], t[2][k2]);
    });
    return out;
}

std::vector<ComplexField> gradient_spectral(const ComplexField& f)
{
    const Grid& g = f.grid;
    std::vector<cdouble> hat(g.size());
    run_fft(g, f.v.data(), hat.data(), FFTW_FORWARD);
    std::vector<ComplexField> grad;
    grad.reserve(g.dim);
    const double inv = 1.0 / g.size();
    std::vector<cdouble> tmp(g.size());
    for (int a = 0; a < g.dim; ++a) {
        for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
            const int ka = (a == 0) ? k0 : (a == 1 ? k1 : k2);
            tmp[i] = hat[i] * cdouble(0.0, g.kd[a][ka]);
        });
        ComplexField d{g, std::vector<cdouble>(g.size())};
        run_fft(g, tmp.data(), d.v.data(), FFTW_BACKWARD);
        for (cdouble& x : d.v) x *= inv;
        grad.push_back(std::move(d));
    }
    return grad;
}

std::vector<RealField> gradient_spectral(const RealField& f)
{
    auto gc = gradient_spectral(to_complex(f));
    std::vector<RealField> out;
    out.reserve(gc.size());
    for (auto& c : gc) out.push_back(real_part(c));
    return out;
}

double kinetic_quadratic_form(const ComplexField& f)
{
    const Grid& g = f.grid;
    std::vector<cdouble> hat(g.size());
    run_fft(g, f.v.data(), hat.data(), FFTW_FORWARD);
    double s = 0.0;
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        const double kx = g.kd[0][k0], ky = g.kd[1][k1], kz = g.kd[2][k2];
        s += (kx * kx + ky * ky + kz * kz) * std::norm(hat[i]);
    });
    return s * g.cell_volume() / g.size();
}

double spectral_quadratic_form(const RealField& f, const std::vector<double>& m)
{
    const Grid& g = f.grid;
    if (m.size() != g.size())
        throw std::invalid_argument("spectral_quadratic_form: table size mismatch");
    std::vector<cdouble> in(g.size()), hat(g.size());
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = f.v[i];
    run_fft(g, in.data(), hat.data(), FFTW_FORWARD);
    double s = 0.0;
    for (std::size_t i = 0; i < hat.size(); ++i) s += m[i] * std::norm(hat[i]);
    return s * g.cell_volume() / g.size();
}

namespace {

// dense per-axis resampling matrix: physical samples -> interpolant at x'_j
std::vector<cdouble> resample_matrix(const Grid& g, int axis, double stretch)
{
    const int N = g.points[axis];
    const double L = g.half_extent[axis];
    std::vector<cdouble> R(static_cast<std::size_t>(N) * N, cdouble(0.0));
    for (int j = 0; j < N; ++j) {
        const double xp = stretch * g.coord(axis, j);
        if (std::fabs(xp) > L)
            continue; // masked later anyway, keep rows zero
        for (int j0 = 0; j0 < N; ++j0) {
            cdouble s = 0.0;
            for (int k = 0; k < N; ++k) {
                const double phase = g.k[axis][k] * (xp + L) - 2.0 * M_PI * j0 * k / N;
                s += cdouble(std::cos(phase), std::sin(phase));
            }
            R[static_cast<std::size_t>(j) * N + j0] = s / static_cast<double>(N);
        }
    }
    return R;
}

} // namespace

ComplexField resample_stretched(const ComplexField& f, std::array<double, 3> stretch)
{
    const Grid& g = f.grid;
    ComplexField out = f;
    const int n[3] = {g.points[0], g.points[1], g.points[2]};
    for (int a = 0; a < g.dim; ++a) {
        const double s = stretch[a];
        if (s == 1.0)
            continue;
        ComplexField next = zeros_complex(g);
        const long si = std::lround(s);
        const bool exact = s >= 1.0 && std::fabs(s - si) < 1e-12;
        // strides for walking axis a with the other two fixed
        const long stride = (a == 0) ? static_cast<long>(n[1]) * n[2]
                          : (a == 1) ? n[2] : 1;
        const long outer = static_cast<long>(g.size()) / n[a];
        std::vector<cdouble> R;
        if (!exact)
            R = resample_matrix(g, a, s);
        for (long o = 0; o < outer; ++o) {
            // base offset of the 1d line: o enumerates the two frozen indices
            long base;
            if (a == 0) {
                base = o; // (iy, iz) pair, lines strided by n1*n2
            } else if (a == 1) {
                const long ix = o / n[2], iz = o % n[2];
                base = ix * static_cast<long>(n[1]) * n[2] + iz;
            } else {
                base = o * static_cast<long>(n[2]); // (ix, iy) pair, contiguous lines
            }
            if (exact) {
                for (int j = 0; j < n[a]; ++j) {
                    const long jp = si * j - (si - 1) * (n[a] / 2);
                    if (jp >= 0 && jp < n[a])
                        next.v[base + j * stride] = out.v[base + jp * stride];
                }
            } else {
                for (int j = 0; j < n[a]; ++j) {
                    cdouble acc = 0.0;
                    const cdouble* row = R.data() + static_cast<std::size_t>(j) * n[a];
                    for (int j0 = 0; j0 < n[a]; ++j0)
                        acc += row[j0] * out.v[base + j0 * stride];
                    next.v[base + j * stride] = acc;
                }
            }
        }
        out = std::move(next);
    }
    // zero everything whose stretched argument left the box
    std::size_t i = 0;
    for (int ix = 0; ix < n[0]; ++ix)
        for (int iy = 0; iy < n[1]; ++iy)
            for (int iz = 0; iz < n[2]; ++iz, ++i) {
                const int idx[3] = {ix, iy, iz};
                for (int a = 0; a < g.dim; ++a)
                    if (std::fabs(stretch[a] * g.coord(a, idx[a])) > g.half_extent[a]) {
                        out.v[i] = 0.0;
                        break;
                    }
            }
    return out;
}

double spectral_tail_fraction(const ComplexField& f, double frac)
{
    const Grid& g = f.grid;
    std::vector<cdouble> hat(g.size());
    run_fft(g, f.v.data(), hat.data(), FFTW_FORWARD);
    std::array<double, 3> cut{};
    for (int a = 0; a < g.dim; ++a)
        cut[a] = frac * M_PI * g.points[a] / (2.0 * g.half_extent[a]);
    double tail = 0.0, tot = 0.0;
    for_each_mode(g, [&](std::size_t i, int k0, int k1, int k2) {
        const double w = std::norm(hat[i]);
        tot += w;
        const bool high = (g.dim > 0 && std::fabs(g.k[0][k0]) >= cut[0]) ||
                          (g.dim > 1 && std::fabs(g.k[1][k1]) >= cut[1]) ||
                          (g.dim > 2 && std::fabs(g.k[2][k2]) >= cut[2]);
        if (high) tail += w;
    });
    return tot > 0.0 ? tail / tot : 0.0;
}

} // namespace gpps
