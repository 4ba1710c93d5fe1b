#include "gpps/dynamics.hpp"

#include "gpps/fft.hpp"
#include "gpps/ground_state.hpp"
#include "gpps/quadrature.hpp"
#include "gpps/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpps {

namespace {

constexpr double tail_alarm_frac = 0.875; // of k_max, per axis
constexpr double tail_alarm_level = 1e-8;
constexpr double blowup_peak_factor = 1e4;

void half_potential(const ModelOperator& op, ComplexField& psi, double dt_half)
{
    const RealField rho = density(psi);
    const RealField W = op.effective_potential_density(rho);
    const RealField& V = op.trap();
    for (std::size_t i = 0; i < psi.v.size(); ++i) {
        const double th = dt_half * (V.v[i] + W.v[i]);
        psi.v[i] *= cdouble(std::cos(th), -std::sin(th));
    }
}

std::vector<cdouble> kinetic_phase(const Grid& g, double dt)
{
    std::vector<cdouble> tab(g.size());
    std::size_t i = 0;
    for (int k0 = 0; k0 < g.points[0]; ++k0)
        for (int k1 = 0; k1 < g.points[1]; ++k1)
            for (int k2 = 0; k2 < g.points[2]; ++k2, ++i) {
                const double k2s = g.kd[0][k0] * g.kd[0][k0] + g.kd[1][k1] * g.kd[1][k1] +
                                   g.kd[2][k2] * g.kd[2][k2];
                const double th = 0.5 * dt * k2s;
                tab[i] = cdouble(std::cos(th), -std::sin(th));
            }
    return tab;
}

// max |psi|^2 and NaN in one pass
bool scan_peak(const ComplexField& psi, double& peak)
{
    peak = 0.0;
    bool ok = true;
    for (const cdouble& x : psi.v) {
        const double r = std::norm(x);
        if (!std::isfinite(r))
            ok = false;
        else if (r > peak)
            peak = r;
    }
    return ok;
}

RealField x_grad_v(const Grid& g, const PotentialSpec& spec)
{
    RealField out = zeros_real(g);
    using Kind = PotentialSpec::Kind;
    if (spec.kind == Kind::Zero)
        return out;
    if (spec.kind == Kind::Tabulated) {
        const RealField V = potential_field(g, spec);
        const auto grad = gradient_spectral(V);
        std::size_t i = 0;
        for (int ix = 0; ix < g.points[0]; ++ix)
            for (int iy = 0; iy < g.points[1]; ++iy)
                for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                    const int idx[3] = {ix, iy, iz};
                    double s = 0.0;
                    for (int a = 0; a < g.dim; ++a)
                        s += g.coord(a, idx[a]) * grad[a].v[i];
                    out.v[i] = s;
                }
        return out;
    }
    std::size_t i = 0;
    for (int ix = 0; ix < g.points[0]; ++ix)
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                const int idx[3] = {ix, iy, iz};
                double s = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    const double x = g.coord(a, idx[a]);
                    s += spec.gamma[a] * spec.gamma[a] * x * x;
                    if (spec.kind == Kind::HarmonicPlusLattice) {
                        const double q = spec.lattice_wavenumber[a];
                        s += spec.lattice_amplitude * q * x * std::sin(2.0 * q * x);
                    }
                }
                out.v[i] = s;
            }
    return out;
}

double dot_density(const RealField& rho, const RealField& w)
{
    double s = 0.0;
    for (std::size_t i = 0; i < rho.v.size(); ++i)
        s += rho.v[i] * w.v[i];
    return s * rho.grid.cell_volume();
}

struct Gl64 {
    static constexpr int n = 64;
    double x[n], w[n]; // on [0,1]
    Gl64() { gauss_legendre(n, 0.0, 1.0, x, w); }
};

/* int_R s^2 e^{-eps^2 s^2/2} / (r^2+s^2)^2 ds.  The tangent substitution
 * makes the integrand uniformly smooth for moderate eps*r (the bump sits at
 * theta=0 where the nodes cluster); for large eps*r the Gaussian confines s
 * and the direct form is the smooth one. */
double s_integral(double r, double eps)
{
    static const Gl64 gl;
    const double a = eps * r;
    double acc = 0.0;
    if (a < 8.0) {
        const double span = M_PI / 2.0;
        for (int i = 0; i < Gl64::n; ++i) {
            const double th = span * gl.x[i];
            const double t = std::tan(th);
            const double s = std::sin(th);
            acc += span * gl.w[i] * s * s * std::exp(-0.5 * a * a * t * t);
        }
        return 2.0 * acc / r;
    }
    const double span = 8.0 / eps;
    for (int i = 0; i < Gl64::n; ++i) {
        const double s = span * gl.x[i];
        const double d = r * r + s * s;
        acc += span * gl.w[i] * s * s * std::exp(-0.5 * eps * eps * s * s) / (d * d);
    }
    return 2.0 * acc;
}

} // namespace

std::string evolve_status_name(EvolveStatus s)
{
    switch (s) {
    case EvolveStatus::Ok: return "ok";
    case EvolveStatus::ResolutionAlarm: return "resolution_alarm";
    case EvolveStatus::BlowupSuspected: return "blowup_suspected";
    case EvolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "?";
}

ComplexField step_strang(const ModelOperator& op, const ComplexField& psi, double dt)
{
    if (!(dt > 0.0))
        throw std::invalid_argument("step_strang: dt must be positive");
    if (!(psi.grid == op.grid()))
        throw std::invalid_argument("step_strang: grid mismatch");
    ComplexField out = psi;
    half_potential(op, out, 0.5 * dt);
    out = apply_multiplier(out, kinetic_phase(out.grid, dt));
    half_potential(op, out, 0.5 * dt);
    return out;
}

ComplexField step_strang(const ModelParams& p, const ComplexField& psi, double dt)
{
    return step_strang(ModelOperator(p, psi.grid), psi, dt);
}

double variance(const ComplexField& psi)
{
    const Grid& g = psi.grid;
    double s = 0.0;
    std::size_t i = 0;
    for (int ix = 0; ix < g.points[0]; ++ix)
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                const int idx[3] = {ix, iy, iz};
                double r2 = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    const double x = g.coord(a, idx[a]);
                    r2 += x * x;
                }
                s += r2 * std::norm(psi.v[i]);
            }
    return s * g.cell_volume();
}

double variance_rate(const ComplexField& psi)
{
    const Grid& g = psi.grid;
    const auto grad = gradient_spectral(psi);
    double s = 0.0;
    std::size_t i = 0;
    for (int ix = 0; ix < g.points[0]; ++ix)
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                const int idx[3] = {ix, iy, iz};
                for (int a = 0; a < g.dim; ++a)
                    s += g.coord(a, idx[a]) * std::imag(std::conj(psi.v[i]) * grad[a].v[i]);
            }
    return 2.0 * s * g.cell_volume();
}

VirialDiagnostic::VirialDiagnostic(const ModelParams& p, const Grid& g)
    : params_(p), grid_(g), dim_(model_dimension(p.kind)), xgradv_(zeros_real(g))
{
    validate(p);
    if (g.dim != dim_)
        throw std::invalid_argument("VirialDiagnostic: grid dimension mismatch");
    if (auto nl = nonlocal_coefficient(p))
        cnl_ = nl->value(p.beta, p.lambda, p.eps);
    xgradv_ = x_grad_v(g, p.potential);

    if (p.kind == ModelKind::Quasi2DI) {
        const double n1 = p.axis.n1, n2 = p.axis.n2, n3s = p.axis.n3 * p.axis.n3;
        const double eps = p.eps;
        itab_ = multiplier_table(g, [&](double kx, double ky, double) {
            const double r2 = kx * kx + ky * ky;
            if (r2 == 0.0)
                return 0.0;
            const double nxi = (n1 * kx + n2 * ky) * (n1 * kx + n2 * ky) - n3s * r2;
            return nxi * s_integral(std::sqrt(r2), eps);
        });
    } else if (p.kind == ModelKind::Quasi1D) {
        const double eps = p.eps;
        xi_grad_m_ = multiplier_table(g, [&](double kx, double, double) {
            if (kx == 0.0)
                return 0.0;
            const double x2 = kx * kx;
            const double u1d = std::sqrt(2.0 / M_PI) * eps * e1_scaled(0.5 * eps * eps * x2);
            return -(2.0 * x2 + eps * eps * x2 * x2) * u1d +
                   2.0 * std::sqrt(2.0 / M_PI) * eps * x2;
        });
    }
}

double VirialDiagnostic::i_term(const RealField& rho) const
{
    if (itab_.empty())
        throw std::logic_error("i_term: only defined for the first planar model");
    return spectral_quadratic_form(rho, itab_) / M_PI;
}

double VirialDiagnostic::rhs(const ComplexField& psi, const EnergyBreakdown& e) const
{
    const RealField rho = density(psi);
    double out = 4.0 * e.kinetic + 2.0 * dim_ * (e.contact + e.dipolar) -
                 2.0 * dot_density(rho, xgradv_);
    switch (params_.kind) {
    case ModelKind::Quasi2DI:
        out += 3.0 * params_.lambda * i_term(rho);
        break;
    case ModelKind::Quasi2DII:
        out += 2.0 * e.dipolar; // xi.grad m = m for the degree-one symbol
        break;
    case ModelKind::Quasi1D:
        out += cnl_ * spectral_quadratic_form(rho, xi_grad_m_);
        break;
    default:
        break; // local cubic or degree-zero symbol: no correction
    }
    return out;
}

double VirialDiagnostic::rhs(const ComplexField& psi) const
{
    return rhs(psi, energy(params_, psi));
}

EvolveResult evolve(const ModelParams& p, const ComplexField& psi0, double T, double dt,
                    int record_every, const RecordHook& on_record)
{
    validate(p);
    if (!(dt > 0.0) || !(T > 0.0))
        throw std::invalid_argument("evolve: T and dt must be positive");
    if (record_every < 1)
        throw std::invalid_argument("evolve: record_every must be >= 1");
    const double steps_real = T / dt;
    const long n_steps = std::lround(steps_real);
    if (n_steps < 1 || std::fabs(steps_real - static_cast<double>(n_steps)) > 1e-9 * steps_real)
        throw std::invalid_argument("evolve: T must be an integer multiple of dt");
    if (std::fabs(mass(psi0) - 1.0) > 1e-8)
        throw std::invalid_argument("evolve: psi0 must have unit mass");

    const ModelOperator op(p, psi0.grid);
    const VirialDiagnostic vd(p, psi0.grid);
    const auto kphase = kinetic_phase(psi0.grid, dt);

    EvolveResult res;
    ComplexField psi = psi0;
    double peak0 = 0.0;
    scan_peak(psi, peak0);
    bool peak_grew = false;

    auto record = [&](double t) {
        res.series.t.push_back(t);
        res.series.mass.push_back(mass(psi));
        const EnergyBreakdown e = op.energy(psi);
        res.series.energy.push_back(e);
        res.series.sigma_v.push_back(variance(psi));
        res.series.dsigma_v.push_back(variance_rate(psi));
        res.series.virial_rhs.push_back(vd.rhs(psi, e));
        double pk = 0.0;
        scan_peak(psi, pk);
        res.series.peak_density.push_back(pk);
        res.final_state = psi;
        res.t_reached = t;
        if (on_record)
            on_record(t, psi);
    };

    record(0.0);
    long done = 0;
    while (done < n_steps && res.status == EvolveStatus::Ok) {
        const long block = std::min<long>(record_every, n_steps - done);
        half_potential(op, psi, 0.5 * dt);
        bool bad = false;
        for (long j = 0; j < block && !bad; ++j) {
            psi = apply_multiplier(psi, kphase);
            if (j + 1 < block)
                half_potential(op, psi, dt); // merged pair of half steps
            double pk = 0.0;
            if (!scan_peak(psi, pk)) {
                res.status = peak_grew ? EvolveStatus::BlowupSuspected
                                       : EvolveStatus::NumericalFailure;
                bad = true;
            } else if (pk > blowup_peak_factor * peak0) {
                peak_grew = true;
            }
        }
        if (bad)
            break;
        half_potential(op, psi, 0.5 * dt);
        done += block;
        record(static_cast<double>(done) * dt);
        res.steps_taken = static_cast<int>(done);
        if (spectral_tail_fraction(psi, tail_alarm_frac) > tail_alarm_level)
            res.status = EvolveStatus::ResolutionAlarm;
    }
    res.steps_taken = static_cast<int>(done);
    variance_diagnostics(p, res.series);
    return res;
}

std::vector<double> variance_diagnostics(const ModelParams&, ObservableSeries& series)
{
    const std::size_t n = series.size();
    series.virial_residual.assign(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 3)
        return series.virial_residual;
    double max_rhs = 0.0, max_fd2 = 0.0, max_sigma = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        max_sigma = std::max(max_sigma, std::fabs(series.sigma_v[i]));
        const double hl = series.t[i] - series.t[i - 1];
        const double hr = series.t[i + 1] - series.t[i];
        if (std::fabs(hl - hr) > 1e-9 * std::max(hl, hr))
            continue; // uneven stencil (trailing short block): leave NaN
        const double fd2 =
            (series.sigma_v[i + 1] - 2.0 * series.sigma_v[i] + series.sigma_v[i - 1]) / (hl * hr);
        series.virial_residual[i] = std::fabs(fd2 - series.virial_rhs[i]);
        max_rhs = std::max(max_rhs, std::fabs(series.virial_rhs[i]));
        max_fd2 = std::max(max_fd2, std::fabs(fd2));
    }
    /* Cadence sanity: when the model predicts real curvature well above the
     * roundoff floor but the sampled second differences see almost none of
     * it, sigma_v is undersampled (aliased) and the column is meaningless. */
    const double h0 = series.t[1] - series.t[0];
    const double noise =
        16.0 * std::numeric_limits<double>::epsilon() * max_sigma / (h0 * h0);
    if (max_rhs > 100.0 * noise && max_fd2 < 0.25 * max_rhs)
        throw std::runtime_error("variance_diagnostics: recording cadence too coarse for "
                                 "second differences of sigma_v");
    return series.virial_residual;
}

std::string blowup_case_name(BlowupCase c)
{
    switch (c) {
    case BlowupCase::GuaranteedI: return "Guaranteed(i)";
    case BlowupCase::GuaranteedII: return "Guaranteed(ii)";
    case BlowupCase::GuaranteedIII: return "Guaranteed(iii)";
    case BlowupCase::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

bool potential_inequality(const Grid& g, const PotentialSpec& spec, double vmult)
{
    const RealField V = potential_field(g, spec);
    const RealField xv = x_grad_v(g, spec);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < V.v.size(); ++i) {
        const double q = vmult * V.v[i] + xv.v[i];
        worst = std::min(worst, q);
        scale = std::max(scale, std::fabs(q));
    }
    return worst >= -1e-10 * (1.0 + scale);
}

} // namespace

BlowupVerdict blowup_criterion(const ModelParams& p, const ComplexField& psi0, double cb)
{
    validate(p);
    BlowupVerdict out;
    if (p.kind != ModelKind::Quasi2DI && p.kind != ModelKind::Quasi2DII) {
        out.detail = "no blow-up theorem for this model";
        return out;
    }
    const double m = mass(psi0);
    const RegimeVerdict existence = classify_regime(p, cb / m);
    if (existence.outcome == RegimeOutcome::Exists ||
        existence.outcome == RegimeOutcome::ExistsUniquePositive) {
        out.detail = "existence condition " + existence.matched_condition +
                     " holds at Cb/mass; no blow-up guarantee";
        return out;
    }

    const EnergyBreakdown eb = energy(p, psi0);
    const double E = eb.total;
    const double escale = std::fabs(eb.kinetic) + std::fabs(eb.potential) +
                          std::fabs(eb.contact) + std::fabs(eb.dipolar);
    const double sig0 = variance(psi0);
    const double rate0 = variance_rate(psi0); // = sigma_V'(0) = 2 Im int ..
    const double p0 = 0.5 * rate0;
    const double tol_e = 1e-10 * (1.0 + escale);

    double a_coef = 0.0;
    const double n3s = p.axis.n3 * p.axis.n3;
    if (p.kind == ModelKind::Quasi2DI) {
        const bool lam_ok = p.lambda == 0.0 || (p.lambda > 0.0 && n3s >= 0.5);
        if (!lam_ok) {
            out.detail = "dipolar sign hypothesis fails (need lambda=0, or lambda>0 with "
                         "n3^2 >= 1/2)";
            return out;
        }
        if (!potential_inequality(psi0.grid, p.potential, 2.0)) {
            out.detail = "potential fails 2V + x.grad V >= 0";
            return out;
        }
        a_coef = 2.0 * E;
    } else {
        const double beta0 =
            local_coefficient(p).value(p.beta, p.lambda, p.eps);
        const bool assum_a =
            potential_inequality(psi0.grid, p.potential, 3.0) && beta0 >= -cb / m;
        const bool assum_b = potential_inequality(psi0.grid, p.potential, 2.0) &&
                             (p.lambda == 0.0 || (p.lambda > 0.0 && n3s >= 0.5));
        if (!assum_a && !assum_b) {
            out.detail = "neither trap/coefficient assumption holds";
            return out;
        }
        out.assumption = assum_a ? "A" : "B";
        a_coef = (assum_a ? 3.0 : 2.0) * E;
    }

    out.b = rate0;
    out.c = sig0;
    if (E < -tol_e) {
        out.verdict = BlowupCase::GuaranteedI;
        out.a = a_coef;
        out.detail = "E < 0";
    } else if (std::fabs(E) <= tol_e && p0 < -tol_e) {
        out.verdict = BlowupCase::GuaranteedII;
        out.a = a_coef;
        out.detail = "E = 0 and negative initial rate";
    } else if (E > tol_e) {
        const double k = (p.kind == ModelKind::Quasi2DII && out.assumption == "A") ? 3.0 : 2.0;
        if (p0 < -std::sqrt(k * E) * std::sqrt(sig0)) {
            out.verdict = BlowupCase::GuaranteedIII;
            out.a = a_coef;
            out.detail = "positive energy with fast inward rate";
        } else {
            out.detail = "rate above the positive-energy threshold";
        }
    } else {
        out.detail = "E = 0 but the initial rate is not negative";
    }
    if (out.verdict == BlowupCase::Inconclusive)
        out.assumption.clear();
    return out;
}

} // namespace gpps
