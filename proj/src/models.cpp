#include "gpps/models.hpp"

#include "gpps/fft.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gpps {

int model_dimension(ModelKind kind)
{
    switch (kind) {
    case ModelKind::Gpps3D: return 3;
    case ModelKind::Quasi2DI:
    case ModelKind::Quasi2DII:
    case ModelKind::Limit2D: return 2;
    case ModelKind::Quasi1D:
    case ModelKind::Limit1D: return 1;
    }
    return 0;
}

std::string model_name(ModelKind kind)
{
    switch (kind) {
    case ModelKind::Gpps3D: return "gpps3d";
    case ModelKind::Quasi2DI: return "quasi2d_I";
    case ModelKind::Quasi2DII: return "quasi2d_II";
    case ModelKind::Quasi1D: return "quasi1d";
    case ModelKind::Limit2D: return "limit2d";
    case ModelKind::Limit1D: return "limit1d";
    }
    return "?";
}

RealField potential_field(const Grid& g, const PotentialSpec& spec)
{
    RealField V = zeros_real(g);
    if (spec.kind == PotentialSpec::Kind::Tabulated) {
        if (spec.table.size() != g.size())
            throw std::invalid_argument("potential_field: table size mismatch");
        for (double v : spec.table)
            if (!(v >= 0.0))
                throw std::invalid_argument("potential_field: tabulated V must be >= 0");
        V.v = spec.table;
        return V;
    }
    if (spec.kind == PotentialSpec::Kind::Zero)
        return V;
    if (spec.lattice_amplitude < 0.0)
        throw std::invalid_argument("potential_field: lattice amplitude must be >= 0");
    const bool lattice = spec.kind == PotentialSpec::Kind::HarmonicPlusLattice;
    std::size_t i = 0;
    for (int ix = 0; ix < g.points[0]; ++ix)
        for (int iy = 0; iy < g.points[1]; ++iy)
            for (int iz = 0; iz < g.points[2]; ++iz, ++i) {
                double v = 0.0;
                const int idx[3] = {ix, iy, iz};
                for (int a = 0; a < g.dim; ++a) {
                    const double x = g.coord(a, idx[a]);
                    const double gx = spec.gamma[a] * x;
                    v += 0.5 * gx * gx;
                    if (lattice) {
                        const double s = std::sin(spec.lattice_wavenumber[a] * x);
                        v += spec.lattice_amplitude * s * s;
                    }
                }
                V.v[i] = v;
            }
    return V;
}

void validate(const ModelParams& p)
{
    if (!std::isfinite(p.beta) || !std::isfinite(p.lambda))
        throw std::invalid_argument("model params: beta/lambda must be finite");
    const bool quasi = p.kind == ModelKind::Quasi2DI || p.kind == ModelKind::Quasi2DII ||
                       p.kind == ModelKind::Quasi1D;
    if (quasi && !(p.eps > 0.0 && p.eps <= 1.0))
        throw std::invalid_argument("model params: eps must lie in (0, 1]");
}

double Coefficient::value(double beta, double lambda, double eps) const
{
    return num / den * std::pow(2.0 * M_PI, 0.5 * tp) * std::pow(eps, ep) *
           (wb * beta + wl * lambda);
}

Coefficient local_coefficient(const ModelParams& p)
{
    const double n3 = p.axis.n3;
    Coefficient c;
    c.wb = 1.0;
    switch (p.kind) {
    case ModelKind::Gpps3D:
        c = {"contact (beta - lambda)", 1, 1, 0, 0, 1.0, -1.0};
        break;
    case ModelKind::Quasi2DI:
    case ModelKind::Quasi2DII:
        c = {"local cubic /(sqrt(2pi) eps)", 1, 1, -1, -1, 1.0, 3.0 * n3 * n3 - 1.0};
        break;
    case ModelKind::Quasi1D:
        c = {"local cubic /(2 pi eps^2)", 1, 1, -2, -2, 1.0, 0.5 * (1.0 - 3.0 * n3 * n3)};
        break;
    case ModelKind::Limit2D:
        c = {"local cubic /sqrt(2pi)", 1, 1, -1, 0, 1.0, 3.0 * n3 * n3 - 1.0};
        break;
    case ModelKind::Limit1D:
        c = {"local cubic /(2 pi)", 1, 1, -2, 0, 1.0, 0.5 * (1.0 - 3.0 * n3 * n3)};
        break;
    }
    return c;
}

std::optional<Coefficient> nonlocal_coefficient(const ModelParams& p)
{
    const double n3 = p.axis.n3;
    switch (p.kind) {
    case ModelKind::Gpps3D:
        return Coefficient{"anisotropic part 3 lambda", 3, 1, 0, 0, 0.0, 1.0};
    case ModelKind::Quasi2DI:
    case ModelKind::Quasi2DII:
        return Coefficient{"nonlocal -(3/2) lambda", -3, 2, 0, 0, 0.0, 1.0};
    case ModelKind::Quasi1D:
        return Coefficient{"nonlocal 3 lambda (1-3 n3^2)/(8 sqrt(2pi) eps)",
                           3, 8, -1, -1, 0.0, 1.0 - 3.0 * n3 * n3};
    case ModelKind::Limit2D:
    case ModelKind::Limit1D:
        return std::nullopt;
    }
    return std::nullopt;
}

std::string coefficient_audit(const ModelParams& p)
{
    char buf[256];
    std::string out = "coefficient audit, model " + model_name(p.kind) + "\n";
    std::snprintf(buf, sizeof buf,
                  "  %-44s %8s %4s %4s %10s %10s %16s\n",
                  "term", "num/den", "p", "q", "w_beta", "w_lambda", "value");
    out += buf;
    auto row = [&](const Coefficient& c) {
        std::snprintf(buf, sizeof buf,
                      "  %-44s %4g/%-3g %4d %4d %10.6f %10.6f %16.9e\n",
                      c.label.c_str(), c.num, c.den, c.tp, c.ep, c.wb, c.wl,
                      c.value(p.beta, p.lambda, p.eps));
        out += buf;
    };
    row(local_coefficient(p));
    if (auto nl = nonlocal_coefficient(p))
        row(*nl);
    return out;
}

ModelOperator::ModelOperator(ModelParams params, Grid grid)
    : params_(std::move(params)), grid_(std::move(grid)), trap_{grid_, {}}
{
    validate(params_);
    if (grid_.dim != model_dimension(params_.kind))
        throw std::invalid_argument("ModelOperator: grid dimension does not match model");
    trap_ = potential_field(grid_, params_.potential);
    kin_ = multiplier_table(grid_, [](double kx, double ky, double kz) {
        return kx * kx + ky * ky + kz * kz;
    }, /*use_derivative_table=*/true);

    bloc_ = local_coefficient(params_).value(params_.beta, params_.lambda, params_.eps);
    if (auto nl = nonlocal_coefficient(params_))
        cnl_ = nl->value(params_.beta, params_.lambda, params_.eps);

    switch (params_.kind) {
    case ModelKind::Gpps3D:
        // one combined multiplier: (beta-lambda) + 3 lambda (n.xi)^2/|xi|^2
        nonlocal_table_ = dipolar_table_3d(grid_, params_.axis, params_.beta, params_.lambda);
        dip3d_split_ = multiplier_table(grid_, [&](double kx, double ky, double kz) {
            return symbol_dip3d(kx, ky, kz, params_.axis);
        });
        break;
    case ModelKind::Quasi2DI:
        nonlocal_table_ = nonlocal_table_2dI(grid_, params_.axis, params_.eps);
        break;
    case ModelKind::Quasi2DII:
        nonlocal_table_ = nonlocal_table_2dII(grid_, params_.axis);
        break;
    case ModelKind::Quasi1D:
        nonlocal_table_ = nonlocal_table_1d(grid_, params_.eps);
        break;
    case ModelKind::Limit2D:
    case ModelKind::Limit1D:
        break;
    }
}

RealField ModelOperator::effective_potential_density(const RealField& rho) const
{
    if (!(rho.grid == grid_))
        throw std::invalid_argument("effective_potential: grid mismatch");
    if (params_.kind == ModelKind::Gpps3D)
        return apply_multiplier_real(rho, nonlocal_table_);
    RealField W{grid_, std::vector<double>(grid_.size())};
    if (nonlocal_table_.empty()) {
        for (std::size_t i = 0; i < W.v.size(); ++i) W.v[i] = bloc_ * rho.v[i];
        return W;
    }
    RealField A = apply_multiplier_real(rho, nonlocal_table_);
    for (std::size_t i = 0; i < W.v.size(); ++i)
        W.v[i] = bloc_ * rho.v[i] + cnl_ * A.v[i];
    return W;
}

RealField ModelOperator::effective_potential(const ComplexField& psi) const
{
    return effective_potential_density(density(psi));
}

EnergyBreakdown ModelOperator::energy(const ComplexField& psi) const
{
    if (!(psi.grid == grid_))
        throw std::invalid_argument("energy: grid mismatch");
    const RealField rho = density(psi);
    EnergyBreakdown e;
    e.kinetic = 0.5 * kinetic_quadratic_form(psi);
    double pot = 0.0, rho2 = 0.0;
    for (std::size_t i = 0; i < rho.v.size(); ++i) {
        pot += trap_.v[i] * rho.v[i];
        rho2 += rho.v[i] * rho.v[i];
    }
    const double hvol = grid_.cell_volume();
    e.potential = pot * hvol;
    rho2 *= hvol;
    if (params_.kind == ModelKind::Gpps3D) {
        e.contact = 0.5 * params_.beta * rho2;
        e.dipolar = 0.5 * params_.lambda * spectral_quadratic_form(rho, dip3d_split_);
    } else {
        e.contact = 0.5 * bloc_ * rho2;
        e.dipolar = nonlocal_table_.empty()
                        ? 0.0
                        : 0.5 * cnl_ * spectral_quadratic_form(rho, nonlocal_table_);
    }
    e.total = e.kinetic + e.potential + e.contact + e.dipolar;
    return e;
}

ComplexField ModelOperator::hamiltonian_apply(const ComplexField& psi) const
{
    if (!(psi.grid == grid_))
        throw std::invalid_argument("hamiltonian_apply: grid mismatch");
    ComplexField out = apply_multiplier(psi, kin_); // |k|^2 psi_hat
    const RealField W = effective_potential(psi);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = 0.5 * out.v[i] + (trap_.v[i] + W.v[i]) * psi.v[i];
    return out;
}

RealField effective_potential(const ModelParams& p, const ComplexField& psi)
{
    return ModelOperator(p, psi.grid).effective_potential(psi);
}

EnergyBreakdown energy(const ModelParams& p, const ComplexField& psi)
{
    return ModelOperator(p, psi.grid).energy(psi);
}

ComplexField hamiltonian_apply(const ModelParams& p, const ComplexField& psi)
{
    return ModelOperator(p, psi.grid).hamiltonian_apply(psi);
}

} // namespace gpps
