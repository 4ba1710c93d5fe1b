#pragma once

#include "gpps/grid.hpp"
#include "gpps/kernels.hpp"

#include <memory>
#include <optional>
#include <string>

namespace gpps {

enum class ModelKind { Gpps3D, Quasi2DI, Quasi2DII, Quasi1D, Limit2D, Limit1D };

int model_dimension(ModelKind kind);
std::string model_name(ModelKind kind);

struct PotentialSpec {
    enum class Kind { Zero, Harmonic, HarmonicPlusLattice, Tabulated };
    Kind kind = Kind::Harmonic;
    std::array<double, 3> gamma{1.0, 1.0, 1.0}; // V += 1/2 gamma_a^2 x_a^2
    double lattice_amplitude = 0.0;             // V += A sum_a sin^2(q_a x_a), A >= 0
    std::array<double, 3> lattice_wavenumber{1.0, 1.0, 1.0};
    std::vector<double> table;                  // Tabulated, grid layout, V >= 0
};

RealField potential_field(const Grid& g, const PotentialSpec& spec);

struct ModelParams {
    ModelKind kind = ModelKind::Quasi2DI;
    double beta = 0.0;
    double lambda = 0.0;
    double eps = 1.0; // layer thickness, only meaningful for the quasi models
    DipoleAxis axis;
    PotentialSpec potential;
};

// throws invalid_argument on out-of-contract values (eps outside (0,1], ...)
void validate(const ModelParams& p);

struct EnergyBreakdown {
    double kinetic = 0.0;
    double potential = 0.0;
    double contact = 0.0;
    double dipolar = 0.0;
    double total = 0.0;
};

/* Interaction coefficients carry their structure exactly:
 * value = (num/den) * (2 pi)^{tp/2} * eps^{ep} * (wb*beta + wl*lambda).
 * Each model writes its couplings once, here, and everything else reads them;
 * the audit table prints the pieces next to the assembled number. */
struct Coefficient {
    std::string label;
    double num = 1.0, den = 1.0;
    int tp = 0, ep = 0;
    double wb = 0.0, wl = 0.0;
    double value(double beta, double lambda, double eps) const;
};

// local cubic coefficient and the prefactor of the nonlocal apply-op per model
Coefficient local_coefficient(const ModelParams& p);
std::optional<Coefficient> nonlocal_coefficient(const ModelParams& p);
std::string coefficient_audit(const ModelParams& p);

/* Precomputes trap and multiplier tables once; all methods are const and
 * side-effect free, so one operator may serve concurrent evaluations. */
class ModelOperator {
public:
    ModelOperator(ModelParams params, Grid grid);

    const ModelParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    const RealField& trap() const { return trap_; }

    // W[rho] = b_loc rho + c_nl A[rho]; for the 3d model one combined table
    RealField effective_potential(const ComplexField& psi) const;
    RealField effective_potential_density(const RealField& rho) const;
    EnergyBreakdown energy(const ComplexField& psi) const;
    ComplexField hamiltonian_apply(const ComplexField& psi) const;

    double local_value() const { return bloc_; }
    double nonlocal_value() const { return cnl_; }
    const std::vector<double>& kinetic_table() const { return kin_; } // |k|^2 (deriv convention)

private:
    ModelParams params_;
    Grid grid_;
    RealField trap_;
    double bloc_ = 0.0, cnl_ = 0.0;
    std::vector<double> nonlocal_table_; // multiplier of A (empty for limit models)
    std::vector<double> dip3d_split_;    // Udip symbol, 3d energy split only
    std::vector<double> kin_;
};

// pure one-shot wrappers over a freshly built operator
RealField effective_potential(const ModelParams& p, const ComplexField& psi);
EnergyBreakdown energy(const ModelParams& p, const ComplexField& psi);
ComplexField hamiltonian_apply(const ModelParams& p, const ComplexField& psi);

} // namespace gpps
