#pragma once

#include "gpps/models.hpp"

#include <cstdint>
#include <vector>

namespace gpps {

/* Best constant in the planar interpolation inequality
 * ||f||_4^4 <= (1/Cb) ||grad f||_2^2 ||f||_2^2, estimated two independent
 * ways: direct quotient minimization on a grid, and a radial shooting solve
 * of the critical profile Q'' + Q'/r - Q + Q^3 = 0 with Cb = ||Q||_2^2 / 2.
 * The estimators must agree to tol or the routine refuses the value. */
struct GNConstant {
    double value = 0.0;     // adopted value (shooting route)
    double quotient = 0.0;  // grid minimization of J(f)
    double shooting = 0.0;
    double spread = 0.0;    // |quotient - shooting| / value
};

GNConstant estimate_cb(const Grid& g, double tol = 1e-3);
GNConstant estimate_cb(double tol = 1e-3); // default 256^2 box, cached

// Rayleigh quotient J(f) = ||grad f||^2 ||f||^2 / ||f||_4^4 for real f
double gn_quotient(const ComplexField& f);

enum class RegimeOutcome { Exists, ExistsUniquePositive, NotExists, Undetermined };

struct RegimeVerdict {
    RegimeOutcome outcome = RegimeOutcome::Undetermined;
    std::string matched_condition; // empty when undetermined
    double margin = 0.0;           // slack of the tightest inequality in the match
    double cb_used = 0.0;
};

std::string regime_outcome_name(RegimeOutcome o);
RegimeVerdict classify_regime(const ModelParams& p, double cb);

struct GradientFlowOptions {
    double tau = 0.0;        // 0: start from 0.1 * (min spacing)^2
    double tol = 1e-8;       // stop when max|phi_new - phi|/tau < tol
    int max_iterations = 200000;
    int max_halvings = 5;    // energy-increase budget before giving up
    int record_every = 1;    // iteration history cadence
};

struct GroundStateResult {
    RealField phi;           // nonnegative converged profile (phase stripped)
    EnergyBreakdown energy;
    int iterations = 0;
    double residual = 0.0;
    double tau_final = 0.0;
    int halvings = 0;
    bool converged = false;
    bool nonexistence_suspected = false;
    // (iteration, tau, energy, residual) rows at the recording cadence
    std::vector<std::array<double, 4>> history;
};

/* Normalized gradient flow, kinetic part implicit in Fourier space, trap and
 * interaction explicit, renormalization after every step.  The step size is
 * halved whenever the energy rises after the opening transient. */
GroundStateResult minimize_gradient_flow(const ModelParams& p, const ComplexField& init,
                                         const GradientFlowOptions& opt = {});

// normalized Gaussian exp(-sum x_a^2/(2 w_a^2)) and a seeded low-mode field
ComplexField gaussian_init(const Grid& g, std::array<double, 3> width);
ComplexField random_smooth_init(const Grid& g, std::uint64_t seed);

/* Energy of the concentration family phi_delta(x) = delta^-1 phi(x/delta)
 * evaluated on the grid for each listed delta.  The divergence exponent comes
 * from ratios of successive energy differences (exact for a pure power plus
 * constant); the leading 1/delta^2 coefficient from the two smallest deltas. */
struct ScalingProbe {
    std::vector<double> scales;
    std::vector<EnergyBreakdown> energies;
    double fitted_exponent = 0.0;
    double leading_coefficient = 0.0;
};

ScalingProbe scaling_probe_2dI(const ModelParams& p, const ComplexField& phi,
                               const std::vector<double>& deltas);

/* Anisotropic family at fixed aspect kappa = eps2/eps1: width eps1 along the
 * in-plane dipole direction, kappa*eps1 across it.  Radial profiles only; the
 * in-plane rotation is folded into the dipole axis, which is exact there. */
ScalingProbe scaling_probe_2dII(const ModelParams& p, const ComplexField& phi,
                                const std::vector<double>& eps1_list, double kappa);

} // namespace gpps
