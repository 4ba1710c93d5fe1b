#pragma once

#include "gpps/dynamics.hpp"
#include "gpps/models.hpp"

#include <string>
#include <vector>

namespace gpps {

/* Dimension-reduction harness: solve the rescaled 3D system at several layer
 * thicknesses eps, project onto the transverse ground mode, compare against
 * the eps-independent limit GPE, fit the L2-error rate in eps.
 *
 * Rescaled equations (weak regime, O(1) beta/lambda):
 *   pancake: i psi_t = [Hxy^V + eps^-2 Hz + (beta-lambda)rho + W]psi,
 *            W-hat = 3 lambda (n1 x1 + n2 x2 + n3 x3/eps)^2
 *                    / (x1^2 + x2^2 + x3^2/eps^2) rho-hat, zero mode 0;
 *   cigar:   confinement in x,y, W-hat = 3 lambda (n1 x1 + n2 x2
 *            + eps n3 x3)^2 / (x1^2 + x2^2 + eps^2 x3^2) rho-hat.
 * Both symbols are bounded by 3|lambda|. */

enum class ConfinementCase { Pancake, Cigar };
std::string confinement_name(ConfinementCase c);

// lambda = 1 value of the rescaled nonlocal symbol (xi in wavenumber units)
double rescaled_symbol(ConfinementCase c, const DipoleAxis& n, double eps,
                       double x1, double x2, double x3);

/* Ground mode of the confined axis/axes.  w0 holds grid samples of
 * pi^{-1/4} e^{-s^2/2} along one confined axis (cigar reuses them for both
 * x and y, square transverse grid required); mu0 = 1/2 pancake, 1 cigar. */
struct TransverseMode {
    ConfinementCase kind = ConfinementCase::Pancake;
    double mu0 = 0.5;
    std::vector<double> w0;
};

TransverseMode make_transverse_mode(ConfinementCase c, const Grid& g3);

// grid-L2 of (-1/2 D2 + s^2/2) w0 - (1/2) w0 on one confined axis
double transverse_residual(const TransverseMode& m, const Grid& g3);

// the slow-axis restriction of the 3D grid: (x,y) pancake, z cigar
Grid slow_grid(const Grid& g3, ConfinementCase c);

struct RescaledParams {
    ConfinementCase confinement = ConfinementCase::Pancake;
    double beta = 0.0;
    double lambda = 0.0;
    DipoleAxis axis;
    PotentialSpec potential; // acts on the slow axes only
    Grid grid3;
    /* Confined-axis propagator uses the lowest hermite_modes eigenpairs and
     * leaves the orthogonal complement untouched (unitary; ground-mode data
     * never populates it).  <= 0 selects the full basis. */
    int hermite_modes = 32;
    /* Nonlocal multiplier lattice refinement: the convolution runs on a copy
     * of the box zero-padded pad-fold along the confined axes, sampling the
     * symbol at spacing pi/(pad*L).  1 = multiplier on the physical lattice. */
    int nonlocal_pad = 1;
};

struct RescaledTrajectory {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<ComplexField> states; // 3D snapshots at the record times
    std::vector<double> mass;
    std::vector<double> grad_l2; // full 3D ||grad psi||, uniform-bound probe
    EvolveStatus status = EvolveStatus::Ok;
    double t_reached = 0.0;
    std::size_t steps_taken = 0;
};

/* Strang evolution of the rescaled system.  The kinetic sub-step applies
 * exp(-i dt (K_slow + eps^-2 H_fast)) exactly on the retained modes: Fourier
 * phases on the slow axes, truncated eigenbasis propagator of
 * -1/2 D2 + s^2/2 on each confined axis, so only the nonlinear coupling
 * limits dt.  Initial datum is phi0 (x) w0 (ground-mode data; the shape of
 * the argument enforces it).  Throws invalid_argument when dt > eps^2/20. */
RescaledTrajectory solve_rescaled_3d(const RescaledParams& p, const ComplexField& phi0,
                                     double eps, double T, double dt, int record_every);

/* phi^eps = e^{i mu0 t / eps^2} int psi w0  over the confined axes;
 * the result lives on slow_grid(psi.grid, mode.kind). */
ComplexField project_ground_mode(const ComplexField& psi, double t, double eps,
                                 const TransverseMode& mode);

struct LimitTrajectory {
    std::vector<double> times;
    std::vector<ComplexField> states;
    ObservableSeries series;
    EvolveStatus status = EvolveStatus::Ok;
};

// limit cubic GPE via the same evolve() code path; kind must be Limit2D/Limit1D
LimitTrajectory limit_gpe(const ModelParams& p, const ComplexField& phi0,
                          double T, double dt, int record_every);

/* Per-time L2 errors: total ||psi - e^{-i mu0 t/eps^2} phi (x) w0||_{3D},
 * transverse leakage ||psi - Pi psi||, projected ||phi^eps - phi||_{slow},
 * and the confined-axes gradient of the leakage. */
struct ErrorSeries {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<double> total;
    std::vector<double> transverse;
    std::vector<double> projected;
    std::vector<double> leak_grad;
};

ErrorSeries reduction_error(const RescaledTrajectory& resc, const LimitTrajectory& lim,
                            const TransverseMode& mode);

struct RateFit {
    std::vector<double> eps;
    std::vector<double> errors;
    double slope = 0.0;
    double residual = 0.0; // rms of log-error misfit
};

/* Least-squares slope of log(error) vs log(eps).  Requires >= 3 samples
 * spanning a factor >= 4 and strictly positive errors. */
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errors);

struct ReductionStudy {
    ConfinementCase confinement = ConfinementCase::Pancake;
    double beta = 1.0;
    double lambda = 0.5;
    DipoleAxis axis{0.0, 0.0, 1.0};
    PotentialSpec potential;                          // slow-axis trap
    std::vector<double> eps_list{0.25, 0.125, 0.0625};
    double T = 1.0;
    Grid grid3;         // dim == 0 selects the desk-scale default
    ComplexField phi0;  // empty selects the slow harmonic ground mode
    int records = 8;    // snapshots at k T/records
    int hermite_modes = 32;
    int nonlocal_pad = 0; // <= 0 selects the per-case default (pancake 6, cigar 4)
};

struct EpsRun {
    double eps = 0.0;
    RescaledTrajectory traj;
    ErrorSeries errors;
};

struct StudyOutcome {
    std::vector<EpsRun> runs; // eps descending
    LimitTrajectory limit;
    std::vector<double> fit_times; // {T/4, T/2, T}
    std::vector<RateFit> fits;      // total error per fit time
    std::vector<RateFit> leak_fits; // transverse leakage per fit time
};

/* Desk-scale defaults; the physical box stays small because the rescaled
 * symbol's eps-wide transition layer is resolved by the nonlocal_pad
 * refinement of the multiplier lattice, not by the field grid. */
Grid default_reduction_grid(ConfinementCase c);

/* Limit run first, then one rescaled solve per eps (dt = T/steps with the
 * smallest dyadic-friendly steps obeying dt <= eps^2/20), errors, rate fits
 * at t in {T/4, T/2, T}.  Runs fan out across GPPS_THREADS workers; each
 * run owns its state, a single collector assembles the outcome. */
StudyOutcome run_reduction_study(const ReductionStudy& cfg);

} // namespace gpps
