#pragma once

#include "gpps/models.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpps {

struct ObservableSeries {
    std::vector<double> t;
    std::vector<double> mass;
    std::vector<EnergyBreakdown> energy;
    std::vector<double> sigma_v;         // int |x|^2 |psi|^2
    std::vector<double> dsigma_v;        // 2 Im int conj(psi) x.grad psi
    std::vector<double> virial_rhs;      // model prediction for d^2 sigma_v/dt^2
    std::vector<double> virial_residual; // |centered 2nd difference - rhs|, NaN at ends
    std::vector<double> peak_density;
    std::size_t size() const { return t.size(); }
};

enum class EvolveStatus { Ok, ResolutionAlarm, BlowupSuspected, NumericalFailure };
std::string evolve_status_name(EvolveStatus s);

// thrown by drivers when a worker run aborts on an alarm (separate exit code)
struct numerical_alarm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvolveResult {
    ObservableSeries series;
    ComplexField final_state; // last recorded state (pre-abort when stopped early)
    EvolveStatus status = EvolveStatus::Ok;
    double t_reached = 0.0;
    int steps_taken = 0;
};

/* One Strang step: half potential phase (V + W[psi] frozen; exact, the
 * density is invariant under phase multiplication), full kinetic step in
 * Fourier space, W recomputed, half potential phase.  Mass-preserving up to
 * roundoff; no renormalization. */
ComplexField step_strang(const ModelOperator& op, const ComplexField& psi, double dt);
ComplexField step_strang(const ModelParams& p, const ComplexField& psi, double dt);

using RecordHook = std::function<void(double, const ComplexField&)>;

/* Propagates psi0 over [0,T] with fixed dt (T must be an integer multiple),
 * recording observables every record_every steps plus the endpoints.
 * Consecutive potential half-steps between records are merged; the recorded
 * states are exact step boundaries.  Stops early on a resolution alarm
 * (spectral tail above 1e-8 of total past 0.875 k_max) or NaN; NaN preceded
 * by peak-density growth beyond 1e4x reports BlowupSuspected. */
EvolveResult evolve(const ModelParams& p, const ComplexField& psi0, double T, double dt,
                    int record_every = 10, const RecordHook& on_record = {});

double variance(const ComplexField& psi);
double variance_rate(const ComplexField& psi);

/* Predicted second time derivative of the variance, per model:
 *   d^2/dt^2 sigma_V = 4 E_kin + 2 d (E_contact + E_dipolar) + extra
 *                      - 2 int rho (x.grad V),
 * where extra = 3 lambda I(t) for the first planar model (I(t) evaluated by
 * nested quadrature over the Fourier grid), 2 E_dipolar for the second
 * (degree-one symbol), and a xi.grad(symbol) quadratic form on the line. */
class VirialDiagnostic {
public:
    VirialDiagnostic(const ModelParams& p, const Grid& g);

    double rhs(const ComplexField& psi, const EnergyBreakdown& e) const;
    double rhs(const ComplexField& psi) const;

    // interaction defect I(t) entering the first planar identity
    double i_term(const RealField& rho) const;

private:
    ModelParams params_;
    Grid grid_;
    int dim_;
    double cnl_ = 0.0;
    RealField xgradv_;               // x.grad V on the grid
    std::vector<double> itab_;       // n_xi * s-integral table (first planar model)
    std::vector<double> xi_grad_m_;  // xi d/dxi of the line symbol
};

/* Fills series.virial_residual from centered second differences of sigma_v
 * against the stored rhs (NaN at the two ends) and returns the column.
 * Throws when the recording cadence makes second differences roundoff-bound. */
std::vector<double> variance_diagnostics(const ModelParams& p, ObservableSeries& series);

enum class BlowupCase { GuaranteedI, GuaranteedII, GuaranteedIII, Inconclusive };
std::string blowup_case_name(BlowupCase c);

struct BlowupVerdict {
    BlowupCase verdict = BlowupCase::Inconclusive;
    std::string assumption; // "A" or "B" when the second theorem's route decided
    // sigma_V(t) <= a t^2 + b t + c whenever the verdict is Guaranteed
    double a = 0.0, b = 0.0, c = 0.0;
    std::string detail;
};

/* Evaluates the finite-time blow-up hypotheses on the initial data: the
 * existence conditions with C_b replaced by C_b/||psi0||_2^2 must all fail,
 * the potential inequality (2V + x.grad V >= 0, or 3V + x.grad V >= 0 for
 * the stronger route) must hold on the grid, and one of the cases
 *   (i) E < 0; (ii) E = 0 and Im int conj(psi0) x.grad psi0 < 0;
 *   (iii) E > 0 and the rate is below -sqrt(k E) ||x psi0||  (k = 2 or 3)
 * must match.  Only the two planar models carry a theorem; everything else
 * is Inconclusive. */
BlowupVerdict blowup_criterion(const ModelParams& p, const ComplexField& psi0, double cb);

} // namespace gpps
