#pragma once

#include <functional>
#include <vector>

#include "beltrami/diagnostics.hpp"
#include "beltrami/field.hpp"
#include "beltrami/fields.hpp"

namespace beltrami::dynamics {

struct PhysicalParams {
    double nu = 0.0;   // kinematic viscosity
    double eta = 0.0;  // magnetic resistivity
    double hall = 1.0; // ion-skin-depth coefficient of the Hall term
};

/// Full simulation state: spectral (u, B) plus time and parameters.
struct SimState {
    double t = 0.0;
    PhysicalParams params;
    SpectralVectorField u;
    SpectralVectorField B;

    const GridSpec& grid() const { return u.grid; }
};

struct Tendencies {
    SpectralVectorField du;
    SpectralVectorField dB;
};

/// Dissipative Hall MHD tendencies. The nonlinear products (omega x u, J x B,
/// B x u) are formed in physical space and dealiased by the 2/3 rule; the
/// momentum tendency is Leray-projected with its mean zeroed (analytically
/// mean-free), the induction tendency is a curl and hence solenoidal per mode.
/// `nonlinear = false` keeps only the diffusion terms (test hook).
Tendencies hall_rhs(const SimState& s, bool nonlinear = true);

/// One integrating-factor RK4 step: diffusion is integrated exactly by
/// per-mode exponential factors, the nonlinear terms by classical RK4.
/// Re-asserts conjugate symmetry at the end of the step.
void step(SimState& s, double dt, bool nonlinear = true);

/// Largest stable time step at the current state:
///   min( C_adv / (k_max max|u|), C_w / (h k_max^2 max|B| + (nu+eta) k_max^2) )
/// with C_adv = 0.5, C_w = 0.25 and k_max = sqrt(3) * dealias cutoff.
double stable_dt(const SimState& s);

/// Closed-form solutions with pointwise-cancelling nonlinearity (nu = eta
/// required except for the pure one-field kinds).
class ExactSolution {
  public:
    enum class Kind { Distinct, Degenerate, Trkalian, ForceFree };

    /// Two-eigenfield solution: u = sum_i e^{-nu lambda_i^2 t} u0_i,
    /// B = sum_i (alpha - lambda_i) e^{-nu lambda_i^2 t} u0_i. Degenerates to
    /// the single-lambda kind automatically when lambda1 = lambda2.
    static ExactSolution from_components(const fields::BeltramiComponent& c1,
                                         const fields::BeltramiComponent& c2, PhysicalParams p);

    /// Degenerate-kind evaluator at the formula level:
    ///   f(t) = e^{-nu lambda^2 t} (f0 - 2 nu lambda t (curl f0 - lambda f0))
    /// applied to u0 and B0. No Beltrami check on the inputs: on the torus the
    /// structural initial-data condition forces curl u0 = lambda u0 (zero
    /// corrector), but the formula itself is defined for any field.
    static ExactSolution degenerate(const SpectralVectorField& u0, const SpectralVectorField& B0,
                                    double lambda, PhysicalParams p);

    /// Viscous Beltrami flow u(t) = e^{-nu lambda^2 t} u0, B = 0.
    static ExactSolution trkalian(const fields::BeltramiComponent& u0, PhysicalParams p);

    /// Static force-free field B(t) = e^{-eta lambda^2 t} B0, u = 0.
    static ExactSolution force_free(const fields::BeltramiComponent& B0, PhysicalParams p);

    /// Fields at time t.
    std::pair<SpectralVectorField, SpectralVectorField> at(double t) const;

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double lambda1() const { return lambda1_; }
    double lambda2() const { return lambda2_; }
    /// Smallest nonzero |lambda_i| (decay-rate scale), 0 if none.
    double lambda_min_sq() const;
    /// Initial state with the solver's parameter set.
    SimState initial_state() const;

  private:
    ExactSolution() = default;
    Kind kind_ = Kind::Trkalian;
    PhysicalParams params_;
    GridSpec grid_;
    SpectralVectorField f1_, f2_; // meaning depends on kind
    SpectralVectorField w1_, w2_; // degenerate correctors (curl f0 - lambda f0)
    double lambda1_ = 0.0, lambda2_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0;
};

/// Relative L2 errors of a state against the closed form at the same time
/// (absolute norm when the reference field vanishes).
struct ExactErrors {
    double err_u;
    double err_B;
};
ExactErrors compare_to_exact(const SimState& s, const ExactSolution& ref);

struct RunOptions {
    double dt = 0.0;        // <= 0 selects the stability-bound step
    double t_end = 1.0;
    int record_every = 1;   // in steps
    double alpha = 0.0;     // used by the Phi/Psi diagnostics
    double beta = 0.0;
    const ExactSolution* reference = nullptr; // fills err_u / err_B when set
    bool nonlinear = true;
    /// Called after every accepted step (checkpoint cadence etc.).
    std::function<void(const SimState&, long step_index)> on_step;
};

struct RunResult {
    SimState state;
    std::vector<diag::DiagnosticsRecord> records;
    double dt_used = 0.0;
    long steps = 0;
};

/// Advance to t_end, recording diagnostics at step 0, every record_every
/// steps, and at the end. Explicit dt is re-checked against the stability
/// bound every 100 steps (StabilityViolated rather than silent adaptation);
/// non-finite states throw BlowupDetected.
RunResult run(SimState s, const RunOptions& opt);

/// Log-linear least squares fit of a decaying positive series.
/// exponential mode: ln y ~ a + rate * t; power mode: ln y ~ a + rate * ln(1+t).
/// Requires >= 10 samples inside [t0, t1], all positive.
struct DecayFit {
    double rate;      // fitted slope (negative for decay)
    double intercept; // fitted a
    double r2;        // coefficient of determination
    int n_used;
};
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0,
                        double t1, bool power_law = false);

} // namespace beltrami::dynamics
