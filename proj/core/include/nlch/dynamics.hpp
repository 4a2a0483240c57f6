#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlch/field.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"
#include "nlch/velocity.hpp"

namespace nlch {

struct SolverConfig {
    double dt = 1e-3;
    double T = 0.5;
    double lambda = 1e-2;      // scheme parameter: Yosida, initial-data smoothing,
                               // and advection truncation radius 1/lambda
    double lambda_visc = -1.0; // viscosity coefficient; < 0 means tied to lambda
    double S = -1.0;           // stabilization; < 0 selects the sampled-Lipschitz rule
    double fp_tol = 1e-10;
    int max_fp_iter = 200;
    double mean_tol = 1e-10;
    int snapshot_every = 0;    // 0 disables snapshots
    int residual_every = 50;   // weak-form probe cadence (steps)
    bool track_regularity = false;

    double visc() const { return lambda_visc < 0 ? lambda : lambda_visc; }
};

struct SimState {
    ScalarField u;
    double t = 0.0;
    int step = 0;
};

// One CSV row. The first row (t = 0) has the mu- and time-derivative entries zero.
struct DiagnosticsRecord {
    double t = 0, mass = 0, E_eps = 0, potential_energy = 0, lyapunov = 0;
    double grad_mu_l2 = 0, u_l2 = 0, u_h1 = 0, dual_norm_dtu = 0, mu_mean = 0, gamma_l1 = 0;
    // regularity extras (written only when track_regularity)
    double dtu_l2 = 0, mu_h1 = 0, mu_h2 = 0, xi_l2 = 0;
};

void write_diagnostics_header(std::ostream& os, bool regularity);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r, bool regularity);

// Spectral smoothing u0 -> (I - lambda lap)^{-1} u0: contracts the L2 norm and
// every nonnegative-multiplier quadratic energy, preserves the mean exactly.
ScalarField regularize_initial(const ScalarField& u0, double lambda);

struct StepReport {
    int fp_iters = 0;
    double fp_residual = 0.0;
    bool s_raised = false;
};

// Semi-implicit step of  du/dt = lap(mu) - div(beta_lambda u),
//   mu = -lambda_visc lap(u+) + B u+ + S (u+ - u) + gamma_lambda(u*) + Pi(u*),
// diagonal in Fourier with multiplier 1 + dt |k|^2 (lambda_visc |k|^2 + b(k) + S);
// the nonlinearity is resolved by an inner fixed-point loop on u*.
class Stepper {
public:
    Stepper(const TorusGrid& g, std::vector<double> bhat, PotentialSplit split,
            SolverConfig cfg, const VelocityField* velocity);

    StepReport advance(SimState& s); // throws step_diverged on fixed-point failure

    const ScalarField& mu() const { return mu_; }
    const ScalarField& dtu() const { return dtu_; }
    double stabilization() const { return S_; }
    const std::vector<double>& bhat() const { return bhat_; }
    const PotentialSplit& split() const { return split_; }
    const SolverConfig& config() const { return cfg_; }

private:
    void ensure_S(const ScalarField& u);
    double sampled_lipschitz(double lo, double hi) const;

    std::vector<cdouble> iterate_once(const std::vector<cdouble>& rhs_lin,
                                      const ScalarField& ustar, const VelocitySample* beta) const;

    TorusGrid grid_;
    std::vector<double> bhat_;
    PotentialSplit split_;
    SolverConfig cfg_;
    const VelocityField* velocity_;
    std::optional<VelocitySample> cached_sample_; // steady velocity, truncated
    double S_ = -1.0;
    ScalarField mu_, dtu_;
    std::vector<double> kd2_;                  // |k|^2 multiplier (Nyquist zeroed)
    std::vector<std::vector<double>> kaxis_;   // per-axis wavenumbers
    std::vector<char> dealias_keep_;           // 2/3-rule mask for convection products
    std::vector<double> denom_;                // rebuilt whenever S changes
};

struct ResidualProbe {
    std::string name;
    double max_rel = 0.0; // max over probed steps of |residual| / scale
};

struct RunSinks {
    std::ostream* diagnostics = nullptr;
    std::string snapshot_dir;
    // called at t=0 and after every step
    std::function<void(const SimState&)> on_state;
};

struct RunResult {
    SimState state;
    std::vector<DiagnosticsRecord> diagnostics;
    std::array<ResidualProbe, 3> residuals; // test functions 1, cos(2pi x1/L), sin(2pi x1/L)
    double S_used = 0.0;
    int max_fp_iters = 0;
    double initial_mass = 0.0;
    double max_mass_drift = 0.0;
    int steps = 0;
};

// Runs from the given (already regularized) initial state to T = steps * dt.
// `bhat` is the quadratic-operator multiplier: a NonlocalSymbol's b, or
// laplacian_symbol(g) for the local reference model.
RunResult run(const ScalarField& u0, const std::vector<double>& bhat,
              const PotentialSplit& split, const VelocityField* velocity,
              const SolverConfig& cfg, const RunSinks& sinks = {});

} // namespace nlch
