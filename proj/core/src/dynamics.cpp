#include "nlch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <limits>
#include <ostream>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/snapshot.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

namespace {
constexpr double kPi = 3.14159265358979323846;

void append_g17(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}

double potential_sum(const ScalarField& u, const PotentialSplit& split, double lambda) {
    double acc = 0.0;
    for (double s : u.values()) acc += split.regularized_potential(lambda, s);
    return acc * u.grid().cell_volume();
}

double yosida_l1(const ScalarField& u, const PotentialSplit& split, double lambda) {
    double acc = 0.0;
    for (double s : u.values()) acc += std::abs(split.yosida(lambda, s));
    return acc * u.grid().cell_volume();
}

double yosida_l2(const ScalarField& u, const PotentialSplit& split, double lambda) {
    double acc = 0.0;
    for (double s : u.values()) {
        const double y = split.yosida(lambda, s);
        acc += y * y;
    }
    return std::sqrt(acc * u.grid().cell_volume());
}
} // namespace

void write_diagnostics_header(std::ostream& os, bool regularity) {
    os << "t,mass,E_eps,potential_energy,lyapunov,grad_mu_l2,u_l2,u_h1,dual_norm_dtu,"
          "mu_mean,gamma_l1";
    if (regularity) os << ",dtu_l2,mu_h1,mu_h2,xi_l2";
    os << '\n';
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r, bool regularity) {
    std::string line;
    line.reserve(360);
    const double base[] = {r.t,     r.mass, r.E_eps, r.potential_energy,
                           r.lyapunov, r.grad_mu_l2, r.u_l2, r.u_h1,
                           r.dual_norm_dtu, r.mu_mean, r.gamma_l1};
    for (std::size_t i = 0; i < std::size(base); ++i) {
        if (i) line += ',';
        append_g17(line, base[i]);
    }
    if (regularity) {
        for (double v : {r.dtu_l2, r.mu_h1, r.mu_h2, r.xi_l2}) {
            line += ',';
            append_g17(line, v);
        }
    }
    line += '\n';
    os << line;
}

ScalarField regularize_initial(const ScalarField& u0, double lambda) {
    if (!(lambda > 0)) fail(errc::invalid_input, "regularize_initial needs lambda > 0");
    const TorusGrid& g = u0.grid();
    std::vector<cdouble> spec = u0.spectrum();
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        spec[idx] /= 1.0 + lambda * dealiased_k2(g, m);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

Stepper::Stepper(const TorusGrid& g, std::vector<double> bhat, PotentialSplit split,
                 SolverConfig cfg, const VelocityField* velocity)
    : grid_(g), bhat_(std::move(bhat)), split_(split), cfg_(cfg), velocity_(velocity),
      mu_(g), dtu_(g) {
    if (bhat_.size() != g.spec_size())
        fail(errc::grid_mismatch, "stepper multiplier size does not match grid");
    if (!(cfg_.dt > 0)) fail(errc::invalid_input, "stepper needs dt > 0");
    if (!(cfg_.lambda > 0)) fail(errc::invalid_input, "stepper needs lambda > 0");
    if (!(cfg_.fp_tol > 0) || cfg_.max_fp_iter < 1)
        fail(errc::invalid_input, "invalid fixed-point controls");
    if (velocity_ != nullptr && velocity_->grid != g)
        fail(errc::grid_mismatch, "velocity grid does not match stepper grid");
    for (double b : bhat_)
        if (b < 0 || !std::isfinite(b))
            fail(errc::symbol_negativity, "stepper multiplier must be nonnegative");

    kd2_ = laplacian_symbol(g);
    kaxis_.assign(g.dim, std::vector<double>(g.spec_size()));
    dealias_keep_.assign(g.spec_size(), 1);
    const int cutoff = g.n / 3;
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        bool keep = true;
        for (int a = 0; a < g.dim; ++a) {
            kaxis_[a][idx] = m[a] == g.n / 2 ? 0.0 : 2.0 * kPi * m[a] / g.length;
            if (std::abs(m[a]) > cutoff) keep = false;
        }
        dealias_keep_[idx] = keep ? 1 : 0;
    });
    if (cfg_.S >= 0) {
        S_ = cfg_.S;
        denom_.resize(grid_.spec_size());
        const double lv = cfg_.visc();
        for (std::size_t i = 0; i < denom_.size(); ++i)
            denom_[i] = 1.0 + cfg_.dt * kd2_[i] * (lv * kd2_[i] + bhat_[i] + S_);
    }
}

double Stepper::sampled_lipschitz(double lo, double hi) const {
    const int samples = 2049;
    const double pi_slope = split_.pi_lipschitz();
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = lo + (hi - lo) * i / (samples - 1);
        double gslope;
        if (split_.kind == PotentialKind::obstacle) {
            gslope = std::abs(s) > 1.0 ? 1.0 / cfg_.lambda : 0.0;
        } else {
            const double r = split_.resolvent(cfg_.lambda, s);
            const double gp = split_.kind == PotentialKind::cubic
                                  ? 3.0 * r * r
                                  : split_.theta / (1.0 - r * r);
            gslope = gp / (1.0 + cfg_.lambda * gp);
        }
        worst = std::max(worst, gslope + pi_slope); // |gamma_lambda' + Pi'| <= gslope + C_Pi
    }
    return worst;
}

void Stepper::ensure_S(const ScalarField& u) {
    if (S_ >= 0) return;
    const auto [lo, hi] = std::minmax_element(u.values().begin(), u.values().end());
    // 1.1 x the sampled nonlinearity slope covers fixed-point contraction; the
    // pi_lipschitz floor covers the convexity defect (S >= max(-F'')_+ / 2).
    S_ = std::max(1.1 * sampled_lipschitz(*lo - 0.1, *hi + 0.1), split_.pi_lipschitz());
    denom_.resize(grid_.spec_size());
    const double lv = cfg_.visc();
    for (std::size_t i = 0; i < denom_.size(); ++i)
        denom_[i] = 1.0 + cfg_.dt * kd2_[i] * (lv * kd2_[i] + bhat_[i] + S_);
}

std::vector<cdouble> Stepper::iterate_once(const std::vector<cdouble>& rhs_lin,
                                           const ScalarField& ustar,
                                           const VelocitySample* beta) const {
    const std::size_t ns = grid_.spec_size();
    // explicit nonlinearity gamma_lambda + Pi at the current iterate
    ScalarField nfield(grid_);
    {
        std::vector<double>& nv = nfield.mutable_values();
        const std::vector<double>& uv = ustar.values();
        for (std::size_t i = 0; i < uv.size(); ++i)
            nv[i] = split_.yosida(cfg_.lambda, uv[i]) + split_.pi(uv[i]);
    }
    const std::vector<cdouble>& nhat = nfield.spectrum();

    std::vector<cdouble> divhat;
    if (beta != nullptr) {
        divhat.assign(ns, cdouble(0, 0));
        ScalarField prod(grid_);
        for (int a = 0; a < grid_.dim; ++a) {
            std::vector<double>& pv = prod.mutable_values();
            const std::vector<double>& uv = ustar.values();
            const std::vector<double>& bv = beta->comp[a];
            for (std::size_t i = 0; i < uv.size(); ++i) pv[i] = bv[i] * uv[i];
            const std::vector<cdouble>& phat = prod.spectrum();
            const std::vector<double>& ka = kaxis_[a];
            for (std::size_t i = 0; i < ns; ++i)
                if (dealias_keep_[i]) divhat[i] += cdouble(0.0, ka[i]) * phat[i];
        }
    }

    std::vector<cdouble> out(ns);
    const double dt = cfg_.dt;
    for (std::size_t i = 0; i < ns; ++i) {
        cdouble num = rhs_lin[i] - dt * kd2_[i] * nhat[i];
        if (beta != nullptr) num -= dt * divhat[i];
        out[i] = num / denom_[i];
    }
    out[0] = rhs_lin[0]; // zero mode: exact mass transport
    return out;
}

StepReport Stepper::advance(SimState& s) {
    if (s.u.grid() != grid_) fail(errc::grid_mismatch, "state grid does not match stepper");
    ensure_S(s.u);

    const std::vector<cdouble> un = s.u.spectrum();
    std::vector<cdouble> rhs_lin(un.size());
    for (std::size_t i = 0; i < un.size(); ++i)
        rhs_lin[i] = un[i] * (1.0 + cfg_.dt * kd2_[i] * S_);

    const double tplus = (s.step + 1) * cfg_.dt;
    const VelocitySample* beta = nullptr;
    VelocitySample step_sample;
    if (velocity_ != nullptr && velocity_->certified_bound > 0) {
        if (!velocity_->time_dependent) {
            if (!cached_sample_)
                cached_sample_ = truncate_velocity(sample_velocity(*velocity_, 0.0), cfg_.lambda);
            beta = &*cached_sample_;
        } else {
            step_sample = truncate_velocity(sample_velocity(*velocity_, tplus), cfg_.lambda);
            beta = &step_sample;
        }
    }

    StepReport report;
    ScalarField ustar = s.u;
    bool converged = false;
    for (int attempt = 0; attempt < 2 && !converged; ++attempt) {
        if (attempt > 0) { // one stabilization raise, then give up
            S_ *= 2.0;
            const double lv = cfg_.visc();
            for (std::size_t i = 0; i < denom_.size(); ++i)
                denom_[i] = 1.0 + cfg_.dt * kd2_[i] * (lv * kd2_[i] + bhat_[i] + S_);
            for (std::size_t i = 0; i < un.size(); ++i)
                rhs_lin[i] = un[i] * (1.0 + cfg_.dt * kd2_[i] * S_);
            ustar = s.u;
            report.s_raised = true;
        }
        for (int it = 1; it <= cfg_.max_fp_iter; ++it) {
            ScalarField unew =
                ScalarField::from_spectrum(grid_, iterate_once(rhs_lin, ustar, beta));
            double diff2 = 0.0, mag2 = 0.0;
            const std::vector<cdouble>& a = unew.spectrum();
            const std::vector<cdouble>& b = ustar.spectrum();
            for_each_spectral(grid_, [&](std::size_t i, const std::array<int, 3>& m) {
                const double w = hermitian_weight(grid_, m[grid_.dim - 1]);
                diff2 += w * std::norm(a[i] - b[i]);
                mag2 += w * std::norm(a[i]);
            });
            const double rel = std::sqrt(diff2) / std::max(std::sqrt(mag2), 1e-300);
            ustar = std::move(unew);
            report.fp_iters = it;
            report.fp_residual = rel;
            if (!std::isfinite(rel)) break;
            if (rel < cfg_.fp_tol) {
                converged = true;
                break;
            }
        }
    }
    if (!converged)
        fail(errc::step_diverged,
             "fixed point failed at t = " + std::to_string(tplus) +
                 " (relative increment " + std::to_string(report.fp_residual) + ")");

    // chemical potential and discrete time derivative at the accepted state
    const std::vector<cdouble>& up = ustar.spectrum();
    std::vector<cdouble> muhat(up.size()), dtuhat(up.size());
    ScalarField nplus(grid_);
    {
        std::vector<double>& nv = nplus.mutable_values();
        const std::vector<double>& uv = ustar.values();
        for (std::size_t i = 0; i < uv.size(); ++i)
            nv[i] = split_.yosida(cfg_.lambda, uv[i]) + split_.pi(uv[i]);
    }
    const std::vector<cdouble>& nph = nplus.spectrum();
    const double lv = cfg_.visc();
    for (std::size_t i = 0; i < up.size(); ++i) {
        muhat[i] = (lv * kd2_[i] + bhat_[i]) * up[i] + S_ * (up[i] - un[i]) + nph[i];
        dtuhat[i] = (up[i] - un[i]) / cfg_.dt;
    }
    mu_ = ScalarField::from_spectrum(grid_, std::move(muhat));
    dtu_ = ScalarField::from_spectrum(grid_, std::move(dtuhat));

    s.u = std::move(ustar);
    s.step += 1;
    s.t = s.step * cfg_.dt;
    return report;
}

namespace {

DiagnosticsRecord make_record(const ScalarField& u, const ScalarField* mu,
                              const ScalarField* dtu, const std::vector<double>& bhat,
                              const PotentialSplit& split, const SolverConfig& cfg, double t) {
    DiagnosticsRecord r;
    r.t = t;
    r.mass = mean_value(u) * u.grid().volume();
    r.E_eps = quadratic_energy(bhat, u);
    r.potential_energy = potential_sum(u, split, cfg.lambda);
    const double g1 = norm_h1_semi(u);
    r.lyapunov = 0.5 * cfg.visc() * g1 * g1 + r.E_eps + r.potential_energy;
    r.u_l2 = norm_l2(u);
    r.u_h1 = std::sqrt(r.u_l2 * r.u_l2 + g1 * g1);
    r.gamma_l1 = yosida_l1(u, split, cfg.lambda);
    if (mu != nullptr) {
        r.grad_mu_l2 = norm_h1_semi(*mu);
        r.mu_mean = mean_value(*mu);
        if (cfg.track_regularity) {
            r.mu_h1 = norm_h1(*mu);
            r.mu_h2 = norm_h2(*mu);
        }
    }
    if (dtu != nullptr) {
        r.dual_norm_dtu = norm_dual(*dtu);
        if (cfg.track_regularity) r.dtu_l2 = norm_l2(*dtu);
    }
    if (cfg.track_regularity) r.xi_l2 = yosida_l2(u, split, cfg.lambda);
    return r;
}

struct Probe {
    std::string name;
    ScalarField phi;
    ScalarField dphi1; // the only nonzero gradient component (axis 0)
    double phi_l2 = 0.0;
    double dphi_l2 = 0.0;
};

std::vector<Probe> make_probes(const TorusGrid& g) {
    const double kk = 2.0 * kPi / g.length;
    std::vector<Probe> probes;
    for (int which = 0; which < 3; ++which) {
        Probe p;
        p.name = which == 0 ? "one" : which == 1 ? "cos" : "sin";
        p.phi = ScalarField(g);
        p.dphi1 = ScalarField(g);
        std::vector<double>& pv = p.phi.mutable_values();
        std::vector<double>& dv = p.dphi1.mutable_values();
        const double h = g.h();
        const int nk = g.dim == 3 ? g.n : 1;
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i) {
            const double x1 = i * h;
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < nk; ++k, ++idx) {
                    if (which == 0) {
                        pv[idx] = 1.0;
                        dv[idx] = 0.0;
                    } else if (which == 1) {
                        pv[idx] = std::cos(kk * x1);
                        dv[idx] = -kk * std::sin(kk * x1);
                    } else {
                        pv[idx] = std::sin(kk * x1);
                        dv[idx] = kk * std::cos(kk * x1);
                    }
                }
        }
        p.phi_l2 = norm_l2(p.phi);
        p.dphi_l2 = norm_l2(p.dphi1);
        probes.push_back(std::move(p));
    }
    return probes;
}

} // namespace

RunResult run(const ScalarField& u0, const std::vector<double>& bhat,
              const PotentialSplit& split, const VelocityField* velocity,
              const SolverConfig& cfg, const RunSinks& sinks) {
    const TorusGrid& g = u0.grid();
    if (!(cfg.T > 0)) fail(errc::invalid_input, "run needs T > 0");
    const double steps_real = cfg.T / cfg.dt;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - steps) > 1e-8 * std::max(1.0, steps_real))
        fail(errc::invalid_input, "T must be a positive integer multiple of dt");

    Stepper st(g, bhat, split, cfg, velocity);
    SimState s{u0, 0.0, 0};

    RunResult result;
    result.residuals = {ResidualProbe{"one", 0.0}, ResidualProbe{"cos", 0.0},
                        ResidualProbe{"sin", 0.0}};
    result.initial_mass = mean_value(s.u) * g.volume();

    const bool reg = cfg.track_regularity;
    if (sinks.diagnostics != nullptr) write_diagnostics_header(*sinks.diagnostics, reg);
    auto emit = [&](const DiagnosticsRecord& r) {
        result.diagnostics.push_back(r);
        if (sinks.diagnostics != nullptr) write_diagnostics_row(*sinks.diagnostics, r, reg);
    };
    emit(make_record(s.u, nullptr, nullptr, bhat, split, cfg, 0.0));
    if (sinks.on_state) sinks.on_state(s);

    const bool snapshots = !sinks.snapshot_dir.empty() && cfg.snapshot_every > 0;
    char snap_name[64];
    if (snapshots) {
        std::filesystem::create_directories(sinks.snapshot_dir);
        std::snprintf(snap_name, sizeof(snap_name), "/snap_%06d.nlch", 0);
        write_snapshot(sinks.snapshot_dir + snap_name, s.u, 0.0);
    }

    std::vector<Probe> probes = make_probes(g);
    std::optional<VelocitySample> steady_sample;
    VelocitySample probe_scratch;
    auto probe_sample = [&](double t) -> const VelocitySample* {
        if (velocity == nullptr || velocity->certified_bound <= 0) return nullptr;
        if (!velocity->time_dependent) {
            if (!steady_sample)
                steady_sample = truncate_velocity(sample_velocity(*velocity, 0.0), cfg.lambda);
            return &*steady_sample;
        }
        probe_scratch = truncate_velocity(sample_velocity(*velocity, t), cfg.lambda);
        return &probe_scratch;
    };

    for (long step = 1; step <= steps; ++step) {
        const StepReport rep = st.advance(s);
        result.max_fp_iters = std::max(result.max_fp_iters, rep.fp_iters);

        const DiagnosticsRecord rec = make_record(s.u, &st.mu(), &st.dtu(), bhat, split, cfg, s.t);
        result.max_mass_drift =
            std::max(result.max_mass_drift, std::abs(rec.mass - result.initial_mass));
        emit(rec);
        if (sinks.on_state) sinks.on_state(s);

        const bool last = step == steps;
        if (snapshots && (step % cfg.snapshot_every == 0 || last)) {
            std::snprintf(snap_name, sizeof(snap_name), "/snap_%06ld.nlch", step);
            write_snapshot(sinks.snapshot_dir + snap_name, s.u, s.t);
        }

        if (cfg.residual_every > 0 && (step % cfg.residual_every == 0 || last)) {
            const VelocitySample* beta = probe_sample(s.t);
            std::vector<ScalarField> grad_mu = gradient(st.mu());
            const double dtu_l2 = norm_l2(st.dtu());
            const double gmu_l2 = norm_h1_semi(st.mu());
            double bu_l2 = 0.0;
            std::vector<ScalarField> bu;
            if (beta != nullptr) {
                for (int a = 0; a < g.dim; ++a) {
                    ScalarField w(g);
                    std::vector<double>& wv = w.mutable_values();
                    const std::vector<double>& uv = s.u.values();
                    for (std::size_t i = 0; i < uv.size(); ++i)
                        wv[i] = beta->comp[a][i] * uv[i];
                    const double nw = norm_l2(w);
                    bu_l2 += nw * nw;
                    bu.push_back(std::move(w));
                }
                bu_l2 = std::sqrt(bu_l2);
            }
            for (std::size_t p = 0; p < probes.size(); ++p) {
                double r = inner_l2(st.dtu(), probes[p].phi) +
                           inner_l2(grad_mu[0], probes[p].dphi1);
                if (beta != nullptr) r -= inner_l2(bu[0], probes[p].dphi1);
                const double scale = dtu_l2 * probes[p].phi_l2 +
                                     (gmu_l2 + bu_l2) * probes[p].dphi_l2;
                const double rel = std::abs(r) / std::max(scale, 1e-300);
                result.residuals[p].max_rel = std::max(result.residuals[p].max_rel, rel);
            }
        }
    }

    result.S_used = st.stabilization();
    result.steps = static_cast<int>(steps);
    result.state = std::move(s);
    return result;
}

} // namespace nlch
