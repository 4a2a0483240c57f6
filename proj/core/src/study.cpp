#include "nlch/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nlch/errors.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

namespace {

std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return b;
}

long step_count(const SolverConfig& c) { return std::lround(c.T / c.dt); }

void require_decreasing_positive(const std::vector<double>& seq, const char* what) {
    if (seq.size() < 2)
        fail(errc::config_error, std::string("study.sequence needs >= 2 ") + what + " values");
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!(seq[i] > 0)) fail(errc::config_error, std::string(what) + " values must be positive");
        if (i > 0 && !(seq[i] < seq[i - 1]))
            fail(errc::config_error, std::string(what) + " sequence must be strictly decreasing");
    }
}

void require_resolved(double eps, const TorusGrid& g) {
    if (eps < 2.0 * g.h())
        fail(errc::config_error, "kernel.eps = " + std::to_string(eps) +
                                     " is under-resolved: needs eps >= 2h = " +
                                     std::to_string(2.0 * g.h()));
}

// evenly strided trajectory frames (always includes t = 0 and the final step)
struct FrameStore {
    int stride = 1;
    long steps = 0;
    std::vector<double> times;
    std::vector<std::vector<cdouble>> frames;

    bool due(int step) const { return step % stride == 0 || step == steps; }
    void store(const SimState& s) {
        if (!due(s.step)) return;
        times.push_back(s.t);
        frames.push_back(s.u.spectrum());
    }
};

struct DiffNorms {
    double l22 = 0, h1f2 = 0, dual2 = 0, quad = 0;
};

DiffNorms diff_norms(const TorusGrid& g, const std::vector<cdouble>& a,
                     const std::vector<cdouble>& b, const std::vector<double>* bhat) {
    DiffNorms out;
    for_each_spectral(g, [&](std::size_t i, const std::array<int, 3>& m) {
        const double w = hermitian_weight(g, m[g.dim - 1]);
        const double p = w * std::norm(a[i] - b[i]);
        const double kd2 = dealiased_k2(g, m);
        const double tk2 = true_k2(g, m);
        out.l22 += p;
        out.h1f2 += p * (1.0 + kd2);
        out.dual2 += tk2 > 0 ? p / tk2 : p;
        if (bhat != nullptr) out.quad += p * (*bhat)[i];
    });
    const double vol = g.volume();
    out.l22 *= vol;
    out.h1f2 *= vol;
    out.dual2 *= vol;
    out.quad *= 0.5 * vol;
    return out;
}

double l3_norm(const VelocitySample& a, const VelocitySample& b) {
    const int dim = static_cast<int>(a.comp.size());
    const std::size_t np = a.comp[0].size();
    double acc = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double p2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double d = a.comp[c][i] - b.comp[c][i];
            p2 += d * d;
        }
        acc += p2 * std::sqrt(p2);
    }
    return std::cbrt(acc * a.grid.cell_volume());
}

} // namespace

void parallel_indexed(int n, const std::function<void(int)>& f) {
    int nt = 1;
    if (const char* e = std::getenv("NLCH_THREADS")) nt = std::clamp(std::atoi(e), 1, 8);
    nt = std::min(nt, n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex emutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(emutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

EpsReport study_eps(const RunSetup& setup) {
    RunSetup s = setup;
    if (s.study.sequence.empty()) s.study.sequence = {1.6, 0.8, 0.4, 0.2, 0.1};
    require_decreasing_positive(s.study.sequence, "eps");
    for (double e : s.study.sequence) require_resolved(e, s.grid);

    const TorusGrid& g = s.grid;
    const PotentialSplit split = s.make_split();
    const VelocityField vel = build_velocity(s.velocity, g, s.solver.dt, s.seed);
    const ScalarField u0 =
        regularize_initial(build_initial(s.initial, g, s.seed), s.solver.lambda);
    const long steps = step_count(s.solver);

    FrameStore ref{std::max(1, s.study.compare_every), steps, {}, {}};
    RunSinks ref_sink;
    ref_sink.on_state = [&](const SimState& st) { ref.store(st); };
    run(u0, laplacian_symbol(g), split, &vel, s.solver, ref_sink);

    EpsReport rep;
    rep.rows.resize(s.study.sequence.size());
    parallel_indexed(static_cast<int>(s.study.sequence.size()), [&](int i) {
        const double eps = s.study.sequence[i];
        const std::vector<double> bhat =
            s.study.degenerate_symbol
                ? laplacian_symbol(g)
                : build_symbol(build_kernel(s.family, eps, g), g).b;
        std::size_t next_frame = 0;
        double prev_t = 0.0, sup2 = 0.0, int_h1 = 0.0;
        RunSinks sink;
        sink.on_state = [&](const SimState& st) {
            if (!ref.due(st.step)) return;
            const DiffNorms d = diff_norms(g, st.u.spectrum(), ref.frames[next_frame], nullptr);
            sup2 = std::max(sup2, d.l22);
            if (st.step > 0) int_h1 += (st.t - prev_t) * d.h1f2;
            prev_t = st.t;
            ++next_frame;
        };
        run(u0, bhat, split, &vel, s.solver, sink);
        rep.rows[i] = EpsRow{eps, true, std::sqrt(sup2), std::sqrt(int_h1)};
    });

    rep.monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].sup_l2 < rep.rows[i - 1].sup_l2)) rep.monotone = false;
    rep.small_tail = rep.rows.back().sup_l2 < 0.1 * rep.rows.front().sup_l2;
    return rep;
}

LambdaReport study_lambda(const RunSetup& setup) {
    RunSetup s = setup;
    if (s.study.sequence.empty()) s.study.sequence = {1e-1, 1e-2, 1e-3};
    require_decreasing_positive(s.study.sequence, "lambda");
    require_resolved(s.eps, s.grid);

    const TorusGrid& g = s.grid;
    const PotentialSplit split = s.make_split();
    const VelocityField vel = build_velocity(s.velocity, g, s.solver.dt, s.seed);
    const std::vector<double> bhat = build_symbol(build_kernel(s.family, s.eps, g), g).b;
    const ScalarField u0_raw = build_initial(s.initial, g, s.seed);
    const long steps = step_count(s.solver);
    const int stride = std::max(1, s.study.compare_every);

    const int nruns = static_cast<int>(s.study.sequence.size());
    std::vector<FrameStore> stores(nruns);
    parallel_indexed(nruns, [&](int i) {
        SolverConfig solver = s.solver;
        solver.lambda = s.study.sequence[i];
        solver.lambda_visc = -1.0; // viscosity follows the vanishing parameter
        stores[i] = FrameStore{stride, steps, {}, {}};
        RunSinks sink;
        sink.on_state = [&, i](const SimState& st) { stores[i].store(st); };
        run(regularize_initial(u0_raw, solver.lambda), bhat, split, &vel, solver, sink);
    });

    LambdaReport rep;
    for (int i = 0; i + 1 < nruns; ++i) {
        double sup2 = 0.0;
        for (std::size_t fidx = 0; fidx < stores[i].frames.size(); ++fidx) {
            const DiffNorms d =
                diff_norms(g, stores[i].frames[fidx], stores[i + 1].frames[fidx], nullptr);
            sup2 = std::max(sup2, d.l22);
        }
        rep.rows.push_back(
            LambdaRow{s.study.sequence[i], s.study.sequence[i + 1], std::sqrt(sup2)});
    }
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const double denom = rep.rows[i + 1].dist_c0_l2;
        const double ratio = denom > 0 ? rep.rows[i].dist_c0_l2 / denom
                                       : std::numeric_limits<double>::infinity();
        rep.ratios.push_back(ratio);
        rep.min_ratio = std::min(rep.min_ratio, ratio);
    }
    if (rep.ratios.empty()) rep.min_ratio = 0.0;
    return rep;
}

DepReport study_continuous_dependence(const RunSetup& setup) {
    RunSetup s = setup;
    if (s.study.perturb_scales.empty()) s.study.perturb_scales = {1.0, 0.5, 0.25};
    require_decreasing_positive(s.study.perturb_scales, "perturbation scale");
    require_resolved(s.eps, s.grid);
    if (s.velocity.kind != VelocityRecipe::Kind::shear &&
        s.velocity.kind != VelocityRecipe::Kind::rough_shear)
        fail(errc::config_error,
             "continuous-dependence study needs a shear-type velocity recipe");

    const TorusGrid& g = s.grid;
    const PotentialSplit split = s.make_split();
    const VelocityField vel = build_velocity(s.velocity, g, s.solver.dt, s.seed);
    const std::vector<double> bhat = build_symbol(build_kernel(s.family, s.eps, g), g).b;
    const ScalarField u0_raw = build_initial(s.initial, g, s.seed);
    const ScalarField u0 = regularize_initial(u0_raw, s.solver.lambda);
    const long steps = step_count(s.solver);
    const int stride = std::max(1, s.study.compare_every);

    FrameStore base{stride, steps, {}, {}};
    RunSinks base_sink;
    base_sink.on_state = [&](const SimState& st) { base.store(st); };
    run(u0, bhat, split, &vel, s.solver, base_sink);

    // mean-zero perturbation profile: cos(p k1 x1) cos(k1 x2)
    ScalarField delta(g);
    {
        std::vector<double>& dv = delta.mutable_values();
        const double k1 = 2.0 * 3.14159265358979323846 / g.length;
        const double p = s.study.perturb_mode;
        const double h = g.h();
        const int nk = g.dim == 3 ? g.n : 1;
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < nk; ++k, ++idx)
                    dv[idx] = s.study.perturb_amplitude * std::cos(p * k1 * i * h) *
                              std::cos(k1 * j * h);
        const double m = mean_value(delta);
        for (double& v : delta.mutable_values()) v -= m;
    }

    const int nscales = static_cast<int>(s.study.perturb_scales.size());
    DepReport rep;
    rep.rows.resize(2 * nscales);
    parallel_indexed(2 * nscales, [&](int task) {
        const bool data_branch = task < nscales;
        const double scale = s.study.perturb_scales[task % nscales];

        ScalarField u0p = u0;
        VelocityField velp = vel;
        if (data_branch) {
            ScalarField raw = u0_raw;
            std::vector<double>& rv = raw.mutable_values();
            const std::vector<double>& dv = delta.values();
            for (std::size_t i = 0; i < rv.size(); ++i) rv[i] += scale * dv[i];
            u0p = regularize_initial(raw, s.solver.lambda);
        } else {
            VelocityRecipe r = s.velocity;
            r.amplitude += scale * s.study.velocity_perturb;
            velp = build_velocity(r, g, s.solver.dt, s.seed);
        }

        std::size_t next_frame = 0;
        double prev_t = 0.0, sup_dual2 = 0.0, int_quad = 0.0, rhs = 0.0;
        RunSinks sink;
        sink.on_state = [&](const SimState& st) {
            if (!base.due(st.step)) return;
            const DiffNorms d = diff_norms(g, st.u.spectrum(), base.frames[next_frame], &bhat);
            sup_dual2 = std::max(sup_dual2, d.dual2);
            if (st.step > 0) {
                const double w = st.t - prev_t;
                int_quad += w * d.quad;
                if (!data_branch) {
                    const VelocitySample sa =
                        truncate_velocity(sample_velocity(velp, st.t), s.solver.lambda);
                    const VelocitySample sb =
                        truncate_velocity(sample_velocity(vel, st.t), s.solver.lambda);
                    const double l3 = l3_norm(sa, sb);
                    rhs += w * l3 * l3;
                }
            }
            prev_t = st.t;
            ++next_frame;
        };
        run(u0p, bhat, split, &velp, s.solver, sink);

        if (data_branch) {
            const DiffNorms d0 = diff_norms(g, u0p.spectrum(), u0.spectrum(), nullptr);
            rhs = d0.dual2;
        }
        DepRow row;
        row.branch = data_branch ? "data" : "velocity";
        row.scale = scale;
        row.lhs = sup_dual2 + int_quad;
        row.rhs = rhs;
        row.ratio = rhs > 0 ? row.lhs / rhs : std::numeric_limits<double>::infinity();
        rep.rows[task] = std::move(row);
    });

    rep.spread = 0.0;
    for (int b = 0; b < 2; ++b) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i < nscales; ++i) {
            const double r = rep.rows[b * nscales + i].ratio;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        rep.spread = std::max(rep.spread, lo > 0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    return rep;
}

RegReport study_regularity(const RunSetup& setup) {
    RunSetup s = setup;
    if (s.study.sequence.empty()) s.study.sequence = {0.4, 0.2, 0.1};
    require_decreasing_positive(s.study.sequence, "eps");
    for (double e : s.study.sequence) require_resolved(e, s.grid);
    if (step_count(s.solver) < 10)
        fail(errc::config_error, "regularity study needs at least 10 steps");

    const TorusGrid& g = s.grid;
    const PotentialSplit split = s.make_split();
    const VelocityField vel = build_velocity(s.velocity, g, s.solver.dt, s.seed);
    if (!vel.time_smooth)
        fail(errc::config_error, "regularity study needs a time-smooth velocity recipe");
    const ScalarField u0 =
        regularize_initial(build_initial(s.initial, g, s.seed), s.solver.lambda);

    SolverConfig solver = s.solver;
    solver.track_regularity = true;

    const int nruns = static_cast<int>(s.study.sequence.size());
    RegReport rep;
    rep.rows.resize(nruns);
    parallel_indexed(nruns, [&](int i) {
        const double eps = s.study.sequence[i];
        const std::vector<double> bhat = build_symbol(build_kernel(s.family, eps, g), g).b;
        const RunResult res = run(u0, bhat, split, &vel, solver);

        RegRow row;
        row.eps = eps;
        const double t_early = solver.T / 10.0 + 1e-12;
        double early_dtu = 0, early_h1 = 0, early_h2 = 0;
        for (const DiagnosticsRecord& r : res.diagnostics) {
            if (r.t <= 0.0) continue;
            row.sup_dual_dtu = std::max(row.sup_dual_dtu, r.dual_norm_dtu);
            row.sup_dtu_l2 = std::max(row.sup_dtu_l2, r.dtu_l2);
            row.l2_dtu_l2 += solver.dt * r.dtu_l2 * r.dtu_l2;
            row.sup_mu_h1 = std::max(row.sup_mu_h1, r.mu_h1);
            row.l2_mu_h2 += solver.dt * r.mu_h2 * r.mu_h2;
            row.sup_xi_l2 = std::max(row.sup_xi_l2, r.xi_l2);
            if (r.t <= t_early) {
                early_dtu = std::max(early_dtu, r.dtu_l2);
                early_h1 = std::max(early_h1, r.mu_h1);
                early_h2 = std::max(early_h2, r.mu_h2);
            }
        }
        row.l2_dtu_l2 = std::sqrt(row.l2_dtu_l2);
        row.l2_mu_h2 = std::sqrt(row.l2_mu_h2);
        double late = 0.0;
        double late_h2 = 0.0, sup_h2 = 0.0;
        for (const DiagnosticsRecord& r : res.diagnostics)
            if (r.t > 0.0) sup_h2 = std::max(sup_h2, r.mu_h2);
        late_h2 = early_h2 > 0 ? sup_h2 / early_h2 : std::numeric_limits<double>::infinity();
        late = std::max({early_dtu > 0 ? row.sup_dtu_l2 / early_dtu
                                       : std::numeric_limits<double>::infinity(),
                         early_h1 > 0 ? row.sup_mu_h1 / early_h1
                                      : std::numeric_limits<double>::infinity(),
                         late_h2});
        row.late_factor = late;
        row.bounded = late <= 2.0;
        rep.rows[i] = std::move(row);
    });

    rep.bounded_ok = true;
    for (const RegRow& r : rep.rows) rep.bounded_ok = rep.bounded_ok && r.bounded;
    rep.max_variation = 0.0;
    auto variation = [&](auto getter) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const RegRow& r : rep.rows) {
            lo = std::min(lo, getter(r));
            hi = std::max(hi, getter(r));
        }
        return lo > 0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
    };
    rep.max_variation = std::max({variation([](const RegRow& r) { return r.sup_mu_h1; }),
                                  variation([](const RegRow& r) { return r.l2_dtu_l2; }),
                                  variation([](const RegRow& r) { return r.l2_mu_h2; })});
    rep.variation_ok = rep.max_variation < 0.5;
    return rep;
}

void write_csv(std::ostream& os, const EpsReport& r) {
    os << "eps,resolved,sup_l2,l2_h1\n";
    for (const EpsRow& row : r.rows)
        os << g17(row.eps) << ',' << (row.resolved ? 1 : 0) << ',' << g17(row.sup_l2) << ','
           << g17(row.l2_h1) << '\n';
}

void write_csv(std::ostream& os, const LambdaReport& r) {
    os << "lambda_hi,lambda_lo,dist_c0_l2\n";
    for (const LambdaRow& row : r.rows)
        os << g17(row.lambda_hi) << ',' << g17(row.lambda_lo) << ',' << g17(row.dist_c0_l2)
           << '\n';
}

void write_csv(std::ostream& os, const DepReport& r) {
    os << "branch,scale,lhs,rhs,ratio\n";
    for (const DepRow& row : r.rows)
        os << row.branch << ',' << g17(row.scale) << ',' << g17(row.lhs) << ','
           << g17(row.rhs) << ',' << g17(row.ratio) << '\n';
}

void write_csv(std::ostream& os, const RegReport& r) {
    os << "eps,sup_dual_dtu,sup_dtu_l2,l2_dtu_l2,sup_mu_h1,l2_mu_h2,sup_xi_l2,late_factor,"
          "bounded\n";
    for (const RegRow& row : r.rows)
        os << g17(row.eps) << ',' << g17(row.sup_dual_dtu) << ',' << g17(row.sup_dtu_l2) << ','
           << g17(row.l2_dtu_l2) << ',' << g17(row.sup_mu_h1) << ',' << g17(row.l2_mu_h2)
           << ',' << g17(row.sup_xi_l2) << ',' << g17(row.late_factor) << ','
           << (row.bounded ? 1 : 0) << '\n';
}

std::string summarize(const EpsReport& r) {
    std::ostringstream os;
    os << "kernel localization: " << r.rows.size() << " eps points; sup_t L2 distance "
       << (r.monotone ? "strictly decreasing" : "NOT monotone") << "; final/initial = "
       << (r.rows.front().sup_l2 > 0 ? r.rows.back().sup_l2 / r.rows.front().sup_l2 : 0.0)
       << " (want < 0.1); verdict " << (r.pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

std::string summarize(const LambdaReport& r) {
    std::ostringstream os;
    os << "vanishing regularization: " << r.rows.size() + 1
       << " lambda runs; min consecutive-distance ratio " << r.min_ratio
       << " (want >= 3); verdict " << (r.pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

std::string summarize(const DepReport& r) {
    std::ostringstream os;
    os << "continuous dependence: " << r.rows.size()
       << " perturbed runs; worst within-branch ratio spread " << r.spread
       << " (want <= 3); verdict " << (r.pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

std::string summarize(const RegReport& r) {
    std::ostringstream os;
    os << "regularity tracking: " << r.rows.size() << " eps runs; late/early factor bounded: "
       << (r.bounded_ok ? "yes" : "NO") << "; cross-eps variation " << r.max_variation
       << " (want < 0.5); verdict " << (r.pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

} // namespace nlch
