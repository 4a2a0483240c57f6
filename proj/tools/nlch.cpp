#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlch/config.hpp"
#include "nlch/dynamics.hpp"
#include "nlch/errors.hpp"
#include "nlch/kernel.hpp"
#include "nlch/spectral.hpp"
#include "nlch/study.hpp"

namespace {

using namespace nlch;

std::string utc_stamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d%H%M%S", &tm);
    return buf;
}

void require_resolved(const RunSetup& s, double eps) {
    if (eps < 2.0 * s.grid.h())
        fail(errc::config_error, "kernel.eps = " + std::to_string(eps) +
                                     " is under-resolved: needs eps >= 2h = " +
                                     std::to_string(2.0 * s.grid.h()));
}

std::string prepare_output(const RunSetup& s) {
    std::filesystem::create_directories(s.output.directory);
    std::ofstream rc(s.output.directory + "/resolved.conf");
    if (!rc) fail(errc::config_error, "cannot write into output directory " + s.output.directory);
    write_resolved_config(rc, s);
    return s.output.directory;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) fail(errc::config_error, "cannot open " + path + " for writing");
    return os;
}

int cmd_simulate(RunSetup s) {
    require_resolved(s, s.eps);
    const std::string outdir = prepare_output(s);
    const PotentialSplit split = s.make_split();
    const VelocityField vel = build_velocity(s.velocity, s.grid, s.solver.dt, s.seed);
    const ScalarField u0 =
        regularize_initial(build_initial(s.initial, s.grid, s.seed), s.solver.lambda);
    const NonlocalSymbol sym = build_symbol(build_kernel(s.family, s.eps, s.grid), s.grid);

    SolverConfig solver = s.solver;
    RunSinks sinks;
    std::ofstream diag;
    if (s.output.csv) {
        diag = open_out(outdir + "/diagnostics.csv");
        sinks.diagnostics = &diag;
    }
    if (s.output.snapshots) {
        sinks.snapshot_dir = outdir + "/snapshots";
        if (solver.snapshot_every <= 0) solver.snapshot_every = 50;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const RunResult res = run(u0, sym.b, split, &vel, solver, sinks);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const DiagnosticsRecord& first = res.diagnostics.front();
    const DiagnosticsRecord& last = res.diagnostics.back();
    std::printf("simulate: %d steps to T = %.17g (%dD n = %d, eps = %g, %s/%s)\n", res.steps,
                last.t, s.grid.dim, s.grid.n, s.eps, family_name(s.family),
                potential_name(s.pot_kind));
    std::printf("  stabilization S = %.6g, max fixed-point iterations = %d\n", res.S_used,
                res.max_fp_iters);
    std::printf("  mass %.17g, max drift %.3e\n", res.initial_mass, res.max_mass_drift);
    std::printf("  lyapunov %.17g -> %.17g\n", first.lyapunov, last.lyapunov);
    for (const ResidualProbe& p : res.residuals)
        std::printf("  weak-form residual [%s]: max relative %.3e\n", p.name.c_str(),
                    p.max_rel);
    std::printf("  wall time %.2f s; output in %s\n", wall, outdir.c_str());
    return 0;
}

template <typename Report>
int finish_study(const RunSetup& s, const std::string& outdir, const std::string& kind,
                 const Report& rep) {
    const std::string csv_path = outdir + "/" + kind + "_" + utc_stamp() + ".csv";
    {
        std::ofstream os = open_out(csv_path);
        write_csv(os, rep);
    }
    const std::string text = summarize(rep);
    {
        std::ofstream os = open_out(outdir + "/summary.txt");
        os << text;
    }
    std::fputs(text.c_str(), stdout);
    std::printf("  rows in %s\n", csv_path.c_str());
    (void)s;
    return rep.pass() ? 0 : 4;
}

int cmd_study(RunSetup s, StudyKind kind, const std::string& kind_name) {
    if (s.study.kind != StudyKind::none && s.study.kind != kind)
        fail(errc::config_error, "config [study] kind does not match the " + kind_name +
                                     " subcommand");
    s.study.kind = kind;
    const std::string outdir = prepare_output(s);
    switch (kind) {
    case StudyKind::eps_to_zero: return finish_study(s, outdir, kind_name, study_eps(s));
    case StudyKind::lambda_to_zero: return finish_study(s, outdir, kind_name, study_lambda(s));
    case StudyKind::continuous_dependence:
        return finish_study(s, outdir, kind_name, study_continuous_dependence(s));
    case StudyKind::regularity: return finish_study(s, outdir, kind_name, study_regularity(s));
    case StudyKind::none: break;
    }
    fail(errc::invalid_input, "unhandled study kind");
}

int cmd_bbm(RunSetup s) {
    const std::string outdir = prepare_output(s);
    if (s.study.sequence.empty()) s.study.sequence = {0.8, 0.4, 0.2, 0.1};
    ScalarField probe = build_initial(s.initial, s.grid, s.seed);
    {
        const double m = mean_value(probe);
        for (double& v : probe.mutable_values()) v -= m;
    }
    const std::vector<BbmRow> rows = bbm_check(s.grid, s.family, probe, s.study.sequence);
    const std::string csv_path = outdir + "/bbm_" + utc_stamp() + ".csv";
    {
        std::ofstream os = open_out(csv_path);
        os << "eps,energy,target,rel_gap,resolved\n";
        char buf[160];
        for (const BbmRow& r : rows) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%d\n", r.eps, r.energy,
                          r.target, r.rel_gap, r.resolved ? 1 : 0);
            os << buf;
        }
    }
    std::printf("interaction-energy limit check (target = Dirichlet energy %.17g)\n",
                rows.front().target);
    for (const BbmRow& r : rows)
        std::printf("  eps %-8g energy %.10g rel_gap %.3e%s\n", r.eps, r.energy, r.rel_gap,
                    r.resolved ? "" : "  [under-resolved, excluded from trend]");
    std::printf("  rows in %s\n", csv_path.c_str());

    double prev = -1.0;
    bool ok = true;
    for (const BbmRow& r : rows) {
        if (!r.resolved) continue;
        if (prev >= 0 && !(r.rel_gap < prev)) ok = false;
        prev = r.rel_gap;
    }
    if (!ok) {
        std::printf("  verdict FAIL: relative gap is not strictly decreasing\n");
        return 4;
    }
    std::printf("  verdict PASS: relative gap strictly decreasing over resolved eps\n");
    return 0;
}

int cmd_dump_symbol(RunSetup s) {
    const std::string outdir = prepare_output(s);
    const NonlocalSymbol sym = build_symbol(build_kernel(s.family, s.eps, s.grid), s.grid);
    const std::string csv_path = outdir + "/symbol_" + utc_stamp() + ".csv";
    {
        std::ofstream os = open_out(csv_path);
        dump_symbol_csv(os, sym);
    }
    std::printf("symbol: %zu modes, eps = %g (%s), singular coefficient %.17g, "
                "off-origin weight sum %.17g\n",
                sym.b.size(), s.eps, family_name(s.family), sym.singular_coeff,
                sym.lattice_a0);
    std::printf("  rows in %s\n", csv_path.c_str());
    return 0;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
    case errc::config_error:
    case errc::invalid_input:
    case errc::kernel_too_wide: return 2;
    case errc::verdict_failed: return 4;
    default: return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral solver for a nonlocal convective Cahn-Hilliard model"};
    app.require_subcommand(1);
    app.footer("Environment: NLCH_THREADS caps study-level parallelism (default 1).\n"
               "Exit codes: 0 ok, 2 config/validation, 3 solver failure, 4 study verdict.");

    std::string config_path, output_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "run configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--output-dir", output_dir, "override [output] directory");
        sub->add_option("--seed", seed, "override [initial] seed")
            ->each([&](const std::string&) { seed_set = true; });
        return sub;
    };

    CLI::App* sim = add_common(app.add_subcommand("simulate", "single forward run"));
    CLI::App* seps = add_common(
        app.add_subcommand("study-eps", "kernel localization against the local reference"));
    CLI::App* slam = add_common(
        app.add_subcommand("study-lambda", "vanishing-regularization Cauchy study"));
    CLI::App* sdep = add_common(
        app.add_subcommand("depcheck", "continuous dependence on data and velocity"));
    CLI::App* sreg = add_common(
        app.add_subcommand("study-regularity", "uniform-in-eps regularity diagnostics"));
    CLI::App* sbbm = add_common(
        app.add_subcommand("bbm-check", "interaction energy vs Dirichlet energy table"));
    CLI::App* sdump = add_common(app.add_subcommand("dump-symbol", "write the operator symbol"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunSetup s = parse_config_file(config_path);
        if (!output_dir.empty()) s.output.directory = output_dir;
        if (seed_set) s.seed = seed;

        if (sim->parsed()) return cmd_simulate(std::move(s));
        if (seps->parsed()) return cmd_study(std::move(s), StudyKind::eps_to_zero, "eps_to_zero");
        if (slam->parsed())
            return cmd_study(std::move(s), StudyKind::lambda_to_zero, "lambda_to_zero");
        if (sdep->parsed())
            return cmd_study(std::move(s), StudyKind::continuous_dependence,
                             "continuous_dependence");
        if (sreg->parsed()) return cmd_study(std::move(s), StudyKind::regularity, "regularity");
        if (sbbm->parsed()) return cmd_bbm(std::move(s));
        if (sdump->parsed()) return cmd_dump_symbol(std::move(s));
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", errc_name(e.code()), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
