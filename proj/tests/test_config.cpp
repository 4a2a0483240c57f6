#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "nlch/config.hpp"
#include "nlch/errors.hpp"
#include "nlch/snapshot.hpp"
#include "nlch/spectral.hpp"

using namespace nlch;
namespace fs = std::filesystem;

namespace {

const std::string kFullConfig = R"(# exercise every section
[grid]
dim = 2
n = 48
L = 12.0

[kernel]
family = step
eps = 0.9

[potential]
kind = logarithmic
theta = 0.25
c = 0.6
lambda = 5e-3
lambda_visc = 2e-3

[solver]
dt = 2e-3
T = 0.1
S = 4.5
fp_tol = 1e-9
max_fp_iter = 77
mean_tol = 1e-9
snapshot_every = 10
residual_every = 25

[velocity]
recipe = shear
amplitude = 0.8
mode = 3
omega = 2.0

[initial]
recipe = seeded_random
mean = -0.1
amplitude = 0.2
seed = 99

[output]
directory = some/dir
formats = csv,snapshots
diagnostics = regularity

[study]
kind = lambda_to_zero
sequence = 1e-1, 1e-2, 1e-3
compare_every = 4
)";

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NLCH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

const std::string kTinyRun = R"(
[grid]
n = 16
L = 6.283185307179586
[kernel]
eps = 0.9
[solver]
dt = 1e-3
T = 5e-3
residual_every = 0
[velocity]
recipe = shear
amplitude = 0.5
[initial]
mean = 0.2
amplitude = 0.1
[output]
formats = csv,snapshots
)";

} // namespace

TEST(ConfigParse, EmptyTextYieldsDefaults) {
    const auto s = parse_config_text("");
    EXPECT_EQ(s.grid.dim, 2);
    EXPECT_EQ(s.grid.n, 64);
    EXPECT_NEAR(s.grid.length, 2.0 * std::numbers::pi, 1e-15);
    EXPECT_EQ(s.family, MollifierFamily::smooth_bump);
    EXPECT_DOUBLE_EQ(s.eps, 0.2);
    EXPECT_EQ(s.pot_kind, PotentialKind::cubic);
    EXPECT_DOUBLE_EQ(s.solver.dt, 1e-3);
    EXPECT_EQ(s.study.kind, StudyKind::none);
    EXPECT_EQ(s.seed, 0u);
}

TEST(ConfigParse, ReadsEverySection) {
    const auto s = parse_config_text(kFullConfig, "full.conf");
    EXPECT_EQ(s.grid.n, 48);
    EXPECT_DOUBLE_EQ(s.grid.length, 12.0);
    EXPECT_EQ(s.family, MollifierFamily::step);
    EXPECT_DOUBLE_EQ(s.eps, 0.9);
    EXPECT_EQ(s.pot_kind, PotentialKind::logarithmic);
    EXPECT_DOUBLE_EQ(s.theta, 0.25);
    EXPECT_DOUBLE_EQ(s.c, 0.6);
    EXPECT_DOUBLE_EQ(s.solver.lambda, 5e-3);
    EXPECT_DOUBLE_EQ(s.solver.lambda_visc, 2e-3);
    EXPECT_DOUBLE_EQ(s.solver.dt, 2e-3);
    EXPECT_DOUBLE_EQ(s.solver.S, 4.5);
    EXPECT_EQ(s.solver.max_fp_iter, 77);
    EXPECT_EQ(s.solver.snapshot_every, 10);
    EXPECT_TRUE(s.solver.track_regularity);
    EXPECT_EQ(s.velocity.kind, VelocityRecipe::Kind::shear);
    EXPECT_DOUBLE_EQ(s.velocity.amplitude, 0.8);
    EXPECT_EQ(s.velocity.mode, 3);
    EXPECT_DOUBLE_EQ(s.velocity.omega, 2.0);
    EXPECT_EQ(s.initial.kind, InitialRecipe::Kind::seeded_random);
    EXPECT_DOUBLE_EQ(s.initial.mean, -0.1);
    EXPECT_EQ(s.seed, 99u);
    EXPECT_EQ(s.output.directory, "some/dir");
    EXPECT_TRUE(s.output.csv);
    EXPECT_TRUE(s.output.snapshots);
    EXPECT_EQ(s.study.kind, StudyKind::lambda_to_zero);
    ASSERT_EQ(s.study.sequence.size(), 3u);
    EXPECT_DOUBLE_EQ(s.study.sequence[1], 1e-2);
    EXPECT_EQ(s.study.compare_every, 4);
}

TEST(ConfigParse, AutoStabilizationKeyword) {
    const auto s = parse_config_text("[solver]\nS = auto\n");
    EXPECT_LT(s.solver.S, 0.0);
}

TEST(ConfigParse, RejectsUnknownsWithLocation) {
    try {
        parse_config_text("[grid]\nn = 32\nwat = 1\n", "my.conf");
        FAIL() << "expected config_error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::config_error);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("my.conf:3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("grid.wat"), std::string::npos) << msg;
    }
    try {
        parse_config_text("[nonsense]\nx = 1\n");
        FAIL() << "expected config_error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::config_error);
    }
    try {
        parse_config_text("n = 32\n"); // key before any section
        FAIL() << "expected config_error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::config_error);
    }
}

TEST(ConfigParse, RejectsBadValues) {
    const std::vector<std::string> bad = {
        "[grid]\nn = 33\n",                // odd
        "[grid]\ndim = 4\n",               // unsupported dim
        "[grid]\nL = -2\n",                // negative length
        "[kernel]\nfamily = gaussian\n",   // unknown family
        "[kernel]\neps = 0\n",             // nonpositive eps
        "[potential]\nkind = quartic\n",   // unknown kind
        "[solver]\ndt = 0\n",              // nonpositive dt
        "[solver]\nmax_fp_iter = 0\n",     // no iterations
        "[velocity]\nrecipe = vortex\n",   // unknown recipe
        "[initial]\nrecipe = dunno\n",     // unknown recipe
        "[output]\nformats = csv,xml\n",   // unknown format
        "[output]\ndiagnostics = wat\n",   // unknown diagnostics level
        "[study]\nkind = wat\n",           // unknown study kind
        "[solver]\ndt = abc\n",            // unparseable number
        "[grid]\nn\n",                     // missing '='
    };
    for (const auto& text : bad) {
        try {
            parse_config_text(text);
            FAIL() << "expected config_error for: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), errc::config_error) << text;
        }
    }
}

TEST(ConfigParse, FileErrors) {
    try {
        parse_config_file("/does/not/exist.conf");
        FAIL() << "expected config_error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::config_error);
    }
}

TEST(ConfigParse, ResolvedDumpRoundTrips) {
    const auto s = parse_config_text(kFullConfig);
    std::ostringstream os;
    write_resolved_config(os, s);
    const auto s2 = parse_config_text(os.str(), "resolved");
    EXPECT_EQ(s2.grid.n, s.grid.n);
    EXPECT_DOUBLE_EQ(s2.grid.length, s.grid.length);
    EXPECT_EQ(s2.family, s.family);
    EXPECT_DOUBLE_EQ(s2.eps, s.eps);
    EXPECT_EQ(s2.pot_kind, s.pot_kind);
    EXPECT_DOUBLE_EQ(s2.theta, s.theta);
    EXPECT_DOUBLE_EQ(s2.solver.dt, s.solver.dt);
    EXPECT_DOUBLE_EQ(s2.solver.T, s.solver.T);
    EXPECT_DOUBLE_EQ(s2.solver.S, s.solver.S);
    EXPECT_DOUBLE_EQ(s2.solver.lambda, s.solver.lambda);
    EXPECT_EQ(s2.solver.track_regularity, s.solver.track_regularity);
    EXPECT_EQ(s2.velocity.kind, s.velocity.kind);
    EXPECT_DOUBLE_EQ(s2.velocity.amplitude, s.velocity.amplitude);
    EXPECT_EQ(s2.initial.kind, s.initial.kind);
    EXPECT_EQ(s2.seed, s.seed);
    EXPECT_EQ(s2.study.kind, s.study.kind);
    ASSERT_EQ(s2.study.sequence.size(), s.study.sequence.size());
    for (std::size_t i = 0; i < s.study.sequence.size(); ++i)
        EXPECT_DOUBLE_EQ(s2.study.sequence[i], s.study.sequence[i]);
}

TEST(BuildInitial, CosineProductFormula) {
    const auto g = TorusGrid::make(2, 16, 2.0 * std::numbers::pi);
    InitialRecipe r;
    r.kind = InitialRecipe::Kind::constant_plus_modes;
    r.mean = 0.3;
    r.amplitude = 0.05;
    r.modes = {2, 1, 0};
    const auto f = build_initial(r, g, 0);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double want = 0.3 + 0.05 * std::cos(2.0 * i * g.h()) * std::cos(1.0 * j * g.h());
            err = std::max(err, std::abs(f.values()[i * g.n + j] - want));
        }
    EXPECT_LT(err, 1e-14);
    // mode 0 along an axis means no variation on that axis
    r.modes = {1, 0, 0};
    const auto fx = build_initial(r, g, 0);
    for (int j = 1; j < g.n; ++j) EXPECT_DOUBLE_EQ(fx.values()[j], fx.values()[0]);
}

TEST(BuildInitial, SeededRandomIsDeterministicAndBandLimited) {
    const auto g = TorusGrid::make(2, 32, 2.0 * std::numbers::pi);
    InitialRecipe r;
    r.kind = InitialRecipe::Kind::seeded_random;
    r.mean = 0.1;
    r.amplitude = 0.25;
    const auto a = build_initial(r, g, 5);
    const auto b = build_initial(r, g, 5);
    const auto c = build_initial(r, g, 6);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_NE(a.values(), c.values());
    EXPECT_NEAR(mean_value(a), 0.1, 1e-13);
    double sup = 0.0;
    for (double v : a.values()) sup = std::max(sup, std::abs(v - 0.1));
    EXPECT_NEAR(sup, 0.25, 1e-12);
    // band limit: modes above n/8 are empty
    const auto& spec = a.spectrum();
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const int band = std::max(1, g.n / 8);
        if (std::max(std::abs(m[0]), std::abs(m[1])) > band)
            EXPECT_LT(std::abs(spec[idx]), 1e-13);
    });
}

TEST(BuildInitial, FileRecipeRoundTripsAndChecksGrid) {
    const auto g = TorusGrid::make(2, 16, 2.0);
    InitialRecipe src;
    src.kind = InitialRecipe::Kind::seeded_random;
    const auto f = build_initial(src, g, 3);
    const auto p = fs::temp_directory_path() / "nlch_init.nlch";
    write_snapshot(p.string(), f, 0.0);
    InitialRecipe r;
    r.kind = InitialRecipe::Kind::file;
    r.path = p.string();
    const auto back = build_initial(r, g, 0);
    EXPECT_EQ(back.values(), f.values());
    const auto g2 = TorusGrid::make(2, 32, 2.0);
    EXPECT_THROW(build_initial(r, g2, 0), Error);
    fs::remove(p);
}

TEST(BuildVelocity, MapsRecipes) {
    const auto g = TorusGrid::make(2, 16, 2.0 * std::numbers::pi);
    VelocityRecipe r;
    r.kind = VelocityRecipe::Kind::zero;
    EXPECT_EQ(build_velocity(r, g, 1e-3, 0).name, "zero");
    r.kind = VelocityRecipe::Kind::constant;
    r.comps = {1.0, -2.0, 0.0};
    const auto vc = build_velocity(r, g, 1e-3, 0);
    EXPECT_NEAR(vc.certified_bound, std::sqrt(5.0), 1e-12);
    EXPECT_FALSE(vc.time_dependent);
    r.kind = VelocityRecipe::Kind::shear;
    r.amplitude = 0.5;
    r.mode = 1;
    const auto vs = build_velocity(r, g, 1e-3, 0);
    EXPECT_TRUE(vs.divergence_free);
    EXPECT_DOUBLE_EQ(vs.certified_bound, 0.5);
    // bound override is only allowed to enlarge the certificate
    r.bound = 2.0;
    EXPECT_DOUBLE_EQ(build_velocity(r, g, 1e-3, 0).certified_bound, 2.0);
    r.bound = 0.1;
    EXPECT_DOUBLE_EQ(build_velocity(r, g, 1e-3, 0).certified_bound, 0.5);
    r.kind = VelocityRecipe::Kind::rough_shear;
    r.bound = -1.0;
    const auto vr = build_velocity(r, g, 1e-3, 42);
    EXPECT_FALSE(vr.time_smooth);
    EXPECT_TRUE(vr.time_dependent);
}

TEST(Cli, HelpAndParseErrors) {
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("simulate --help"), 0);
    EXPECT_EQ(run_cli("simulate /does/not/exist.conf"), 2);
    EXPECT_EQ(run_cli("no-such-command"), 2);
}

TEST(Cli, SimulateProducesOutputs) {
    const auto conf = write_temp("nlch_cli_tiny.conf", kTinyRun);
    const auto out = fs::temp_directory_path() / "nlch_cli_out";
    fs::remove_all(out);
    ASSERT_EQ(run_cli("simulate " + conf.string() + " --output-dir " + out.string() + " --seed 5"),
              0);
    EXPECT_TRUE(fs::exists(out / "diagnostics.csv"));
    ASSERT_TRUE(fs::exists(out / "resolved.conf"));
    const auto resolved = parse_config_file((out / "resolved.conf").string());
    EXPECT_EQ(resolved.seed, 5u);
    EXPECT_EQ(resolved.grid.n, 16);
    EXPECT_TRUE(fs::exists(out / "snapshots" / "snap_000000.nlch"));
    EXPECT_TRUE(fs::exists(out / "snapshots" / "snap_000005.nlch"));
    fs::remove_all(out);
    fs::remove(conf);
}

TEST(Cli, UnderResolvedKernelIsRefused) {
    std::string text = kTinyRun;
    const auto pos = text.find("eps = 0.9");
    text.replace(pos, 9, "eps = 0.5"); // 2h = 0.785 at n = 16
    const auto conf = write_temp("nlch_cli_under.conf", text);
    const auto out = fs::temp_directory_path() / "nlch_cli_under_out";
    EXPECT_EQ(run_cli("simulate " + conf.string() + " --output-dir " + out.string()), 2);
    fs::remove_all(out);
    fs::remove(conf);
}

TEST(Cli, StudyKindMismatchIsRefused) {
    const std::string text = kTinyRun + "[study]\nkind = lambda_to_zero\nsequence = 1e-1, 1e-2\n";
    const auto conf = write_temp("nlch_cli_mismatch.conf", text);
    const auto out = fs::temp_directory_path() / "nlch_cli_mismatch_out";
    EXPECT_EQ(run_cli("study-eps " + conf.string() + " --output-dir " + out.string()), 2);
    fs::remove_all(out);
    fs::remove(conf);
}

TEST(Cli, DumpSymbolWritesCsv) {
    const auto conf = write_temp("nlch_cli_sym.conf", kTinyRun);
    const auto out = fs::temp_directory_path() / "nlch_cli_sym_out";
    fs::remove_all(out);
    ASSERT_EQ(run_cli("dump-symbol " + conf.string() + " --output-dir " + out.string()), 0);
    bool found = false;
    for (const auto& e : fs::directory_iterator(out))
        if (e.path().filename().string().rfind("symbol_", 0) == 0) {
            found = true;
            std::ifstream in(e.path());
            std::string header;
            std::getline(in, header);
            EXPECT_EQ(header, "k1,k2,b");
        }
    EXPECT_TRUE(found);
    fs::remove_all(out);
    fs::remove(conf);
}
