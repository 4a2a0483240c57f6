#include "nlch/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/snapshot.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return b;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct ParseCtx {
    std::string origin;
    int line = 0;

    [[noreturn]] void die(const std::string& msg) const {
        fail(errc::config_error, origin + ":" + std::to_string(line) + ": " + msg);
    }

    double num(const std::string& key, const std::string& v) const {
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            die("key '" + key + "' expects a number, got '" + v + "'");
        }
    }

    int integer(const std::string& key, const std::string& v) const {
        const double x = num(key, v);
        if (x != std::floor(x) || std::abs(x) > 2e9)
            die("key '" + key + "' expects an integer, got '" + v + "'");
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, const std::string& v) const {
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        die("key '" + key + "' expects a boolean, got '" + v + "'");
    }

    std::uint64_t unsigned64(const std::string& key, const std::string& v) const {
        try {
            std::size_t used = 0;
            const unsigned long long x = std::stoull(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            die("key '" + key + "' expects a nonnegative integer, got '" + v + "'");
        }
    }

    std::vector<double> list(const std::string& key, const std::string& v) const {
        std::vector<double> out;
        std::string tok;
        std::istringstream is(v);
        while (std::getline(is, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) die("key '" + key + "' has an empty list entry");
            out.push_back(num(key, tok));
        }
        if (out.empty()) die("key '" + key + "' expects a comma-separated list");
        return out;
    }
};

} // namespace

RunSetup parse_config_text(const std::string& text, const std::string& origin) {
    RunSetup s;
    int dim = 2, n = 64;
    double length = 2 * kPi;
    std::string section;
    ParseCtx ctx{origin, 0};
    std::istringstream stream(text);
    std::string raw;

    while (std::getline(stream, raw)) {
        ++ctx.line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') ctx.die("malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"grid",     "kernel",  "potential", "solver",
                                          "velocity", "initial", "output",    "study"};
            if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                    return section == k;
                }) == std::end(known))
                ctx.die("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) ctx.die("expected 'key = value', got '" + line + "'");
        if (section.empty()) ctx.die("key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (key.empty() || value.empty()) ctx.die("empty key or value in '" + line + "'");

        if (section == "grid") {
            if (key == "dim") dim = ctx.integer(full, value);
            else if (key == "n") n = ctx.integer(full, value);
            else if (key == "L") length = ctx.num(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "kernel") {
            if (key == "family") {
                if (value == "smooth_bump") s.family = MollifierFamily::smooth_bump;
                else if (value == "step") s.family = MollifierFamily::step;
                else ctx.die("kernel.family must be smooth_bump or step, got '" + value + "'");
            } else if (key == "eps") s.eps = ctx.num(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "potential") {
            if (key == "kind") {
                if (value == "cubic") s.pot_kind = PotentialKind::cubic;
                else if (value == "logarithmic") s.pot_kind = PotentialKind::logarithmic;
                else if (value == "obstacle") s.pot_kind = PotentialKind::obstacle;
                else ctx.die("potential.kind must be cubic, logarithmic or obstacle");
            } else if (key == "theta") s.theta = ctx.num(full, value);
            else if (key == "c") s.c = ctx.num(full, value);
            else if (key == "lambda") s.solver.lambda = ctx.num(full, value);
            else if (key == "lambda_visc") s.solver.lambda_visc = ctx.num(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "solver") {
            if (key == "dt") s.solver.dt = ctx.num(full, value);
            else if (key == "T") s.solver.T = ctx.num(full, value);
            else if (key == "S") s.solver.S = value == "auto" ? -1.0 : ctx.num(full, value);
            else if (key == "fp_tol") s.solver.fp_tol = ctx.num(full, value);
            else if (key == "max_fp_iter") s.solver.max_fp_iter = ctx.integer(full, value);
            else if (key == "mean_tol") s.solver.mean_tol = ctx.num(full, value);
            else if (key == "snapshot_every") s.solver.snapshot_every = ctx.integer(full, value);
            else if (key == "residual_every") s.solver.residual_every = ctx.integer(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "velocity") {
            if (key == "recipe") {
                if (value == "zero") s.velocity.kind = VelocityRecipe::Kind::zero;
                else if (value == "constant") s.velocity.kind = VelocityRecipe::Kind::constant;
                else if (value == "shear") s.velocity.kind = VelocityRecipe::Kind::shear;
                else if (value == "rough_shear")
                    s.velocity.kind = VelocityRecipe::Kind::rough_shear;
                else ctx.die("velocity.recipe must be zero, constant, shear or rough_shear");
            } else if (key == "amplitude") s.velocity.amplitude = ctx.num(full, value);
            else if (key == "mode") s.velocity.mode = ctx.integer(full, value);
            else if (key == "omega") s.velocity.omega = ctx.num(full, value);
            else if (key == "cx") s.velocity.comps[0] = ctx.num(full, value);
            else if (key == "cy") s.velocity.comps[1] = ctx.num(full, value);
            else if (key == "cz") s.velocity.comps[2] = ctx.num(full, value);
            else if (key == "bound") s.velocity.bound = ctx.num(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "initial") {
            if (key == "recipe") {
                if (value == "constant_plus_modes")
                    s.initial.kind = InitialRecipe::Kind::constant_plus_modes;
                else if (value == "seeded_random")
                    s.initial.kind = InitialRecipe::Kind::seeded_random;
                else if (value == "file") s.initial.kind = InitialRecipe::Kind::file;
                else ctx.die("initial.recipe must be constant_plus_modes, seeded_random or file");
            } else if (key == "mean") s.initial.mean = ctx.num(full, value);
            else if (key == "amplitude") s.initial.amplitude = ctx.num(full, value);
            else if (key == "mode_x") s.initial.modes[0] = ctx.integer(full, value);
            else if (key == "mode_y") s.initial.modes[1] = ctx.integer(full, value);
            else if (key == "mode_z") s.initial.modes[2] = ctx.integer(full, value);
            else if (key == "path") s.initial.path = value;
            else if (key == "seed") s.seed = ctx.unsigned64(full, value);
            else ctx.die("unknown key '" + full + "'");
        } else if (section == "output") {
            if (key == "directory") s.output.directory = value;
            else if (key == "formats") {
                s.output.csv = false;
                s.output.snapshots = false;
                std::istringstream fs(value);
                std::string tok;
                while (std::getline(fs, tok, ',')) {
                    tok = trim(tok);
                    if (tok == "csv") s.output.csv = true;
                    else if (tok == "snapshots") s.output.snapshots = true;
                    else ctx.die("output.formats entries must be csv or snapshots");
                }
            } else if (key == "diagnostics") {
                if (value == "standard") s.output.regularity_diag = false;
                else if (value == "regularity") s.output.regularity_diag = true;
                else ctx.die("output.diagnostics must be standard or regularity");
            } else ctx.die("unknown key '" + full + "'");
        } else if (section == "study") {
            if (key == "kind") {
                if (value == "eps_to_zero") s.study.kind = StudyKind::eps_to_zero;
                else if (value == "lambda_to_zero") s.study.kind = StudyKind::lambda_to_zero;
                else if (value == "continuous_dependence")
                    s.study.kind = StudyKind::continuous_dependence;
                else if (value == "regularity") s.study.kind = StudyKind::regularity;
                else ctx.die("study.kind must be eps_to_zero, lambda_to_zero, "
                             "continuous_dependence or regularity");
            } else if (key == "sequence") s.study.sequence = ctx.list(full, value);
            else if (key == "perturb_scales") s.study.perturb_scales = ctx.list(full, value);
            else if (key == "compare_every") s.study.compare_every = ctx.integer(full, value);
            else if (key == "perturb_amplitude")
                s.study.perturb_amplitude = ctx.num(full, value);
            else if (key == "perturb_mode") s.study.perturb_mode = ctx.integer(full, value);
            else if (key == "velocity_perturb")
                s.study.velocity_perturb = ctx.num(full, value);
            else if (key == "degenerate_symbol")
                s.study.degenerate_symbol = ctx.boolean(full, value);
            else ctx.die("unknown key '" + full + "'");
        }
    }

    // cross-field validation with config_error provenance
    try {
        s.grid = TorusGrid::make(dim, n, length);
    } catch (const Error& e) {
        fail(errc::config_error, origin + ": " + e.what());
    }
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) fail(errc::config_error, origin + ": " + msg);
    };
    check(s.eps > 0 && std::isfinite(s.eps), "kernel.eps must be positive");
    check(s.eps < s.grid.length / 2, "kernel.eps must be below L/2");
    check(s.solver.dt > 0, "solver.dt must be positive");
    check(s.solver.T > 0, "solver.T must be positive");
    check(s.solver.lambda > 0, "potential.lambda must be positive");
    check(s.solver.fp_tol > 0, "solver.fp_tol must be positive");
    check(s.solver.max_fp_iter >= 1, "solver.max_fp_iter must be >= 1");
    check(s.solver.mean_tol > 0, "solver.mean_tol must be positive");
    check(s.solver.snapshot_every >= 0, "solver.snapshot_every must be >= 0");
    check(s.solver.residual_every >= 0, "solver.residual_every must be >= 0");
    if (s.pot_kind == PotentialKind::logarithmic)
        check(s.theta > 0 && s.c > 0, "logarithmic potential needs theta > 0 and c > 0");
    if (s.initial.kind == InitialRecipe::Kind::file)
        check(!s.initial.path.empty(), "initial.path required for recipe = file");
    if (s.velocity.kind == VelocityRecipe::Kind::shear ||
        s.velocity.kind == VelocityRecipe::Kind::rough_shear)
        check(s.velocity.mode != 0, "velocity.mode must be nonzero for shear recipes");
    check(s.study.compare_every >= 1, "study.compare_every must be >= 1");
    s.solver.track_regularity = s.output.regularity_diag;
    return s;
}

RunSetup parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(errc::config_error, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

void write_resolved_config(std::ostream& os, const RunSetup& s) {
    os << "[grid]\n"
       << "dim = " << s.grid.dim << "\nn = " << s.grid.n << "\nL = " << g17(s.grid.length)
       << "\n\n";
    os << "[kernel]\nfamily = " << family_name(s.family) << "\neps = " << g17(s.eps) << "\n\n";
    os << "[potential]\nkind = " << potential_name(s.pot_kind)
       << "\ntheta = " << g17(s.theta) << "\nc = " << g17(s.c)
       << "\nlambda = " << g17(s.solver.lambda)
       << "\nlambda_visc = " << g17(s.solver.lambda_visc) << "\n\n";
    os << "[solver]\ndt = " << g17(s.solver.dt) << "\nT = " << g17(s.solver.T) << "\nS = ";
    if (s.solver.S < 0) os << "auto";
    else os << g17(s.solver.S);
    os << "\nfp_tol = " << g17(s.solver.fp_tol)
       << "\nmax_fp_iter = " << s.solver.max_fp_iter
       << "\nmean_tol = " << g17(s.solver.mean_tol)
       << "\nsnapshot_every = " << s.solver.snapshot_every
       << "\nresidual_every = " << s.solver.residual_every << "\n\n";
    const char* vname = s.velocity.kind == VelocityRecipe::Kind::zero ? "zero"
                        : s.velocity.kind == VelocityRecipe::Kind::constant ? "constant"
                        : s.velocity.kind == VelocityRecipe::Kind::shear ? "shear"
                                                                         : "rough_shear";
    os << "[velocity]\nrecipe = " << vname << "\namplitude = " << g17(s.velocity.amplitude)
       << "\nmode = " << s.velocity.mode << "\nomega = " << g17(s.velocity.omega)
       << "\ncx = " << g17(s.velocity.comps[0]) << "\ncy = " << g17(s.velocity.comps[1])
       << "\ncz = " << g17(s.velocity.comps[2]) << "\nbound = " << g17(s.velocity.bound)
       << "\n\n";
    const char* iname = s.initial.kind == InitialRecipe::Kind::constant_plus_modes
                            ? "constant_plus_modes"
                        : s.initial.kind == InitialRecipe::Kind::seeded_random
                            ? "seeded_random"
                            : "file";
    os << "[initial]\nrecipe = " << iname << "\nmean = " << g17(s.initial.mean)
       << "\namplitude = " << g17(s.initial.amplitude) << "\nmode_x = " << s.initial.modes[0]
       << "\nmode_y = " << s.initial.modes[1] << "\nmode_z = " << s.initial.modes[2];
    if (!s.initial.path.empty()) os << "\npath = " << s.initial.path;
    os << "\nseed = " << s.seed << "\n\n";
    os << "[output]\ndirectory = " << s.output.directory << "\nformats = csv";
    if (s.output.snapshots) os << ",snapshots";
    os << "\ndiagnostics = " << (s.output.regularity_diag ? "regularity" : "standard")
       << "\n\n";
    if (s.study.kind != StudyKind::none) {
        const char* kname = s.study.kind == StudyKind::eps_to_zero ? "eps_to_zero"
                            : s.study.kind == StudyKind::lambda_to_zero ? "lambda_to_zero"
                            : s.study.kind == StudyKind::continuous_dependence
                                ? "continuous_dependence"
                                : "regularity";
        os << "[study]\nkind = " << kname;
        if (!s.study.sequence.empty()) {
            os << "\nsequence = ";
            for (std::size_t i = 0; i < s.study.sequence.size(); ++i)
                os << (i ? "," : "") << g17(s.study.sequence[i]);
        }
        os << "\nperturb_scales = ";
        for (std::size_t i = 0; i < s.study.perturb_scales.size(); ++i)
            os << (i ? "," : "") << g17(s.study.perturb_scales[i]);
        os << "\ncompare_every = " << s.study.compare_every
           << "\nperturb_amplitude = " << g17(s.study.perturb_amplitude)
           << "\nperturb_mode = " << s.study.perturb_mode
           << "\nvelocity_perturb = " << g17(s.study.velocity_perturb)
           << "\ndegenerate_symbol = " << (s.study.degenerate_symbol ? "true" : "false")
           << "\n";
    }
}

VelocityField build_velocity(const VelocityRecipe& r, const TorusGrid& g, double dt,
                             std::uint64_t seed) {
    VelocityField v;
    switch (r.kind) {
    case VelocityRecipe::Kind::zero: v = velocity_zero(g); break;
    case VelocityRecipe::Kind::constant: v = velocity_constant(g, r.comps); break;
    case VelocityRecipe::Kind::shear: v = velocity_shear(g, r.amplitude, r.mode, r.omega); break;
    case VelocityRecipe::Kind::rough_shear:
        v = velocity_rough_shear(g, r.amplitude, r.mode, dt, seed);
        break;
    }
    if (r.bound > v.certified_bound) v.certified_bound = r.bound;
    return v;
}

namespace {
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
} // namespace

ScalarField build_initial(const InitialRecipe& r, const TorusGrid& g, std::uint64_t seed) {
    switch (r.kind) {
    case InitialRecipe::Kind::constant_plus_modes: {
        ScalarField f(g);
        std::vector<double>& v = f.mutable_values();
        const double k1 = 2.0 * kPi / g.length;
        const double h = g.h();
        const int nk = g.dim == 3 ? g.n : 1;
        std::size_t idx = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                for (int k = 0; k < nk; ++k, ++idx) {
                    double m = 1.0;
                    if (r.modes[0] != 0) m *= std::cos(r.modes[0] * k1 * i * h);
                    if (r.modes[1] != 0) m *= std::cos(r.modes[1] * k1 * j * h);
                    if (g.dim == 3 && r.modes[2] != 0) m *= std::cos(r.modes[2] * k1 * k * h);
                    v[idx] = r.mean + r.amplitude * m;
                }
        return f;
    }
    case InitialRecipe::Kind::seeded_random: {
        // deterministic band-limited noise: hash-driven white noise, low-pass to
        // modes |m| <= n/8 per axis, rescaled to the requested sup amplitude
        ScalarField noise(g);
        std::vector<double>& v = noise.mutable_values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::uint64_t hsh = mix64(seed ^ mix64(static_cast<std::uint64_t>(i)));
            v[i] = 2.0 * (static_cast<double>(hsh >> 11) * 0x1.0p-53) - 1.0;
        }
        std::vector<cdouble> spec = noise.spectrum();
        const int cutoff = std::max(1, g.n / 8);
        for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
            for (int a = 0; a < g.dim; ++a)
                if (std::abs(m[a]) > cutoff) spec[idx] = cdouble(0, 0);
        });
        spec[0] = cdouble(0, 0);
        ScalarField smooth = ScalarField::from_spectrum(g, std::move(spec));
        double sup = 0.0;
        for (double x : smooth.values()) sup = std::max(sup, std::abs(x));
        const double scale = sup > 0 ? r.amplitude / sup : 0.0;
        ScalarField out(g);
        std::vector<double>& ov = out.mutable_values();
        const std::vector<double>& sv = smooth.values();
        for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = r.mean + scale * sv[i];
        return out;
    }
    case InitialRecipe::Kind::file: {
        Snapshot snap = read_snapshot(r.path);
        if (snap.field.grid() != g)
            fail(errc::grid_mismatch, "initial field file grid does not match [grid]");
        return snap.field;
    }
    }
    fail(errc::invalid_input, "unknown initial recipe");
}

} // namespace nlch
