#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlch/dynamics.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"
#include "nlch/torus_grid.hpp"
#include "nlch/velocity.hpp"

namespace nlch {

struct VelocityRecipe {
    enum class Kind { zero, constant, shear, rough_shear };
    Kind kind = Kind::zero;
    double amplitude = 0.0;
    int mode = 1;
    double omega = 0.0;                 // shear: time modulation cos(omega t)
    std::array<double, 3> comps{};      // constant velocity components
    double bound = -1.0;                // optional certified sup bound override
};

struct InitialRecipe {
    enum class Kind { constant_plus_modes, seeded_random, file };
    Kind kind = Kind::constant_plus_modes;
    double mean = 0.0;
    double amplitude = 0.1;
    std::array<int, 3> modes{1, 1, 1};  // per-axis cosine mode numbers
    std::string path;                   // snapshot file for Kind::file
};

enum class StudyKind { none, eps_to_zero, lambda_to_zero, continuous_dependence, regularity };

struct StudyOptions {
    StudyKind kind = StudyKind::none;
    std::vector<double> sequence;             // eps or lambda ladder (decreasing)
    std::vector<double> perturb_scales{1.0, 0.5, 0.25};
    int compare_every = 1;                    // trajectory comparison stride (steps)
    double perturb_amplitude = 0.05;          // base L2-scale data perturbation
    int perturb_mode = 2;
    double velocity_perturb = 0.5;            // base amplitude offset for the velocity branch
    bool degenerate_symbol = false;           // replace b(k) by |k|^2 (scheme-identity check)
};

struct OutputOptions {
    std::string directory = "out";
    bool csv = true;
    bool snapshots = false;
    bool regularity_diag = false;
};

struct RunSetup {
    TorusGrid grid = TorusGrid::make(2, 64, 2 * 3.14159265358979323846);
    MollifierFamily family = MollifierFamily::smooth_bump;
    double eps = 0.2;
    PotentialKind pot_kind = PotentialKind::cubic;
    double theta = 0.3;
    double c = 0.5;
    SolverConfig solver;       // carries lambda, lambda_visc, dt, T, S, tolerances
    VelocityRecipe velocity;
    InitialRecipe initial;
    OutputOptions output;
    StudyOptions study;
    std::uint64_t seed = 0;

    PotentialSplit make_split() const { return make_potential(pot_kind, theta, c); }
};

// Sectioned key = value text ([grid], [kernel], [potential], [solver], [velocity],
// [initial], [output], [study]); '#' comments; unknown sections or keys are errors.
RunSetup parse_config_text(const std::string& text, const std::string& origin = "<text>");
RunSetup parse_config_file(const std::string& path);

// Canonical round-trippable dump of every resolved setting (written into the
// output directory so each run carries its provenance).
void write_resolved_config(std::ostream& os, const RunSetup& s);

VelocityField build_velocity(const VelocityRecipe& r, const TorusGrid& g, double dt,
                             std::uint64_t seed);
ScalarField build_initial(const InitialRecipe& r, const TorusGrid& g, std::uint64_t seed);

} // namespace nlch
