#include "nlch/velocity.hpp"

#include <array>
#include <cmath>
#include <string>

#include "nlch/errors.hpp"

namespace nlch {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// deterministic uniform draw in [-1, 1] for (seed, bucket)
double bucket_uniform(std::uint64_t seed, std::int64_t bucket) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(bucket)));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}
} // namespace

VelocityField velocity_zero(const TorusGrid& g) {
    VelocityField v;
    v.grid = g;
    v.eval = [](double, const std::array<double, 3>&, std::array<double, 3>& out) {
        out = {0.0, 0.0, 0.0};
    };
    v.certified_bound = 0.0;
    v.divergence_free = true;
    v.name = "zero";
    return v;
}

VelocityField velocity_constant(const TorusGrid& g, std::array<double, 3> c) {
    for (int a = g.dim; a < 3; ++a) c[a] = 0.0;
    VelocityField v;
    v.grid = g;
    v.eval = [c](double, const std::array<double, 3>&, std::array<double, 3>& out) { out = c; };
    v.certified_bound = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    v.divergence_free = true;
    v.name = "constant";
    return v;
}

VelocityField velocity_shear(const TorusGrid& g, double amplitude, int mode, double omega) {
    if (mode == 0) fail(errc::invalid_input, "shear velocity needs a nonzero mode");
    const double kk = 2.0 * kPi * mode / g.length;
    VelocityField v;
    v.grid = g;
    v.eval = [amplitude, kk, omega](double t, const std::array<double, 3>& x,
                                    std::array<double, 3>& out) {
        out = {amplitude * std::sin(kk * x[1]) * std::cos(omega * t), 0.0, 0.0};
    };
    v.certified_bound = std::abs(amplitude);
    v.divergence_free = true;
    v.time_dependent = omega != 0.0;
    v.name = "shear";
    return v;
}

VelocityField velocity_rough_shear(const TorusGrid& g, double amplitude, int mode, double dt,
                                   std::uint64_t seed) {
    if (mode == 0) fail(errc::invalid_input, "rough shear velocity needs a nonzero mode");
    if (!(dt > 0)) fail(errc::invalid_input, "rough shear velocity needs dt > 0");
    const double kk = 2.0 * kPi * mode / g.length;
    VelocityField v;
    v.grid = g;
    v.eval = [amplitude, kk, dt, seed](double t, const std::array<double, 3>& x,
                                       std::array<double, 3>& out) {
        const auto bucket = static_cast<std::int64_t>(std::llround(t / dt));
        const double a = amplitude * bucket_uniform(seed, bucket);
        out = {a * std::sin(kk * x[1]), 0.0, 0.0};
    };
    v.certified_bound = std::abs(amplitude);
    v.divergence_free = true;
    v.time_smooth = false;
    v.time_dependent = true;
    v.name = "rough_shear";
    return v;
}

VelocitySample sample_velocity(const VelocityField& v, double t) {
    const TorusGrid& g = v.grid;
    VelocitySample s;
    s.grid = g;
    s.comp.assign(g.dim, std::vector<double>(g.size()));
    const double h = g.h();
    std::array<double, 3> x{0, 0, 0};
    std::array<double, 3> out{0, 0, 0};
    double sup2 = 0.0;
    std::size_t idx = 0;
    const int nk = g.dim == 3 ? g.n : 1;
    for (int i = 0; i < g.n; ++i) {
        x[0] = i * h;
        for (int j = 0; j < g.n; ++j) {
            x[1] = j * h;
            for (int k = 0; k < nk; ++k, ++idx) {
                x[2] = k * h;
                v.eval(t, x, out);
                double p2 = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    s.comp[a][idx] = out[a];
                    p2 += out[a] * out[a];
                }
                if (p2 > sup2) sup2 = p2;
            }
        }
    }
    s.sup_norm = std::sqrt(sup2);
    if (s.sup_norm > v.certified_bound + 1e-10)
        fail(errc::numerical, "velocity '" + v.name + "' exceeds its certified bound: " +
                                  std::to_string(s.sup_norm) + " > " +
                                  std::to_string(v.certified_bound));
    return s;
}

VelocitySample truncate_velocity(VelocitySample s, double lambda) {
    if (!(lambda > 0)) fail(errc::invalid_input, "truncate_velocity needs lambda > 0");
    const double radius = 1.0 / lambda;
    const int dim = static_cast<int>(s.comp.size());
    const std::size_t np = s.comp[0].size();
    double sup2 = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
        double p2 = 0.0;
        for (int a = 0; a < dim; ++a) p2 += s.comp[a][i] * s.comp[a][i];
        if (p2 > radius * radius) {
            const double f = radius / std::sqrt(p2);
            for (int a = 0; a < dim; ++a) s.comp[a][i] *= f;
            p2 = radius * radius;
        }
        if (p2 > sup2) sup2 = p2;
    }
    s.sup_norm = std::sqrt(sup2);
    return s;
}

} // namespace nlch
