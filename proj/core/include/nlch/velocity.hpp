#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "nlch/field.hpp"

namespace nlch {

// Prescribed advection field beta(t, x) with a certified sup-norm bound.
struct VelocityField {
    TorusGrid grid;
    std::function<void(double t, const std::array<double, 3>& x, std::array<double, 3>& out)> eval;
    double certified_bound = 0.0;
    bool divergence_free = false;
    bool time_smooth = true; // H^1-in-time regularity flag
    bool time_dependent = false;
    std::string name = "zero";
};

VelocityField velocity_zero(const TorusGrid& g);
VelocityField velocity_constant(const TorusGrid& g, std::array<double, 3> c);
// beta = (A sin(2 pi m x2 / L) cos(omega t), 0, 0); divergence-free shear
VelocityField velocity_shear(const TorusGrid& g, double amplitude, int mode, double omega);
// shear whose amplitude is resampled iid per step interval; deliberately not H^1 in time
VelocityField velocity_rough_shear(const TorusGrid& g, double amplitude, int mode, double dt,
                                   std::uint64_t seed);

// Samples beta(t, .) on the grid and verifies the certified bound within 1e-10.
VelocitySample sample_velocity(const VelocityField& v, double t);

// Pointwise radial projection onto the ball of radius 1/lambda (lambda > 0).
VelocitySample truncate_velocity(VelocitySample s, double lambda);

} // namespace nlch
