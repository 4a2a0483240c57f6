#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlch/field.hpp"

namespace nlch {

enum class MollifierFamily { smooth_bump, step };

const char* family_name(MollifierFamily f);

// M_d = int_{S^{d-1}} |e1 . sigma|^2 dH^{d-1}: pi (d=2), 4 pi/3 (d=3)
double sphere_second_moment(int dim);

// Radial mollifier rho_eps(r) = C_eps w(r/eps), supp in [0, eps], normalized so
// int_0^inf rho_eps(r) r^(d-1) dr = 2 / M_d  (the scaling under which the
// interaction energy of a smooth field converges to the Dirichlet energy).
struct MollifierKernel {
    MollifierFamily family = MollifierFamily::smooth_bump;
    int dim = 2;
    double eps = 0.0;
    double c_eps = 0.0;

    double profile(double s) const;            // w(s)
    double rho(double r) const;                // C_eps w(r/eps)
    double rho_origin() const;                 // rho(0+)
    double profile_moment(int power) const;    // int_0^1 w(s) s^power ds
};

// eps must satisfy 0 < eps < L/2 (else kernel_too_wide).
MollifierKernel build_kernel(MollifierFamily family, double eps, const TorusGrid& g);

// Fourier multiplier of B_eps(v) = (K_eps * 1) v - K_eps * v on the grid:
// minimal-image lattice quadrature over z != 0 plus the analytic singular-cell
// term delta * |k|^2 calibrated at the fundamental mode against the polar
// quadrature reference. b[0] = 0, b >= 0, b(k) = b(-k).
struct NonlocalSymbol {
    TorusGrid grid;
    double eps = 0.0;
    MollifierFamily family = MollifierFamily::smooth_bump;
    std::vector<double> b;        // r2c layout
    double singular_coeff = 0.0;  // delta in s0(k) = delta |k|^2
    double lattice_a0 = 0.0;      // sum of off-origin lattice weights
};

NonlocalSymbol build_symbol(const MollifierKernel& kernel, const TorusGrid& g);

// B_eps via spectral multiplication; annihilates constants, preserves mean 0.
ScalarField apply_B(const NonlocalSymbol& sym, const ScalarField& v);
// same operator without the singular-cell term (the exact counterpart of the
// y != x double sum; used by the operator-equivalence oracle)
ScalarField apply_B_lattice_part(const NonlocalSymbol& sym, const ScalarField& v);

// E_eps(v) = 1/2 sum_k b(k) |v_k|^2 (= 1/4 double integral of K (v(x)-v(y))^2)
double nonlocal_energy(const NonlocalSymbol& sym, const ScalarField& v);
// same quadratic form for an arbitrary nonnegative multiplier (e.g. |k|^2)
double quadratic_energy(const std::vector<double>& multiplier, const ScalarField& v);

// Continuum symbol at |k| = kmag via 1-D polar quadrature:
// d=2: 2 pi int rho(r) (1 - J0(k r)) / r dr; d=3: 4 pi int rho(r) (1 - sinc(k r)) dr.
// Independent of the lattice/FFT route; also the calibration reference.
double polar_symbol_reference(const MollifierKernel& kernel, double kmag);

struct BbmRow {
    double eps = 0.0;
    double energy = 0.0;     // E_eps(v)
    double target = 0.0;     // 1/2 ||grad v||^2
    double rel_gap = 0.0;
    bool resolved = true;    // eps >= 2h
};

// Tabulates E_eps(v) against the Dirichlet target for a decreasing eps sequence.
std::vector<BbmRow> bbm_check(const TorusGrid& g, MollifierFamily family,
                              const ScalarField& v, const std::vector<double>& eps_seq);

// CSV: one row per stored mode, columns k_index per axis then b_hat
void dump_symbol_csv(std::ostream& os, const NonlocalSymbol& sym);

} // namespace nlch
