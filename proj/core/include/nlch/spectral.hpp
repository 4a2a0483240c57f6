#pragma once

#include <array>
#include <vector>

#include "nlch/field.hpp"

namespace nlch {

// Raw transforms (used by ScalarField internally and by tests).
std::vector<cdouble> forward_fft(const TorusGrid& g, const std::vector<double>& values);
std::vector<double> inverse_fft(const TorusGrid& g, const std::vector<cdouble>& spec);

// Exact spectral differentiation; all derivative multipliers zero the Nyquist mode,
// so laplacian(f) == divergence(gradient(f)) identically.
ScalarField gradient_component(const ScalarField& f, int axis);
std::vector<ScalarField> gradient(const ScalarField& f);
ScalarField divergence(const std::vector<ScalarField>& comps);
ScalarField laplacian(const ScalarField& f);

// Solves -lap(w) = f for mean-zero f (|mean| <= mean_tol, else mean_not_zero error).
// Right inverse of -laplacian on band-limited (Nyquist-free) mean-zero fields.
ScalarField inverse_laplacian(const ScalarField& f, double mean_tol = 1e-10);

struct NormSet {
    double l2 = 0.0;
    double h1_semi = 0.0;
    double mean = 0.0;
    double dual = 0.0;
};

NormSet norms(const ScalarField& f);
double norm_l2(const ScalarField& f);
double norm_h1_semi(const ScalarField& f);
double norm_h1(const ScalarField& f);
double norm_h2(const ScalarField& f); // (l2^2 + |grad|^2 + |lap|^2)^(1/2)
double mean_value(const ScalarField& f);
// dual^2 = |Omega| mean^2 + sum_{k!=0} |v_k|^2/|k|^2, an (H^1)*-equivalent norm
double norm_dual(const ScalarField& f);

// h^d * sum of values (exact for trigonometric polynomials)
double integral(const ScalarField& f);
double inner_l2(const ScalarField& a, const ScalarField& b);

// sum over full spectrum of weight(idx, modes) * |c|^2, with Hermitian doubling
template <typename W>
double spectral_sum(const TorusGrid& g, const std::vector<cdouble>& spec, W&& weight) {
    double acc = 0.0;
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double w = hermitian_weight(g, m[g.dim - 1]);
        acc += w * weight(idx, m) * std::norm(spec[idx]);
    });
    return acc;
}

double dealiased_k2(const TorusGrid& g, const std::array<int, 3>& m);
double true_k2(const TorusGrid& g, const std::array<int, 3>& m);

// |k_dealiased|^2 per r2c entry; the Fourier multiplier of -laplacian
std::vector<double> laplacian_symbol(const TorusGrid& g);

} // namespace nlch
