#include "nlch/spectral.hpp"

#include <cmath>
#include <string>

#include "fft_engine.hpp"
#include "nlch/errors.hpp"

namespace nlch {

namespace {
constexpr double kPi = 3.14159265358979323846;

double axis_wavenumber(const TorusGrid& g, int mode, bool dealias) {
    if (dealias && mode == g.n / 2) return 0.0;
    return 2.0 * kPi * mode / g.length;
}
} // namespace

std::vector<cdouble> forward_fft(const TorusGrid& g, const std::vector<double>& values) {
    if (values.size() != g.size()) fail(errc::grid_mismatch, "forward_fft: size mismatch");
    std::vector<cdouble> spec(g.spec_size());
    detail::fft_forward(g, values.data(), spec.data());
    return spec;
}

std::vector<double> inverse_fft(const TorusGrid& g, const std::vector<cdouble>& spec) {
    if (spec.size() != g.spec_size()) fail(errc::grid_mismatch, "inverse_fft: size mismatch");
    std::vector<double> values(g.size());
    detail::fft_inverse(g, spec.data(), values.data());
    return values;
}

double dealiased_k2(const TorusGrid& g, const std::array<int, 3>& m) {
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double k = axis_wavenumber(g, m[a], true);
        k2 += k * k;
    }
    return k2;
}

double true_k2(const TorusGrid& g, const std::array<int, 3>& m) {
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
        const double k = axis_wavenumber(g, m[a], false);
        k2 += k * k;
    }
    return k2;
}

ScalarField gradient_component(const ScalarField& f, int axis) {
    const TorusGrid& g = f.grid();
    if (axis < 0 || axis >= g.dim) fail(errc::invalid_input, "gradient axis out of range");
    std::vector<cdouble> spec = f.spectrum();
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double k = axis_wavenumber(g, m[axis], true);
        spec[idx] *= cdouble(0.0, k);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

std::vector<ScalarField> gradient(const ScalarField& f) {
    std::vector<ScalarField> out;
    out.reserve(f.grid().dim);
    for (int a = 0; a < f.grid().dim; ++a) out.push_back(gradient_component(f, a));
    return out;
}

ScalarField divergence(const std::vector<ScalarField>& comps) {
    if (comps.empty()) fail(errc::invalid_input, "divergence of empty component list");
    const TorusGrid& g = comps.front().grid();
    if (static_cast<int>(comps.size()) != g.dim)
        fail(errc::grid_mismatch, "divergence needs dim components");
    std::vector<cdouble> acc(g.spec_size(), cdouble(0.0, 0.0));
    for (int a = 0; a < g.dim; ++a) {
        if (comps[a].grid() != g) fail(errc::grid_mismatch, "divergence: mixed grids");
        const std::vector<cdouble>& spec = comps[a].spectrum();
        for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
            const double k = axis_wavenumber(g, m[a], true);
            acc[idx] += cdouble(0.0, k) * spec[idx];
        });
    }
    return ScalarField::from_spectrum(g, std::move(acc));
}

ScalarField laplacian(const ScalarField& f) {
    const TorusGrid& g = f.grid();
    std::vector<cdouble> spec = f.spectrum();
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        spec[idx] *= -dealiased_k2(g, m);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

ScalarField inverse_laplacian(const ScalarField& f, double mean_tol) {
    const TorusGrid& g = f.grid();
    std::vector<cdouble> spec = f.spectrum();
    const double mean = spec[0].real();
    if (std::abs(mean) > mean_tol)
        fail(errc::mean_not_zero,
             "inverse_laplacian: field mean " + std::to_string(mean) + " exceeds tolerance");
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double k2 = dealiased_k2(g, m);
        spec[idx] = k2 > 0.0 ? spec[idx] / k2 : cdouble(0.0, 0.0);
    });
    return ScalarField::from_spectrum(g, std::move(spec));
}

NormSet norms(const ScalarField& f) {
    const TorusGrid& g = f.grid();
    const std::vector<cdouble>& spec = f.spectrum();
    const double vol = g.volume();
    double l2 = 0.0, h1 = 0.0, dual = 0.0;
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double w = hermitian_weight(g, m[g.dim - 1]);
        const double p = w * std::norm(spec[idx]);
        l2 += p;
        h1 += p * dealiased_k2(g, m);
        const double kt2 = true_k2(g, m);
        dual += kt2 > 0.0 ? p / kt2 : p; // zero mode enters with weight 1
    });
    NormSet out;
    out.l2 = std::sqrt(vol * l2);
    out.h1_semi = std::sqrt(vol * h1);
    out.mean = spec[0].real();
    out.dual = std::sqrt(vol * dual);
    return out;
}

double norm_l2(const ScalarField& f) { return norms(f).l2; }
double norm_h1_semi(const ScalarField& f) { return norms(f).h1_semi; }

double norm_h1(const ScalarField& f) {
    const NormSet n = norms(f);
    return std::sqrt(n.l2 * n.l2 + n.h1_semi * n.h1_semi);
}

double norm_h2(const ScalarField& f) {
    const TorusGrid& g = f.grid();
    const std::vector<cdouble>& spec = f.spectrum();
    double acc = 0.0;
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double w = hermitian_weight(g, m[g.dim - 1]);
        const double k2 = dealiased_k2(g, m);
        acc += w * std::norm(spec[idx]) * (1.0 + k2 + k2 * k2);
    });
    return std::sqrt(g.volume() * acc);
}

double mean_value(const ScalarField& f) { return f.spectrum()[0].real(); }
double norm_dual(const ScalarField& f) { return norms(f).dual; }

double integral(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
    if (a.grid() != b.grid()) fail(errc::grid_mismatch, "inner_l2: mixed grids");
    const std::vector<double>& av = a.values();
    const std::vector<double>& bv = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
    return s * a.grid().cell_volume();
}

std::vector<double> laplacian_symbol(const TorusGrid& g) {
    std::vector<double> sym(g.spec_size());
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        sym[idx] = dealiased_k2(g, m);
    });
    return sym;
}

} // namespace nlch
