#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "nlch/torus_grid.hpp"

namespace nlch {

using cdouble = std::complex<double>;

// Real scalar field on a torus grid with a lazily computed spectral cache.
// Coefficient convention: c_m = (1/N) sum_x v(x) e^{-i k_m x}, so
// v(x) = sum_m c_m e^{i k_m x} and int |v|^2 = L^d sum_m |c_m|^2.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g, double fill = 0.0);
    ScalarField(const TorusGrid& g, std::vector<double> values);

    const TorusGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    // write access; drops the spectral cache
    std::vector<double>& mutable_values();

    // half-complex coefficients; computed and cached on first use
    const std::vector<cdouble>& spectrum() const;
    bool has_spectrum() const { return spectrum_valid_; }

    // builds the field from coefficients; caches both representations
    static ScalarField from_spectrum(const TorusGrid& g, std::vector<cdouble> spec);

private:
    TorusGrid grid_;
    std::vector<double> values_;
    mutable std::vector<cdouble> spectrum_;
    mutable bool spectrum_valid_ = false;
};

// Velocity sample on the grid: one component field per axis, plus the certified bound.
struct VelocitySample {
    TorusGrid grid;
    std::vector<std::vector<double>> comp; // dim arrays of size n^dim
    double sup_norm = 0.0;                 // measured sup of |beta(x)|
};

} // namespace nlch
