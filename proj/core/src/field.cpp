#include "nlch/field.hpp"

#include <string>

#include "fft_engine.hpp"
#include "nlch/errors.hpp"

namespace nlch {

ScalarField::ScalarField(const TorusGrid& g, double fill)
    : grid_(g), values_(g.size(), fill) {}

ScalarField::ScalarField(const TorusGrid& g, std::vector<double> values)
    : grid_(g), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        fail(errc::grid_mismatch, "field has " + std::to_string(values_.size()) +
                                      " values, grid needs " + std::to_string(grid_.size()));
}

std::vector<double>& ScalarField::mutable_values() {
    spectrum_valid_ = false;
    spectrum_.clear();
    return values_;
}

const std::vector<cdouble>& ScalarField::spectrum() const {
    if (!spectrum_valid_) {
        spectrum_.resize(grid_.spec_size());
        detail::fft_forward(grid_, values_.data(), spectrum_.data());
        spectrum_valid_ = true;
    }
    return spectrum_;
}

ScalarField ScalarField::from_spectrum(const TorusGrid& g, std::vector<cdouble> spec) {
    if (spec.size() != g.spec_size())
        fail(errc::grid_mismatch, "spectrum has " + std::to_string(spec.size()) +
                                      " entries, grid needs " + std::to_string(g.spec_size()));
    ScalarField f(g);
    detail::fft_inverse(g, spec.data(), f.values_.data());
    f.spectrum_ = std::move(spec);
    f.spectrum_valid_ = true;
    return f;
}

} // namespace nlch
