#include "nlch/torus_grid.hpp"

#include <cmath>
#include <string>

#include "nlch/errors.hpp"

namespace nlch {

TorusGrid TorusGrid::make(int dim, int n, double length) {
    if (dim != 2 && dim != 3)
        fail(errc::invalid_input, "grid dim must be 2 or 3, got " + std::to_string(dim));
    if (n < 4 || n % 2 != 0)
        fail(errc::invalid_input, "grid n must be even and >= 4, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        fail(errc::invalid_input, "grid length must be positive and finite");
    return TorusGrid{dim, n, length};
}

double TorusGrid::volume() const { return std::pow(length, dim); }

double TorusGrid::cell_volume() const { return std::pow(h(), dim); }

std::size_t TorusGrid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

std::size_t TorusGrid::spec_size() const {
    std::size_t s = static_cast<std::size_t>(last_spec());
    for (int i = 0; i < dim - 1; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

double TorusGrid::wavenumber(int m) const {
    return 2.0 * 3.14159265358979323846 * mode_of(m) / length;
}

double TorusGrid::wavenumber_dealiased(int m) const {
    const int mo = mode_of(m);
    if (mo == n / 2) return 0.0;
    return 2.0 * 3.14159265358979323846 * mo / length;
}

double TorusGrid::offset(int m) const { return mode_of(m) * h(); }

} // namespace nlch
