#pragma once

#include <array>
#include <cstddef>

namespace nlch {

// Uniform grid on the flat torus [0,L)^dim, dim in {2,3}, n points per axis (even).
// Real fields are stored row-major; spectra use the half-complex r2c layout
// (last axis truncated to n/2+1 entries).
struct TorusGrid {
    int dim = 2;
    int n = 0;
    double length = 0.0;

    static TorusGrid make(int dim, int n, double length);

    double h() const { return length / n; }
    double volume() const;
    double cell_volume() const;
    std::size_t size() const;      // n^dim
    std::size_t spec_size() const; // n^(dim-1) * (n/2+1)
    int last_spec() const { return n / 2 + 1; }

    // signed integer mode for storage index m in [0,n)
    int mode_of(int m) const { return m <= n / 2 ? m : m - n; }
    // physical wavenumber 2*pi*mode/L
    double wavenumber(int m) const;
    // same, with the Nyquist mode (m == n/2) zeroed; used by all derivative operators
    double wavenumber_dealiased(int m) const;
    // minimal-image signed coordinate of grid index m (for kernel offsets)
    double offset(int m) const;

    bool operator==(const TorusGrid& o) const {
        return dim == o.dim && n == o.n && length == o.length;
    }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

// Iterates the r2c spectral layout, invoking f(flat_index, modes) where modes[i]
// is the signed integer mode per axis. Unused axes of `modes` are zero.
template <typename F>
void for_each_spectral(const TorusGrid& g, F&& f) {
    const int n = g.n;
    const int nl = g.last_spec();
    std::array<int, 3> m{0, 0, 0};
    if (g.dim == 2) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            m[0] = (i <= n / 2) ? i : i - n;
            for (int j = 0; j < nl; ++j, ++idx) {
                m[1] = j;
                f(idx, m);
            }
        }
    } else {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i) {
            m[0] = (i <= n / 2) ? i : i - n;
            for (int j = 0; j < n; ++j) {
                m[1] = (j <= n / 2) ? j : j - n;
                for (int k = 0; k < nl; ++k, ++idx) {
                    m[2] = k;
                    f(idx, m);
                }
            }
        }
    }
}

// Parseval weight of an r2c entry: 2 when the conjugate partner is not stored, else 1.
inline double hermitian_weight(const TorusGrid& g, int last_axis_mode) {
    return (last_axis_mode == 0 || last_axis_mode == g.n / 2) ? 1.0 : 2.0;
}

} // namespace nlch
