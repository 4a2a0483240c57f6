#include "fft_engine.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace nlch::detail {
namespace {

struct PlanPair {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

std::mutex plan_mutex;

// Plans are keyed by (dim, n) and created once with FFTW_UNALIGNED, which makes
// the new-array execute interface valid for any buffer.
const PlanPair& plans_for(const TorusGrid& g) {
    static std::map<std::pair<int, int>, PlanPair> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(g.dim, g.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<double> real(g.size());
    std::vector<fftw_complex> spec(g.spec_size());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    if (g.dim == 2) {
        p.r2c = fftw_plan_dft_r2c_2d(g.n, g.n, real.data(), spec.data(), flags);
        p.c2r = fftw_plan_dft_c2r_2d(g.n, g.n, spec.data(), real.data(), flags);
    } else {
        p.r2c = fftw_plan_dft_r2c_3d(g.n, g.n, g.n, real.data(), spec.data(), flags);
        p.c2r = fftw_plan_dft_c2r_3d(g.n, g.n, g.n, spec.data(), real.data(), flags);
    }
    return cache.emplace(key, p).first->second;
}

} // namespace

void fft_forward(const TorusGrid& g, const double* in, std::complex<double>* out) {
    const PlanPair& p = plans_for(g);
    // out-of-place r2c preserves its input
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
    const double scale = 1.0 / static_cast<double>(g.size());
    const std::size_t ns = g.spec_size();
    for (std::size_t i = 0; i < ns; ++i) out[i] *= scale;
}

void fft_inverse(const TorusGrid& g, const std::complex<double>* in, double* out) {
    const PlanPair& p = plans_for(g);
    // multi-dimensional c2r destroys its input, so run on a scratch copy
    std::vector<std::complex<double>> scratch(in, in + g.spec_size());
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), out);
}

} // namespace nlch::detail
