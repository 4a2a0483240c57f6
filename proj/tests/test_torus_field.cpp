#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "nlch/errors.hpp"
#include "nlch/field.hpp"
#include "nlch/snapshot.hpp"
#include "nlch/spectral.hpp"
#include "nlch/torus_grid.hpp"

using namespace nlch;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField random_smooth(const TorusGrid& g, unsigned seed, int band = 3) {
    // band-limited random trig polynomial: smooth and alias-free under products
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    ScalarField f(g);
    auto& v = f.mutable_values();
    const double k1 = kTwoPi / g.length;
    const int n = g.n, nz = g.dim == 3 ? g.n : 1;
    for (int a = -band; a <= band; ++a)
        for (int b = -band; b <= band; ++b) {
            const double ca = amp(rng), cb = amp(rng);
            std::size_t idx = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < nz; ++k, ++idx) {
                        const double x = i * g.h(), y = j * g.h(), z = k * g.h();
                        v[idx] += ca * std::cos(k1 * (a * x + b * y)) +
                                  cb * std::sin(k1 * (a * x + b * y + (g.dim == 3 ? z : 0.0)));
                    }
        }
    return f;
}

} // namespace

TEST(TorusGrid, ValidatesArguments) {
    EXPECT_NO_THROW(TorusGrid::make(2, 4, 1.0));
    EXPECT_NO_THROW(TorusGrid::make(3, 8, 2.5));
    for (auto bad : {+[] { TorusGrid::make(1, 8, 1.0); }, +[] { TorusGrid::make(4, 8, 1.0); },
                     +[] { TorusGrid::make(2, 7, 1.0); }, +[] { TorusGrid::make(2, 2, 1.0); },
                     +[] { TorusGrid::make(2, 8, 0.0); }, +[] { TorusGrid::make(2, 8, -1.0); }}) {
        try {
            bad();
            FAIL() << "expected invalid_input";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), errc::invalid_input);
        }
    }
}

TEST(TorusGrid, SizesAndModes) {
    const auto g = TorusGrid::make(2, 8, 4.0);
    EXPECT_EQ(g.size(), 64u);
    EXPECT_EQ(g.spec_size(), 8u * 5u);
    EXPECT_DOUBLE_EQ(g.h(), 0.5);
    EXPECT_DOUBLE_EQ(g.volume(), 16.0);
    EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25);
    EXPECT_EQ(g.mode_of(0), 0);
    EXPECT_EQ(g.mode_of(3), 3);
    EXPECT_EQ(g.mode_of(4), 4);  // Nyquist stays +n/2
    EXPECT_EQ(g.mode_of(5), -3);
    EXPECT_EQ(g.mode_of(7), -1);
    EXPECT_DOUBLE_EQ(g.wavenumber(1), kTwoPi / 4.0);
    EXPECT_DOUBLE_EQ(g.wavenumber_dealiased(4), 0.0);
    EXPECT_NE(g.wavenumber(4), 0.0);
    EXPECT_DOUBLE_EQ(g.offset(7), -0.5);

    const auto g3 = TorusGrid::make(3, 6, 1.0);
    EXPECT_EQ(g3.size(), 216u);
    EXPECT_EQ(g3.spec_size(), 36u * 4u);
}

TEST(TorusGrid, SpectralIterationCoversLayout) {
    for (int dim : {2, 3}) {
        const auto g = TorusGrid::make(dim, 6, 1.0);
        std::size_t count = 0, last = 0;
        for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
            EXPECT_EQ(idx, count);
            for (int a = 0; a < dim; ++a) {
                EXPECT_GE(m[a], -g.n / 2 + (a == dim - 1 ? g.n / 2 : 0));
                EXPECT_LE(m[a], g.n / 2);
            }
            for (int a = dim; a < 3; ++a) EXPECT_EQ(m[a], 0);
            last = idx;
            ++count;
        });
        EXPECT_EQ(count, g.spec_size());
        EXPECT_EQ(last + 1, g.spec_size());
    }
}

TEST(Fft, RoundTripIsIdentity) {
    for (int dim : {2, 3}) {
        const auto g = TorusGrid::make(dim, dim == 2 ? 16 : 8, 2.0);
        const auto f = random_smooth(g, 7u + dim);
        const auto back = inverse_fft(g, forward_fft(g, f.values()));
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(back[i] - f.values()[i]));
        EXPECT_LT(err, 1e-13) << "dim " << dim;
    }
}

TEST(Fft, CosineCoefficient) {
    // v = 3 cos(2 k1 x) has c_{+-2} = 1.5 under the 1/N forward scaling
    const auto g = TorusGrid::make(2, 16, 5.0);
    ScalarField f(g);
    auto& v = f.mutable_values();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) v[i * g.n + j] = 3.0 * std::cos(2.0 * kTwoPi / g.length * i * g.h());
    const auto& c = f.spectrum();
    for_each_spectral(g, [&](std::size_t idx, const std::array<int, 3>& m) {
        const double want = (std::abs(m[0]) == 2 && m[1] == 0) ? 1.5 : 0.0;
        EXPECT_NEAR(c[idx].real(), want, 1e-13);
        EXPECT_NEAR(c[idx].imag(), 0.0, 1e-13);
    });
}

TEST(Fft, ParsevalMatchesQuadrature) {
    for (int dim : {2, 3}) {
        const auto g = TorusGrid::make(dim, dim == 2 ? 24 : 10, 3.0);
        const auto f = random_smooth(g, 11u * dim);
        double quad = 0.0;
        for (double x : f.values()) quad += x * x;
        quad *= g.cell_volume();
        const double spec =
            g.volume() * spectral_sum(g, f.spectrum(), [](std::size_t, const std::array<int, 3>&) { return 1.0; });
        EXPECT_NEAR(spec, quad, 1e-11 * (1.0 + quad));
        EXPECT_NEAR(norm_l2(f) * norm_l2(f), quad, 1e-11 * (1.0 + quad));
    }
}

TEST(Spectral, DerivativesExactOnModes) {
    const auto g = TorusGrid::make(2, 32, kTwoPi);
    ScalarField f(g);
    auto& v = f.mutable_values();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            v[i * g.n + j] = std::sin(3.0 * i * g.h()) * std::cos(2.0 * j * g.h());
    const auto gx = gradient_component(f, 0);
    const auto gy = gradient_component(f, 1);
    const auto lap = laplacian(f);
    double e1 = 0, e2 = 0, e3 = 0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const double x = i * g.h(), y = j * g.h();
            const std::size_t idx = i * g.n + j;
            e1 = std::max(e1, std::abs(gx.values()[idx] - 3.0 * std::cos(3 * x) * std::cos(2 * y)));
            e2 = std::max(e2, std::abs(gy.values()[idx] + 2.0 * std::sin(3 * x) * std::sin(2 * y)));
            e3 = std::max(e3, std::abs(lap.values()[idx] + 13.0 * std::sin(3 * x) * std::cos(2 * y)));
        }
    EXPECT_LT(e1, 1e-12);
    EXPECT_LT(e2, 1e-12);
    EXPECT_LT(e3, 1e-11);
}

TEST(Spectral, LaplacianEqualsDivGrad) {
    for (int dim : {2, 3}) {
        const auto g = TorusGrid::make(dim, dim == 2 ? 16 : 8, 1.7);
        const auto f = random_smooth(g, 21u + dim);
        const auto lhs = laplacian(f);
        const auto rhs = divergence(gradient(f));
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err = std::max(err, std::abs(lhs.values()[i] - rhs.values()[i]));
        EXPECT_LT(err, 1e-10) << "dim " << dim;
    }
}

TEST(Spectral, InverseLaplacianIsRightInverse) {
    const auto g = TorusGrid::make(2, 16, 2.0);
    auto f = random_smooth(g, 5);
    auto& v = f.mutable_values();
    const double m = mean_value(ScalarField(g, v));
    for (auto& x : v) x -= m;
    const auto w = inverse_laplacian(f);
    const auto back = laplacian(w);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max(err, std::abs(back.values()[i] + f.values()[i]));
    EXPECT_LT(err, 1e-10);
    EXPECT_NEAR(mean_value(w), 0.0, 1e-13);
}

TEST(Spectral, InverseLaplacianRejectsNonzeroMean) {
    const auto g = TorusGrid::make(2, 8, 1.0);
    ScalarField f(g, 0.5);
    try {
        inverse_laplacian(f);
        FAIL() << "expected mean_not_zero";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::mean_not_zero);
    }
}

TEST(Spectral, NormsOnKnownField) {
    // v = c + a cos(k1 x): l2^2 = V (c^2 + a^2/2), |grad v|^2 = V k1^2 a^2/2,
    // dual^2 = V c^2 + V (a^2/2) / k1^2
    const auto g = TorusGrid::make(2, 32, 4.0);
    const double c = 0.7, a = 0.3, k1 = kTwoPi / g.length, V = g.volume();
    ScalarField f(g);
    auto& v = f.mutable_values();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) v[i * g.n + j] = c + a * std::cos(k1 * i * g.h());
    const auto ns = norms(f);
    EXPECT_NEAR(ns.mean, c, 1e-13);
    EXPECT_NEAR(ns.l2 * ns.l2, V * (c * c + a * a / 2), 1e-11);
    EXPECT_NEAR(ns.h1_semi * ns.h1_semi, V * k1 * k1 * a * a / 2, 1e-11);
    EXPECT_NEAR(ns.dual * ns.dual, V * c * c + V * (a * a / 2) / (k1 * k1), 1e-11);
    EXPECT_NEAR(norm_h1(f) * norm_h1(f), ns.l2 * ns.l2 + ns.h1_semi * ns.h1_semi, 1e-12);
    const double lap2 = V * k1 * k1 * k1 * k1 * a * a / 2;
    EXPECT_NEAR(norm_h2(f) * norm_h2(f), ns.l2 * ns.l2 + ns.h1_semi * ns.h1_semi + lap2, 1e-10);
}

TEST(Spectral, IntegralAndInnerProduct) {
    const auto g = TorusGrid::make(2, 16, 3.0);
    ScalarField one(g, 1.0);
    EXPECT_NEAR(integral(one), g.volume(), 1e-12);
    const auto f = random_smooth(g, 31);
    EXPECT_NEAR(inner_l2(f, one), integral(f), 1e-11 * (1.0 + std::abs(integral(f))));
    EXPECT_NEAR(inner_l2(f, f), norm_l2(f) * norm_l2(f), 1e-11 * (1.0 + inner_l2(f, f)));
}

TEST(Field, MutationDropsSpectrumCache) {
    const auto g = TorusGrid::make(2, 8, 1.0);
    ScalarField f(g, 1.0);
    (void)f.spectrum();
    EXPECT_TRUE(f.has_spectrum());
    f.mutable_values()[0] = 2.0;
    EXPECT_FALSE(f.has_spectrum());
    EXPECT_NEAR(f.spectrum()[0].real(), 1.0 + 1.0 / 64.0, 1e-14);
}

TEST(Field, GridMismatchRejected) {
    const auto g = TorusGrid::make(2, 8, 1.0);
    try {
        ScalarField f(g, std::vector<double>(63, 0.0));
        FAIL() << "expected grid_mismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::grid_mismatch);
    }
}

TEST(Snapshot, RoundTrip) {
    const auto g = TorusGrid::make(2, 12, 2.5);
    const auto f = random_smooth(g, 77);
    const auto path = std::filesystem::temp_directory_path() / "nlch_snap_test.nlch";
    write_snapshot(path.string(), f, 0.625);
    const auto back = read_snapshot(path.string());
    EXPECT_EQ(back.field.grid(), g);
    EXPECT_DOUBLE_EQ(back.time, 0.625);
    for (std::size_t i = 0; i < g.size(); ++i)
        EXPECT_DOUBLE_EQ(back.field.values()[i], f.values()[i]);
    std::filesystem::remove(path);
}

TEST(Snapshot, RejectsGarbage) {
    const auto path = std::filesystem::temp_directory_path() / "nlch_snap_bad.nlch";
    {
        std::FILE* fp = std::fopen(path.string().c_str(), "wb");
        std::fputs("not a snapshot", fp);
        std::fclose(fp);
    }
    try {
        read_snapshot(path.string());
        FAIL() << "expected invalid_input";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::invalid_input);
    }
    std::filesystem::remove(path);
    try {
        read_snapshot("/nonexistent/dir/f.nlch");
        FAIL() << "expected invalid_input";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::invalid_input);
    }
}
