#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlch/errors.hpp"
#include "nlch/potential.hpp"
#include "nlch/spectral.hpp"

using namespace nlch;

namespace {

const PotentialSplit kCubic = make_potential(PotentialKind::cubic);
const PotentialSplit kLog = make_potential(PotentialKind::logarithmic, 0.3, 0.5);
const PotentialSplit kObst = make_potential(PotentialKind::obstacle);

// sample points safely inside the domain of the preset
double sample_point(const PotentialSplit& p, double u01) {
    const auto [lo, hi] = p.domain_interior();
    if (std::isinf(lo)) return -3.0 + 6.0 * u01;
    return lo + 1e-6 + (hi - lo - 2e-6) * u01;
}

// Simpson quadrature of the Yosida regularization from 0 to s; equals the
// Moreau envelope because both vanish at 0 and gamma_lambda is its derivative
double moreau_by_quadrature(const PotentialSplit& p, double lambda, double s) {
    const int n = 2000;
    const double h = s / n;
    double acc = p.yosida(lambda, 0.0) + p.yosida(lambda, s);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * p.yosida(lambda, i * h);
    return acc * h / 3.0;
}

} // namespace

TEST(Potential, PresetConstants) {
    EXPECT_STREQ(potential_name(PotentialKind::cubic), "cubic");
    EXPECT_STREQ(potential_name(PotentialKind::logarithmic), "logarithmic");
    EXPECT_STREQ(potential_name(PotentialKind::obstacle), "obstacle");
    EXPECT_DOUBLE_EQ(kCubic.norm_const, 0.25);
    EXPECT_DOUBLE_EQ(kObst.norm_const, 0.5);
    EXPECT_GT(kLog.norm_const, 0.0);
    EXPECT_DOUBLE_EQ(kCubic.pi(2.0), -2.0);
    EXPECT_DOUBLE_EQ(kLog.pi(2.0), -2.0);
    EXPECT_DOUBLE_EQ(kLog.pi_lipschitz(), 1.0);
    EXPECT_DOUBLE_EQ(kCubic.gamma(0.0), 0.0);
    EXPECT_DOUBLE_EQ(kLog.gamma(0.0), 0.0);
}

TEST(Potential, NormalizedToZeroMinimum) {
    // F = gamma_hat + Pi_hat + norm_const is >= 0 with an attained zero
    for (const auto* p : {&kCubic, &kLog}) {
        double fmin = 1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double s = sample_point(*p, i / 4000.0);
            const double f = p->regularized_potential(0.0, s);
            EXPECT_GE(f, -1e-12);
            fmin = std::min(fmin, f);
        }
        EXPECT_NEAR(fmin, 0.0, 1e-5); // grid resolution limits how close we land
    }
    // obstacle: F = 1/2 (1 - s^2) on [-1, 1], zero exactly at the endpoints
    EXPECT_NEAR(kObst.regularized_potential(0.0, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(kObst.regularized_potential(0.0, 0.0), 0.5, 1e-14);
}

TEST(Potential, DoubleWellShape) {
    // two symmetric minima away from 0 for cubic/logarithmic
    for (const auto* p : {&kCubic, &kLog}) {
        const double f0 = p->regularized_potential(0.0, 0.0);
        double smin = 0.0, fmin = f0;
        for (int i = 0; i <= 2000; ++i) {
            const double s = sample_point(*p, i / 2000.0);
            const double f = p->regularized_potential(0.0, s);
            if (f < fmin) fmin = f, smin = s;
        }
        EXPECT_GT(f0, fmin);
        EXPECT_GT(std::abs(smin), 0.1);
        EXPECT_NEAR(p->regularized_potential(0.0, smin), p->regularized_potential(0.0, -smin),
                    1e-10);
    }
}

TEST(Potential, PrimitivesDifferentiateCorrectly) {
    const double h = 1e-6;
    for (const auto* p : {&kCubic, &kLog}) {
        for (double u : {0.05, 0.35, 0.65, 0.95}) {
            const double s = sample_point(*p, u);
            const double dgam = (p->gamma_primitive(s + h) - p->gamma_primitive(s - h)) / (2 * h);
            EXPECT_NEAR(dgam, p->gamma(s), 1e-5 * (1.0 + std::abs(p->gamma(s))));
            const double dpi = (p->pi_primitive(s + h) - p->pi_primitive(s - h)) / (2 * h);
            EXPECT_NEAR(dpi, p->pi(s), 1e-6);
        }
    }
}

TEST(Potential, DomainViolations) {
    EXPECT_TRUE(kCubic.in_domain_interior(1e9));
    EXPECT_FALSE(kLog.in_domain_interior(1.0));
    EXPECT_FALSE(kObst.in_domain_interior(-1.5));
    for (auto bad : {+[] { kLog.gamma(1.0); }, +[] { kLog.gamma_primitive(-1.2); },
                     +[] { kObst.gamma(0.2); }, +[] { kObst.gamma_primitive(1.5); }}) {
        try {
            bad();
            FAIL() << "expected domain_violation";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), errc::domain_violation);
        }
    }
    EXPECT_DOUBLE_EQ(kObst.gamma_primitive(0.7), 0.0); // indicator is 0 inside
}

TEST(Yosida, ResolventSolvesImplicitEquation) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double edge = 1.0 - 1e-12;
    for (const auto* p : {&kCubic, &kLog}) {
        for (double lambda : {1.0, 1e-2, 1e-4}) {
            for (int i = 0; i < 200; ++i) {
                const double s = -4.0 + 8.0 * u01(rng);
                const double r = p->resolvent(lambda, s);
                if (p->kind == PotentialKind::logarithmic && std::abs(r) >= edge - 1e-15) {
                    // true root beyond double resolution; the clamp must be justified
                    // by the sign of the defect at the edge
                    EXPECT_GE((s - r - lambda * p->gamma(r)) * (r > 0 ? 1.0 : -1.0), -1e-9);
                    continue;
                }
                const double resid = r + lambda * p->gamma(r) - s;
                EXPECT_LT(std::abs(resid), 1e-9 * (1.0 + std::abs(s))) << "s=" << s;
            }
        }
    }
}

TEST(Yosida, ObstacleClosedForms) {
    // resolvent = clamp, yosida = dist/lambda, primitive = dist^2/(2 lambda)
    for (double lambda : {1.0, 1e-2, 1e-4}) {
        for (double s : {-3.0, -1.0, -0.4, 0.0, 0.7, 1.0, 2.5}) {
            const double r = std::clamp(s, -1.0, 1.0);
            EXPECT_NEAR(kObst.resolvent(lambda, s), r, 1e-14);
            EXPECT_NEAR(kObst.yosida(lambda, s), (s - r) / lambda, 1e-14 * (1 + std::abs(s) / lambda));
            const double d = std::max({0.0, s - 1.0, -1.0 - s});
            EXPECT_NEAR(kObst.yosida_primitive(lambda, s), d * d / (2 * lambda),
                        1e-14 * (1 + d * d / lambda));
        }
    }
}

TEST(Yosida, MonotoneLipschitzContractive) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (const auto* p : {&kCubic, &kLog, &kObst}) {
        for (double lambda : {1.0, 1e-2, 1e-4}) {
            EXPECT_NEAR(p->yosida(lambda, 0.0), 0.0, 1e-12);
            for (int i = 0; i < 500; ++i) {
                const double s1 = -4.0 + 8.0 * u01(rng), s2 = -4.0 + 8.0 * u01(rng);
                const double y1 = p->yosida(lambda, s1), y2 = p->yosida(lambda, s2);
                const double r1 = p->resolvent(lambda, s1), r2 = p->resolvent(lambda, s2);
                const double tol = 1e-9 * (1.0 + std::abs(s1 - s2) / lambda);
                EXPECT_GE((y1 - y2) * (s1 - s2), -tol);                             // monotone
                EXPECT_LE(std::abs(y1 - y2), std::abs(s1 - s2) / lambda + tol);     // Lipschitz
                EXPECT_LE(std::abs(r1 - r2), std::abs(s1 - s2) + 1e-11);            // contraction
            }
        }
    }
}

TEST(Yosida, MoreauEnvelopeMatchesQuadrature) {
    for (const auto* p : {&kCubic, &kLog, &kObst}) {
        for (double lambda : {1.0, 1e-2}) {
            for (double s : {-2.0, -0.8, 0.6, 1.7}) {
                const double direct = p->yosida_primitive(lambda, s);
                const double quad = moreau_by_quadrature(*p, lambda, s);
                // 1e-5: Simpson degrades at the obstacle kink panels
                EXPECT_NEAR(direct, quad, 1e-5 * (1.0 + std::abs(direct)))
                    << potential_name(p->kind) << " lambda=" << lambda << " s=" << s;
            }
        }
    }
}

TEST(Yosida, EnvelopeIncreasesAsLambdaVanishes) {
    // gamma_hat_lambda <= gamma_hat_mu <= gamma_hat for lambda >= mu
    for (const auto* p : {&kCubic, &kLog, &kObst}) {
        for (double s : {-0.95, -0.3, 0.5, 0.9}) {
            const double a = p->yosida_primitive(1.0, s);
            const double b = p->yosida_primitive(1e-2, s);
            const double c2 = p->yosida_primitive(1e-4, s);
            EXPECT_LE(a, b + 1e-12);
            EXPECT_LE(b, c2 + 1e-12);
            const double exact = p->kind == PotentialKind::obstacle
                                     ? 0.0
                                     : p->gamma_primitive(s);
            EXPECT_LE(c2, exact + 1e-12);
            EXPECT_NEAR(c2, exact, 1e-3 * (1.0 + std::abs(exact)));
        }
    }
}

TEST(Yosida, RejectsNonpositiveLambda) {
    try {
        kCubic.resolvent(0.0, 0.5);
        FAIL() << "expected invalid_input";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::invalid_input);
    }
}

TEST(Potential, MakePotentialValidation) {
    try {
        make_potential(PotentialKind::logarithmic, -0.1, 0.5);
        FAIL() << "expected invalid_input";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), errc::invalid_input);
    }
    // theta >= 2c: single well, norm_const collapses to 0
    const auto single = make_potential(PotentialKind::logarithmic, 1.2, 0.5);
    EXPECT_DOUBLE_EQ(single.norm_const, 0.0);
    EXPECT_NEAR(single.regularized_potential(0.0, 0.0), 0.0, 1e-14);
}

TEST(Potential, TotalFreeEnergyOnConstants) {
    const auto g = TorusGrid::make(2, 16, 2.0);
    const double c = 0.4, V = g.volume();
    ScalarField u(g, c);
    const double e0 = total_free_energy(u, nullptr, kCubic, 0.0, 0.0);
    const double want = V * (0.25 * c * c * c * c - 0.5 * c * c + 0.25);
    EXPECT_NEAR(e0, want, 1e-12 * (1.0 + std::abs(want)));
    // viscous part adds nothing on constants; Yosida lowers the potential term
    EXPECT_NEAR(total_free_energy(u, nullptr, kCubic, 0.0, 0.3), e0, 1e-12);
    EXPECT_LT(total_free_energy(u, nullptr, kCubic, 0.5, 0.0), e0);
}

TEST(Potential, TotalFreeEnergySplitsQuadraticPart) {
    const auto g = TorusGrid::make(2, 32, 2 * 3.14159265358979323846);
    ScalarField u(g);
    auto& v = u.mutable_values();
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) v[i * g.n + j] = 0.3 * std::cos(i * g.h());
    const auto kern = build_kernel(MollifierFamily::smooth_bump, 0.5, g);
    const auto sym = build_symbol(kern, g);
    const double with_sym = total_free_energy(u, &sym, kCubic, 1e-2, 0.0);
    const double local = total_free_energy(u, nullptr, kCubic, 1e-2, 0.0);
    EXPECT_NEAR(with_sym - local, nonlocal_energy(sym, u) - 0.5 * std::pow(norm_h1_semi(u), 2),
                1e-10);
}
