#include "nlch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlch/errors.hpp"
#include "nlch/spectral.hpp"

namespace nlch {

namespace {

// safeguarded Newton for strictly increasing f on [lo, hi] with f(lo) <= 0 <= f(hi)
template <typename F, typename DF>
double solve_monotone(F f, DF df, double lo, double hi, double x0) {
    double x = std::clamp(x0, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx > 0)
            hi = x;
        else
            lo = x;
        const double step = fx / df(x);
        double xn = x - step;
        // convergence must be judged on the raw Newton step: once it drops
        // below one ulp, xn == x and the bracket guard would force a spurious
        // bisection away from the converged root
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) return xn;
        if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi); // bisection fallback
        if (xn == x) return x; // bracket exhausted at double resolution
        x = xn;
    }
    return x;
}

} // namespace

const char* potential_name(PotentialKind k) {
    switch (k) {
    case PotentialKind::cubic: return "cubic";
    case PotentialKind::logarithmic: return "logarithmic";
    case PotentialKind::obstacle: return "obstacle";
    }
    return "unknown";
}

double PotentialSplit::pi(double s) const {
    return kind == PotentialKind::logarithmic ? -2.0 * c * s : -s;
}

double PotentialSplit::pi_primitive(double s) const {
    return kind == PotentialKind::logarithmic ? -c * s * s : -0.5 * s * s;
}

double PotentialSplit::pi_lipschitz() const {
    return kind == PotentialKind::logarithmic ? 2.0 * c : 1.0;
}

std::pair<double, double> PotentialSplit::domain_interior() const {
    if (kind == PotentialKind::cubic)
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    return {-1.0, 1.0};
}

bool PotentialSplit::in_domain_interior(double s) const {
    const auto [lo, hi] = domain_interior();
    return s > lo && s < hi;
}

double PotentialSplit::gamma(double s) const {
    switch (kind) {
    case PotentialKind::cubic:
        return s * s * s;
    case PotentialKind::logarithmic:
        if (!in_domain_interior(s))
            fail(errc::domain_violation,
                 "logarithmic gamma undefined at s = " + std::to_string(s));
        return 0.5 * theta * std::log((1.0 + s) / (1.0 - s));
    case PotentialKind::obstacle:
        fail(errc::domain_violation,
             "obstacle graph has no single-valued branch; use resolvent/yosida");
    }
    fail(errc::invalid_input, "unknown potential kind");
}

double PotentialSplit::gamma_primitive(double s) const {
    switch (kind) {
    case PotentialKind::cubic:
        return 0.25 * s * s * s * s;
    case PotentialKind::logarithmic: {
        if (s < -1.0 || s > 1.0)
            fail(errc::domain_violation,
                 "logarithmic gamma_hat is +inf at s = " + std::to_string(s));
        const double a = 1.0 + s, b = 1.0 - s; // x log x -> 0 at the endpoints
        const double fa = a > 0 ? a * std::log(a) : 0.0;
        const double fb = b > 0 ? b * std::log(b) : 0.0;
        return 0.5 * theta * (fa + fb);
    }
    case PotentialKind::obstacle:
        if (s < -1.0 || s > 1.0)
            fail(errc::domain_violation,
                 "obstacle gamma_hat is +inf at s = " + std::to_string(s));
        return 0.0;
    }
    fail(errc::invalid_input, "unknown potential kind");
}

double PotentialSplit::resolvent(double lambda, double s) const {
    if (!(lambda > 0)) fail(errc::invalid_input, "resolvent needs lambda > 0");
    switch (kind) {
    case PotentialKind::cubic: {
        const double lo = std::min(0.0, s), hi = std::max(0.0, s);
        return solve_monotone([&](double r) { return r + lambda * r * r * r - s; },
                              [&](double r) { return 1.0 + 3.0 * lambda * r * r; }, lo, hi, s);
    }
    case PotentialKind::logarithmic: {
        const double edge = 1.0 - 1e-12;
        auto f = [&](double r) {
            return r + 0.5 * lambda * theta * std::log((1.0 + r) / (1.0 - r)) - s;
        };
        auto df = [&](double r) { return 1.0 + lambda * theta / (1.0 - r * r); };
        if (f(-edge) >= 0.0) return -edge;
        if (f(edge) <= 0.0) return edge;
        return solve_monotone(f, df, -edge, edge, std::clamp(s, -0.5, 0.5));
    }
    case PotentialKind::obstacle:
        return std::clamp(s, -1.0, 1.0);
    }
    fail(errc::invalid_input, "unknown potential kind");
}

double PotentialSplit::yosida(double lambda, double s) const {
    return (s - resolvent(lambda, s)) / lambda;
}

double PotentialSplit::yosida_primitive(double lambda, double s) const {
    const double r = resolvent(lambda, s);
    const double y = (s - r) / lambda;
    return gamma_primitive(r) + 0.5 * lambda * y * y;
}

double PotentialSplit::regularized_potential(double lambda, double s) const {
    const double gpart = lambda > 0 ? yosida_primitive(lambda, s) : gamma_primitive(s);
    return gpart + pi_primitive(s) + norm_const;
}

PotentialSplit make_potential(PotentialKind kind, double theta, double c) {
    PotentialSplit p;
    p.kind = kind;
    p.theta = theta;
    p.c = c;
    switch (kind) {
    case PotentialKind::cubic:
        p.norm_const = 0.25;
        break;
    case PotentialKind::obstacle:
        p.norm_const = 0.5;
        break;
    case PotentialKind::logarithmic: {
        if (!(theta > 0) || !(c > 0))
            fail(errc::invalid_input, "logarithmic potential needs theta > 0 and c > 0");
        if (theta >= 2.0 * c) {
            p.norm_const = 0.0; // single well at 0, already at height 0
            break;
        }
        // deepest well s* in (0,1): gamma(s*) = 2 c s*; bisection on the sign change
        auto f = [&](double s) {
            return 0.5 * theta * std::log((1.0 + s) / (1.0 - s)) - 2.0 * c * s;
        };
        double lo = 1e-8, hi = 1.0 - 1e-14;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0 ? lo : hi) = mid;
        }
        const double sstar = 0.5 * (lo + hi);
        p.norm_const = c * sstar * sstar - p.gamma_primitive(sstar);
        break;
    }
    }
    return p;
}

double total_free_energy(const ScalarField& u, const NonlocalSymbol* sym,
                         const PotentialSplit& split, double lambda_yosida,
                         double lambda_visc) {
    double e = 0.5 * lambda_visc * norm_h1_semi(u) * norm_h1_semi(u);
    if (sym != nullptr) {
        e += nonlocal_energy(*sym, u);
    } else {
        const double g = norm_h1_semi(u);
        e += 0.5 * g * g;
    }
    double pot = 0.0;
    for (double s : u.values()) pot += split.regularized_potential(lambda_yosida, s);
    return e + pot * u.grid().cell_volume();
}

} // namespace nlch
