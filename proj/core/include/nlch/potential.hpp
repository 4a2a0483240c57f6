#pragma once

#include <string>
#include <utility>

#include "nlch/field.hpp"
#include "nlch/kernel.hpp"

namespace nlch {

enum class PotentialKind { cubic, logarithmic, obstacle };

const char* potential_name(PotentialKind k);

// Double-well potential split F = gamma_hat + Pi_hat + norm_const, with gamma a
// maximal monotone graph and Pi Lipschitz. norm_const is chosen so min F = 0.
//   cubic:       gamma(s) = s^3,                     Pi(s) = -s
//   logarithmic: gamma(s) = (theta/2) ln((1+s)/(1-s)) on (-1,1), Pi(s) = -2 c s
//   obstacle:    gamma = subdifferential of I_[-1,1], Pi(s) = -s
struct PotentialSplit {
    PotentialKind kind = PotentialKind::cubic;
    double theta = 0.3;
    double c = 0.5;
    double norm_const = 0.25;

    double pi(double s) const;
    double pi_primitive(double s) const;
    double pi_lipschitz() const; // C_Pi

    // single-valued branch of gamma; domain_violation outside D(gamma) for
    // logarithmic, and for obstacle anywhere (the graph is not a function there)
    double gamma(double s) const;
    // gamma_hat; +infinity outside the domain reported as domain_violation
    double gamma_primitive(double s) const;

    // interior of D(gamma): (-1,1) for logarithmic/obstacle, all reals for cubic
    std::pair<double, double> domain_interior() const;
    bool in_domain_interior(double s) const;

    // r = (I + lambda gamma)^{-1}(s), lambda > 0; monotone nonexpansive in s
    double resolvent(double lambda, double s) const;
    // gamma_lambda(s) = (s - resolvent)/lambda; 1/lambda-Lipschitz, monotone
    double yosida(double lambda, double s) const;
    // Moreau envelope: gamma_hat(r(s)) + lambda/2 gamma_lambda(s)^2
    double yosida_primitive(double lambda, double s) const;

    // F_lambda(s) = gamma_hat_lambda + Pi_hat + norm_const (lambda == 0 uses gamma_hat)
    double regularized_potential(double lambda, double s) const;
};

PotentialSplit make_potential(PotentialKind kind, double theta = 0.3, double c = 0.5);

// lambda_visc/2 ||grad u||^2 + E_quad(u) + int F_lambda(u); the quadratic part is
// E_eps when `sym` is non-null, else the Dirichlet energy 1/2 ||grad u||^2.
double total_free_energy(const ScalarField& u, const NonlocalSymbol* sym,
                         const PotentialSplit& split, double lambda_yosida,
                         double lambda_visc);

} // namespace nlch
