#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlch/config.hpp"

namespace nlch {

// --- kernel localization: distances of the eps-runs to the local reference run ---
struct EpsRow {
    double eps = 0;
    bool resolved = true;       // eps >= 2h
    double sup_l2 = 0;          // sup_t  || u_eps - u_loc ||_L2
    double l2_h1 = 0;           // ( sum_t dt || u_eps - u_loc ||_H1^2 )^(1/2)
};
struct EpsReport {
    std::vector<EpsRow> rows;   // ordered as the requested sequence (decreasing eps)
    bool monotone = false;      // sup_l2 strictly decreasing over resolved rows
    bool small_tail = false;    // last resolved sup_l2 < 0.1 * first
    bool pass() const { return monotone && small_tail; }
};

// --- vanishing-regularization Cauchy check ---
struct LambdaRow {
    double lambda_hi = 0, lambda_lo = 0; // consecutive ladder entries
    double dist_c0_l2 = 0;               // sup_t || u_hi - u_lo ||_L2
};
struct LambdaReport {
    std::vector<LambdaRow> rows;
    std::vector<double> ratios;          // dist[i] / dist[i+1]
    double min_ratio = 0;
    bool pass() const { return !rows.empty() && min_ratio >= 3.0; }
};

// --- continuous dependence: perturbation energy vs. data/velocity distance ---
struct DepRow {
    std::string branch;                  // "data" or "velocity"
    double scale = 0;
    double lhs = 0;  // max_t dual(u - u')^2 + sum_t dt E_eps(u - u')
    double rhs = 0;  // dual(u0 - u0')^2 + sum_t dt || beta - beta' ||_L3^2
    double ratio = 0;
};
struct DepReport {
    std::vector<DepRow> rows;
    double spread = 0;                   // worst within-branch (max ratio / min ratio)
    bool pass() const { return !rows.empty() && spread <= 3.0; }
};

// --- uniform-in-eps regularity diagnostics ---
struct RegRow {
    double eps = 0;
    double sup_dual_dtu = 0, sup_dtu_l2 = 0, l2_dtu_l2 = 0;
    double sup_mu_h1 = 0, l2_mu_h2 = 0, sup_xi_l2 = 0;
    double late_factor = 0;              // max over tracked series of
                                         // max_{[0,T]} / max_{[0,T/10]}
    bool bounded = false;                // late_factor <= 2
};
struct RegReport {
    std::vector<RegRow> rows;
    double max_variation = 0;            // max over summaries of (max-min)/min across eps
    bool bounded_ok = false;
    bool variation_ok = false;           // max_variation < 0.5
    bool pass() const { return bounded_ok && variation_ok; }
};

EpsReport study_eps(const RunSetup& s);
LambdaReport study_lambda(const RunSetup& s);
DepReport study_continuous_dependence(const RunSetup& s);
RegReport study_regularity(const RunSetup& s);

void write_csv(std::ostream& os, const EpsReport& r);
void write_csv(std::ostream& os, const LambdaReport& r);
void write_csv(std::ostream& os, const DepReport& r);
void write_csv(std::ostream& os, const RegReport& r);

std::string summarize(const EpsReport& r);
std::string summarize(const LambdaReport& r);
std::string summarize(const DepReport& r);
std::string summarize(const RegReport& r);

// Runs f(i) for i in [0, n) on up to NLCH_THREADS workers (default 1),
// preserving result order; exceptions are rethrown on the caller thread.
void parallel_indexed(int n, const std::function<void(int)>& f);

} // namespace nlch
