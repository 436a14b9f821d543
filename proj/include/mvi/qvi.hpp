#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mvi/dividend.hpp"
#include "mvi/model.hpp"

namespace mvi {

// Scalar reduction of a measure functional to u = <mu, q>. Analytic
// derivatives are optional; absent ones fall back to central differences with
// relative step fd_step.
struct ReducedFunction {
    std::function<double(double)> psi;
    std::function<double(double)> dpsi;   // may be empty
    std::function<double(double)> d2psi;  // may be empty
    double fd_step = 1e-5;
};

// Two-branch candidate value built from a solution; c1_factor != 1 produces a
// deliberately inconsistent candidate for perturbation tests.
ReducedFunction reduced_value(const DividendSolution& sol, double c1_factor = 1.0);

struct MResult {
    double value = 0.0;
    double argmax_zeta = 0.0;
};

// M psi(u) = sup { psi(u - c - (1+lambda) zeta) + zeta : 0 <= zeta <=
// (u-c)/(1+lambda) }, by uniform grid search plus one golden-section
// refinement around the best cell. Throws NoAdmissibleImpulse when u <= c.
MResult intervention_operator_M(const ReducedFunction& psi, double u, const ModelParams& p,
                                std::size_t grid_n = 1024);

// G0 psi(u) = -rho psi + alpha0 u psi' + sigma1^2/2 u^2 psi''. The jump term
// vanishes on functions of u alone, so it is omitted here; the nonlocal
// correction relevant above the free boundary is added separately in verify.
double generator_G0(const ReducedFunction& psi, double u, const ModelParams& p);

// Closed-form jump-bound criterion gamma1 <= (rho+||nu||)/(alpha0+||nu||).
// Returns {holds, margin = bound - gamma1}.
std::pair<bool, double> check_condition_vi(const DividendSolution& sol, const ModelParams& p);

struct QviGridSpec {
    std::size_t n = 2000;
    double u_max = 0.0;  // defaults to 2 * u_bar when <= 0
    std::size_t zeta_grid = 1024;
    double tol_ii = 1e-10;   // exact-identity checks
    double tol_x = 1e-6;     // generator on the continuation region
    double tol_vi = 1e-8;    // generator above the boundary
    double tol_fit = 1e-8;   // one-sided value/derivative gaps at u_bar
};

struct QviReport {
    std::vector<double> grid;
    // Per-point values; NaN where a condition does not apply at that u.
    std::vector<double> cond_ii;  // psi - M psi (vacuous for u <= c)
    std::vector<double> cond_x;   // G0 psi on (0, u_bar)
    std::vector<double> cond_vi;  // G0 psi + jump correction on [u_bar, u_max]
    double fit_value_gap = 0.0;
    double fit_deriv_gap = 0.0;
    bool ii_ok = false;
    bool x_ok = false;
    bool vi_ok = false;
    bool fit_ok = false;
    bool passed = false;
    // Worst offenders, for reporting.
    double ii_min = 0.0;         // min of psi - M psi over the whole grid
    double ii_eq_max_abs = 0.0;  // max |psi - M psi| where equality must hold
    double x_max_abs = 0.0;
    double vi_max = 0.0;
};

// Grid evaluation of the variational conditions for a candidate value psi:
// psi >= M psi everywhere (equality at and above u_bar), G0 psi = 0 on the
// continuation region, G0 psi + jump correction <= 0 above it, and C^1
// pasting at u_bar. Deterministic for identical inputs.
QviReport verify(const ReducedFunction& psi, const DividendSolution& sol, const ModelParams& p,
                 const QviGridSpec& grid_spec = {});

} // namespace mvi
