#pragma once

#include <utility>

#include "mvi/model.hpp"
#include "mvi/policy.hpp"

namespace mvi {

// The optimal-dividend problem for the conditional mean u admits a closed-form
// value: Phi(s, u) = e^{-rho s} * (C1 u^gamma1 below u_bar, (u-c)/(1+lambda)
// at and above), with gamma1 the root > 1 of
//   F(gamma) = -rho + alpha0 gamma + sigma1^2/2 gamma (gamma - 1) = 0.
// Solvable only when alpha0 < rho; alpha0 > rho makes the value infinite.

enum class CaseSplit { Finite, Infinite };

// Throws BoundaryCase when alpha0 == rho (covered by neither strict case).
CaseSplit check_case_split(const ModelParams& p);

struct DividendSolution {
    double gamma1 = 0.0;  // characteristic exponent, > 1
    double u_bar = 0.0;   // free boundary, > c
    double C1 = 0.0;      // value coefficient, > 0
    ModelParams params;

    // Negative root; diagnostics only. Its coefficient C2 is pinned to zero by
    // boundedness of the value near u = 0.
    double gamma2 = 0.0;
    static constexpr double C2 = 0.0;
};

// F evaluated at gamma; exposed for tests.
double characteristic_F(const ModelParams& p, double gamma) noexcept;

// Both roots (gamma1 > 1, gamma2 < 0) by the cancellation-safe quadratic
// formula. Throws NoRoot unless alpha0 < rho and sigma1 != 0.
std::pair<double, double> solve_gamma_roots(const ModelParams& p);
double solve_gamma1(const ModelParams& p);

// Free boundary and coefficient from the smooth-fit system; both identities
// are re-verified before returning (the slope tolerance scales with gamma1,
// which conditions the identity).
std::pair<double, double> thresholds(const ModelParams& p, double gamma1);

DividendSolution solve(const ModelParams& p);

double value_phi(double s, double u, const DividendSolution& sol);

ThresholdPolicy optimal_policy(const DividendSolution& sol);

// E[e^{-rho tau_b}] for the first hitting of level b from x <= b by the
// conditional-mean dynamics: (x/b)^gamma1. Throws BadBarrier if x > b.
double hitting_laplace_oracle(double x, double b, const DividendSolution& sol);

// (rho + ||nu||)/(alpha0 + ||nu||); +inf when the denominator is <= 0
// (positive-part convention, so the jump-bound condition holds trivially).
double condition_vi_bound(const ModelParams& p) noexcept;

} // namespace mvi
