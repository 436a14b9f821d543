#include "mvi/dividend.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mvi/errors.hpp"

namespace mvi {

CaseSplit check_case_split(const ModelParams& p) {
    if (p.alpha0 > p.rho) return CaseSplit::Infinite;
    if (p.alpha0 < p.rho) return CaseSplit::Finite;
    throw BoundaryCase("alpha0 == rho lies outside both solvable regimes");
}

double characteristic_F(const ModelParams& p, double gamma) noexcept {
    return -p.rho + p.alpha0 * gamma + 0.5 * p.sigma1 * p.sigma1 * gamma * (gamma - 1.0);
}

std::pair<double, double> solve_gamma_roots(const ModelParams& p) {
    if (p.sigma1 == 0.0) throw NoRoot("solve_gamma_roots: sigma1 must be nonzero");
    if (!(p.alpha0 < p.rho))
        throw NoRoot("solve_gamma_roots: requires alpha0 < rho (finite-value case)");
    // a g^2 + b g + c = 0 with a > 0, c < 0: one positive and one negative
    // root. Compute the larger-magnitude one first to avoid cancellation when
    // alpha0 is close to sigma1^2/2.
    const double a = 0.5 * p.sigma1 * p.sigma1;
    const double b = p.alpha0 - a;
    const double c = -p.rho;
    const double disc = std::sqrt(b * b - 4.0 * a * c);  // > 0 since c < 0
    const double q = -0.5 * (b + std::copysign(disc, b == 0.0 ? 1.0 : b));
    double r1 = q / a;
    double r2 = c / q;
    if (r1 < r2) std::swap(r1, r2);
    return {r1, r2};  // r1 > 0 > r2
}

double solve_gamma1(const ModelParams& p) {
    const double gamma1 = solve_gamma_roots(p).first;
    // alpha0 < rho forces F(1) = alpha0 - rho < 0, so the positive root
    // exceeds 1; anything else is an internal error.
    if (!(gamma1 > 1.0)) throw NoRoot("solve_gamma1: positive root not > 1");
    return gamma1;
}

std::pair<double, double> thresholds(const ModelParams& p, double gamma1) {
    const double c = p.c_fixed;
    const double u_bar = gamma1 * c / (gamma1 - 1.0);
    const double C1 = (u_bar - c) / (1.0 + p.lambda_prop) * std::pow(u_bar, -gamma1);
    // Smooth fit: value and slope of both branches agree at u_bar. The slope
    // residual is conditioned like gamma1 * eps: u_bar - c shrinks as
    // c/(gamma1 - 1) while the rounding of u_bar stays absolute, so the
    // slope guard must scale with gamma1.
    const double fit_value = C1 * std::pow(u_bar, gamma1) - (u_bar - c) / (1.0 + p.lambda_prop);
    const double fit_slope = C1 * gamma1 * std::pow(u_bar, gamma1 - 1.0) - 1.0 / (1.0 + p.lambda_prop);
    const double scale = std::max(1.0, u_bar);
    const double slope_tol = 1e-12 + gamma1 * 1e-15;
    if (std::abs(fit_value) > 1e-12 * scale || std::abs(fit_slope) > slope_tol)
        throw NoRoot("thresholds: smooth-fit identities violated (fit_value=" +
                     std::to_string(fit_value) + ", fit_slope=" + std::to_string(fit_slope) + ")");
    return {u_bar, C1};
}

DividendSolution solve(const ModelParams& p) {
    if (check_case_split(p) == CaseSplit::Infinite)
        throw NoRoot("solve: value is +infinity (alpha0 > rho)");
    DividendSolution sol;
    const auto [g1, g2] = solve_gamma_roots(p);
    sol.gamma1 = g1;
    sol.gamma2 = g2;
    if (!(sol.gamma1 > 1.0)) throw NoRoot("solve: positive root not > 1");
    const auto [u_bar, C1] = thresholds(p, sol.gamma1);
    sol.u_bar = u_bar;
    sol.C1 = C1;
    sol.params = p;
    return sol;
}

double value_phi(double s, double u, const DividendSolution& sol) {
    const double discount = std::exp(-sol.params.rho * s);
    if (u < sol.u_bar) return discount * sol.C1 * std::pow(u, sol.gamma1);
    return discount * (u - sol.params.c_fixed) / (1.0 + sol.params.lambda_prop);
}

ThresholdPolicy optimal_policy(const DividendSolution& sol) {
    return ThresholdPolicy{sol.u_bar};
}

double hitting_laplace_oracle(double x, double b, const DividendSolution& sol) {
    if (x > b)
        throw BadBarrier("hitting_laplace_oracle: start " + std::to_string(x) +
                         " above barrier " + std::to_string(b));
    return std::pow(x / b, sol.gamma1);
}

double condition_vi_bound(const ModelParams& p) noexcept {
    const double nu = levy_mass(p.levy);
    const double denom = p.alpha0 + nu;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return (p.rho + nu) / denom;
}

} // namespace mvi
