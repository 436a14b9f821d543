#pragma once

#include <functional>
#include <span>
#include <string>

#include "mvi/model.hpp"
#include "mvi/particles.hpp"

namespace mvi {

// Smooth test function with analytic derivatives; finite differences are
// deliberately banned here so all discretization error stays on the time axis.
struct TestFunction {
    std::string name;
    std::function<double(double)> g;
    std::function<double(double)> g1;
    std::function<double(double)> g2;

    static TestFunction q();                     // g(x) = x
    static TestFunction q2();                    // g(x) = x^2
    static TestFunction exp_cap(double scale);   // g(x) = 1 - exp(-x/scale), bounded above
};

// Drift-diffusion-jump action on g at one point, with mean-field factor m:
//   A0 g(x) = alpha0 m g'(x) + (sigma1^2 + sigma2^2)/2 m^2 g''(x)
//           + rate E_zeta[g(x + gamma0 m) - g(x) - gamma0 m g'(x)].
// The mark expectation uses the closed form for preset polynomial cases and
// 64-point Gauss-Legendre on the mark quantile otherwise.
double a0_pointwise(const TestFunction& g, double x, double m, const ModelParams& p);

// Empirical pairing <mu_hat, A0 g> over the ensemble.
double apply_A0(const TestFunction& g, const ParticleEnsemble& e, const ModelParams& p);

// <mu_hat, A1 g> with A1 g(x) = sigma1 m g'(x).
double apply_A1(const TestFunction& g, const ParticleEnsemble& e, const ModelParams& p);

// Mark expectation E_zeta[g(x + gamma0(zeta) m) - g(x) - gamma0(zeta) m g'(x)].
// force_quadrature bypasses the closed forms; both routes must agree to 1e-10
// for preset marks (tested).
double jump_expectation(const TestFunction& g, double x, double m, const LevyMeasureSpec& levy,
                        bool force_quadrature = false);

struct ResidualStats {
    std::string test_function;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double dt = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    double max_abs = 0.0;
};

// Per-step weak-form residuals of one trajectory:
//   r_k = <mu_{k+1}, g> - <mu_k, g> - <mu_k, A0 g> dt - <mu_k, A1 g> dB1_k.
// Throws GridMismatch if increment and state counts disagree.
std::vector<double> residual_steps(const Trajectory& traj, const TestFunction& g,
                                   const ModelParams& p);

// Aggregated residual statistics over several trajectories (same grid).
ResidualStats weak_form_residual(std::span<const Trajectory> trajectories, const TestFunction& g,
                                 const ModelParams& p);

} // namespace mvi
