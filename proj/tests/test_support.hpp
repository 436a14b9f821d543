#pragma once

// Shared helpers for the test binaries: the reference parameter set and an
// exact log-space walk used as an independent first-passage oracle.

#include <cmath>
#include <cstddef>

#include "mvi/model.hpp"
#include "mvi/rng.hpp"

namespace testsupport {

// Reference parameters: drift 0.02, common volatility 0.2, discount 0.05,
// unit fixed cost, no proportional cost, no idiosyncratic noise, no jumps.
inline mvi::ModelParams base_params() {
    mvi::ModelParams p;
    p.alpha0 = 0.02;
    p.sigma1 = 0.2;
    p.sigma2 = 0.0;
    p.rho = 0.05;
    p.lambda_prop = 0.0;
    p.c_fixed = 1.0;
    p.levy = mvi::levy_none();
    return p;
}

// Exact GBM walk in log space monitored on the dt-grid: returns e^{-rho tau}
// for the first grid time with m >= barrier, or 0 when the barrier is not
// reached within n_steps. Uses only the common-noise substreams, so it is an
// oracle independent of the particle stepping code.
inline double discounted_hit(const mvi::ModelParams& p, double x0, double barrier, double dt,
                             std::size_t n_steps, const mvi::NoiseStream& stream) {
    if (x0 >= barrier) return 1.0;
    const double drift = (p.alpha0 - 0.5 * p.sigma1 * p.sigma1) * dt;
    const double vol = p.sigma1 * std::sqrt(dt);
    const double target = std::log(barrier / x0);
    double lm = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        lm += drift + vol * stream.common_normal(k);
        if (lm >= target) return std::exp(-p.rho * static_cast<double>(k + 1) * dt);
    }
    return 0.0;
}

struct HitPair {
    double coarse = 0.0;
    double fine = 0.0;
};

// Same Brownian path at two monitoring resolutions: the fine walk takes
// 2 n_coarse steps of dt/2, the coarse value checks the barrier only at even
// fine indices. Pathwise fine >= coarse, so halving dt provably shrinks the
// discrete-monitoring bias.
inline HitPair discounted_hit_pair(const mvi::ModelParams& p, double x0, double barrier,
                                   double dt_coarse, std::size_t n_coarse,
                                   const mvi::NoiseStream& stream) {
    if (x0 >= barrier) return {1.0, 1.0};
    const double dtf = 0.5 * dt_coarse;
    const double drift = (p.alpha0 - 0.5 * p.sigma1 * p.sigma1) * dtf;
    const double vol = p.sigma1 * std::sqrt(dtf);
    const double target = std::log(barrier / x0);
    HitPair out;
    double lm = 0.0;
    bool hit_fine = false;
    bool hit_coarse = false;
    for (std::size_t j = 0; j < 2 * n_coarse; ++j) {
        lm += drift + vol * stream.common_normal(j);
        if (lm >= target) {
            const double t = static_cast<double>(j + 1) * dtf;
            if (!hit_fine) {
                out.fine = std::exp(-p.rho * t);
                hit_fine = true;
            }
            if (!hit_coarse && j % 2 == 1) {
                out.coarse = std::exp(-p.rho * t);
                hit_coarse = true;
            }
            if (hit_fine && hit_coarse) break;
        }
    }
    return out;
}

} // namespace testsupport
