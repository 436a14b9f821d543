#include "mvi/fokker_planck.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "mvi/errors.hpp"
#include "mvi/numerics.hpp"

namespace mvi {

TestFunction TestFunction::q() {
    return {"q", [](double x) { return x; }, [](double) { return 1.0; },
            [](double) { return 0.0; }};
}

TestFunction TestFunction::q2() {
    return {"q2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
            [](double) { return 2.0; }};
}

TestFunction TestFunction::exp_cap(double scale) {
    return {"expcap",
            [scale](double x) { return 1.0 - std::exp(-x / scale); },
            [scale](double x) { return std::exp(-x / scale) / scale; },
            [scale](double x) { return -std::exp(-x / scale) / (scale * scale); }};
}

double jump_expectation(const TestFunction& g, double x, double m, const LevyMeasureSpec& levy,
                        bool force_quadrature) {
    if (levy.law == MarkLaw::none) return 0.0;

    auto integrand = [&](double gamma) {
        return g.g(x + gamma * m) - g.g(x) - gamma * m * g.g1(x);
    };

    if (!force_quadrature) {
        if (levy.law == MarkLaw::constant) return integrand(levy.g0);
        // Polynomial presets have exact mark moments: for q the integrand is
        // identically zero, for q2 it is (gamma m)^2.
        if (g.name == "q") return 0.0;
        if (g.name == "q2") return m * m * levy.second_moment_gamma0();
    }

    // E over marks = integral over the quantile variable on [0, 1].
    using gauss = boost::math::quadrature::gauss<double, 64>;
    return gauss::integrate([&](double u) { return integrand(levy.gamma0_quantile(u)); }, 0.0,
                            1.0);
}

double a0_pointwise(const TestFunction& g, double x, double m, const ModelParams& p) {
    const double diff2 = 0.5 * (p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2) * m * m;
    double out = p.alpha0 * m * g.g1(x) + diff2 * g.g2(x);
    if (levy_mass(p.levy) > 0.0) out += p.levy.rate * jump_expectation(g, x, m, p.levy);
    return out;
}

double apply_A0(const TestFunction& g, const ParticleEnsemble& e, const ModelParams& p) {
    const double m = conditional_mean(e);
    return conditional_moment(e, [&](double x) { return a0_pointwise(g, x, m, p); });
}

double apply_A1(const TestFunction& g, const ParticleEnsemble& e, const ModelParams& p) {
    const double m = conditional_mean(e);
    return p.sigma1 * m * conditional_moment(e, [&](double x) { return g.g1(x); });
}

std::vector<double> residual_steps(const Trajectory& traj, const TestFunction& g,
                                   const ModelParams& p) {
    if (traj.states.size() != traj.db1.size() + 1)
        throw GridMismatch("residual_steps: " + std::to_string(traj.states.size()) +
                           " states vs " + std::to_string(traj.db1.size()) + " increments");
    std::vector<double> r(traj.db1.size());
    double pairing_next = conditional_moment(traj.states[0], g.g);
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double pairing = pairing_next;
        pairing_next = conditional_moment(traj.states[k + 1], g.g);
        r[k] = pairing_next - pairing - apply_A0(g, traj.states[k], p) * traj.dt -
               apply_A1(g, traj.states[k], p) * traj.db1[k];
    }
    return r;
}

ResidualStats weak_form_residual(std::span<const Trajectory> trajectories, const TestFunction& g,
                                 const ModelParams& p) {
    ResidualStats stats;
    stats.test_function = g.name;
    stats.n_paths = trajectories.size();
    std::vector<double> all;
    for (const Trajectory& traj : trajectories) {
        stats.n_steps = traj.db1.size();
        stats.dt = traj.dt;
        const std::vector<double> r = residual_steps(traj, g, p);
        all.insert(all.end(), r.begin(), r.end());
    }
    const MeanStderr ms = mean_stderr(all);
    stats.mean = ms.mean;
    stats.stderr_ = ms.stderr_;
    for (double v : all) stats.max_abs = std::max(stats.max_abs, std::abs(v));
    return stats;
}

} // namespace mvi
