#include "mvi/particles.hpp"

#include <cmath>
#include <string>

#include "mvi/errors.hpp"

namespace mvi {

InitialLaw InitialLaw::point_mass(double x0) { return InitialLaw{x0, 0.0}; }

InitialLaw InitialLaw::gaussian(double mean, double sd) { return InitialLaw{mean, sd}; }

double InitialLaw::sample(Substream& s) const noexcept {
    return sd_ == 0.0 ? mean_ : mean_ + sd_ * s.normal();
}

ParticleEnsemble init_ensemble(std::size_t n, const InitialLaw& law, const NoiseStream& stream) {
    if (n == 0) throw BadCount("init_ensemble: need at least one particle");
    ParticleEnsemble e;
    e.positions.resize(n);
    if (law.deterministic()) {
        for (double& x : e.positions) x = law.mean_;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            Substream s = stream.substream(i, NoiseStream::kInitStep);
            e.positions[i] = law.sample(s);
        }
    }
    return e;
}

double common_increment(const NoiseStream& stream, std::uint64_t step, double dt) {
    return std::sqrt(dt) * stream.common_normal(step);
}

double conditional_mean(const ParticleEnsemble& e) noexcept {
    return mean_of(e.positions);
}

namespace {

// Per-particle increment factor; pure function of the particle substream.
inline double idio_increment(Substream& s, double dt, const ModelParams& p, double compensator) {
    double inc = 0.0;
    if (p.sigma2 != 0.0) inc += p.sigma2 * std::sqrt(dt) * s.normal();
    if (p.levy.rate > 0.0) {
        const unsigned n_jumps = s.poisson(p.levy.rate * dt);
        double jump_sum = 0.0;
        for (unsigned j = 0; j < n_jumps; ++j) jump_sum += p.levy.sample_gamma0(s);
        inc += jump_sum - compensator;
    }
    return inc;
}

} // namespace

void step_inplace(ParticleEnsemble& e, double dt, double dB1, const ModelParams& p,
                  const NoiseStream& stream, Exec exec) {
    const double m = conditional_mean(e);
    const double drift = p.alpha0 * dt + p.sigma1 * dB1;
    const double compensator = p.levy.rate * dt * p.levy.mean_gamma0();
    const std::uint64_t step_idx = e.steps_taken;
    const std::size_t n = e.positions.size();
    double* x = e.positions.data();

    bool bad = false;
    // Parallel pays off only for wide ensembles; both branches are identical
    // arithmetic per particle.
    if (exec == Exec::parallel && n >= 512) {
#pragma omp parallel for schedule(static) reduction(|| : bad)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            Substream s = stream.substream(static_cast<std::uint64_t>(i), step_idx);
            x[i] += m * (drift + idio_increment(s, dt, p, compensator));
            bad = bad || !std::isfinite(x[i]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            Substream s = stream.substream(i, step_idx);
            x[i] += m * (drift + idio_increment(s, dt, p, compensator));
            bad = bad || !std::isfinite(x[i]);
        }
    }
    if (bad)
        throw NonFinite("step: non-finite particle position at t=" + std::to_string(e.t + dt));
    e.t += dt;
    ++e.steps_taken;
}

ParticleEnsemble step(const ParticleEnsemble& e, double dt, double dB1, const ModelParams& p,
                      const NoiseStream& stream, Exec exec) {
    ParticleEnsemble out = e;
    step_inplace(out, dt, dB1, p, stream, exec);
    return out;
}

std::vector<double> conditional_mean_oracle(double x0, const ModelParams& p,
                                            std::span<const double> b1_increments, double dt) {
    std::vector<double> m(b1_increments.size() + 1);
    const double a = (p.alpha0 - 0.5 * p.sigma1 * p.sigma1) * dt;
    double log_m = std::log(x0);
    m[0] = x0;
    for (std::size_t k = 0; k < b1_increments.size(); ++k) {
        log_m += a + p.sigma1 * b1_increments[k];
        m[k + 1] = std::exp(log_m);
    }
    return m;
}

Trajectory simulate_trajectory(const ValidatedModel& model, std::size_t n_particles,
                               const InitialLaw& law, double dt, std::size_t n_steps,
                               const NoiseStream& stream, Exec exec) {
    Trajectory traj;
    traj.dt = dt;
    traj.states.reserve(n_steps + 1);
    traj.db1.reserve(n_steps);
    ParticleEnsemble e = init_ensemble(n_particles, law, stream);
    traj.states.push_back(e);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double dB1 = common_increment(stream, e.steps_taken, dt);
        step_inplace(e, dt, dB1, model.params(), stream, exec);
        traj.db1.push_back(dB1);
        traj.states.push_back(e);
    }
    return traj;
}

} // namespace mvi
