#pragma once

#include <cstdint>
#include <vector>

#include "mvi/model.hpp"
#include "mvi/numerics.hpp"
#include "mvi/rng.hpp"

namespace mvi {

// Equal-weight interacting particle system approximating the conditional law
// given the common noise. All particles share dB1; idiosyncratic dB2 and
// compensated compound-Poisson jumps are independent per particle. The
// mean-field coupling enters only through the empirical first moment.
struct ParticleEnsemble {
    std::vector<double> positions;
    double t = 0.0;
    // Index of the next step's noise substreams; advanced by step().
    std::uint64_t steps_taken = 0;
};

// Kernel selection: identical results by construction, so tests can assert
// bitwise equality between the two.
enum class Exec { serial, parallel };

struct InitialLaw {
    static InitialLaw point_mass(double x0);
    static InitialLaw gaussian(double mean, double sd);

    double sample(Substream& s) const noexcept;
    bool deterministic() const noexcept { return sd_ == 0.0; }

    double mean_ = 0.0;
    double sd_ = 0.0;
};

// Throws BadCount if n == 0. Sampling uses the reserved init substreams, so
// ensembles coincide with any later run sharing (seed, path) prefixes.
ParticleEnsemble init_ensemble(std::size_t n, const InitialLaw& law, const NoiseStream& stream);

// sqrt(dt) * standard normal from the reserved common substream of `step`.
double common_increment(const NoiseStream& stream, std::uint64_t step, double dt);

// One Euler step: with m frozen at the step's start,
//   X_i += m * (alpha0 dt + sigma1 dB1 + sigma2 dB2_i + J_i),
// J_i the compensated compound-Poisson increment. Throws NonFinite if any
// updated position leaves the finite range.
void step_inplace(ParticleEnsemble& e, double dt, double dB1, const ModelParams& p,
                  const NoiseStream& stream, Exec exec = Exec::parallel);

ParticleEnsemble step(const ParticleEnsemble& e, double dt, double dB1, const ModelParams& p,
                      const NoiseStream& stream, Exec exec = Exec::parallel);

// (1/N) sum g(X_i) with pairwise summation (deterministic order).
template <class G>
double conditional_moment(const ParticleEnsemble& e, G&& g) {
    std::vector<double> vals(e.positions.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = g(e.positions[i]);
    return mean_of(vals);
}

double conditional_mean(const ParticleEnsemble& e) noexcept;

// Elementwise image measure: positions mapped through `shift`. Covers both the
// intervention-induced law jump and the gamma-shift.
template <class F>
ParticleEnsemble shift_measure(const ParticleEnsemble& e, F&& shift) {
    ParticleEnsemble out = e;
    for (double& x : out.positions) x = shift(x);
    return out;
}

// Exact pathwise solution m(t) = x0 exp((alpha0 - sigma1^2/2) t + sigma1 B1(t))
// of dm = m (alpha0 dt + sigma1 dB1), evaluated on the grid spanned by
// b1_increments. Returns n_steps + 1 values starting at m(0) = x0.
std::vector<double> conditional_mean_oracle(double x0, const ModelParams& p,
                                            std::span<const double> b1_increments, double dt);

// Uncontrolled trajectory with recorded common increments, for weak-form
// residual checks and convergence studies.
struct Trajectory {
    std::vector<ParticleEnsemble> states;  // n_steps + 1 entries
    std::vector<double> db1;               // n_steps entries
    double dt = 0.0;
};

Trajectory simulate_trajectory(const ValidatedModel& model, std::size_t n_particles,
                               const InitialLaw& law, double dt, std::size_t n_steps,
                               const NoiseStream& stream, Exec exec = Exec::parallel);

} // namespace mvi
