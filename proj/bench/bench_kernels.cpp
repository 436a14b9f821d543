// Throughput of the serial and OpenMP kernels on the same inputs, plus a
// bitwise agreement check (the parallel kernels are reductions with a fixed
// shape, so they must reproduce the serial results exactly).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <utility>

#include "mvi/dividend.hpp"
#include "mvi/impulse.hpp"
#include "mvi/particles.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point from) {
    return std::chrono::duration<double>(Clock::now() - from).count();
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n_particles = std::size_t{1} << 16;
    std::size_t n_steps = 128;
    std::size_t n_paths = 2000;
    if (argc > 1) n_particles = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) n_steps = std::strtoull(argv[2], nullptr, 10);
    if (argc > 3) n_paths = std::strtoull(argv[3], nullptr, 10);

    mvi::ModelParams p;
    p.alpha0 = 0.02;
    p.sigma1 = 0.2;
    p.sigma2 = 0.1;
    p.rho = 0.05;
    p.lambda_prop = 0.0;
    p.c_fixed = 1.0;
    p.levy = mvi::levy_uniform(0.5, -0.1, 0.3);
    const mvi::ValidatedModel model = mvi::validate_params(p);
    const mvi::NoiseStream stream(2024, 0);
    const double dt = 1e-3;

    auto run_steps = [&](mvi::Exec exec) {
        mvi::ParticleEnsemble e =
            mvi::init_ensemble(n_particles, mvi::InitialLaw::gaussian(1.0, 0.05), stream);
        const auto t0 = Clock::now();
        for (std::size_t k = 0; k < n_steps; ++k) {
            const double db1 = mvi::common_increment(stream, e.steps_taken, dt);
            mvi::step_inplace(e, dt, db1, p, stream, exec);
        }
        return std::pair{std::move(e), seconds(t0)};
    };

    std::printf("step kernel: n_particles=%zu n_steps=%zu\n", n_particles, n_steps);
    auto [e_serial, t_serial] = run_steps(mvi::Exec::serial);
    auto [e_parallel, t_parallel] = run_steps(mvi::Exec::parallel);
    const double work = static_cast<double>(n_particles) * static_cast<double>(n_steps) / 1e6;
    std::printf("  serial:   %8.3f s  %8.2f M particle-steps/s\n", t_serial, work / t_serial);
    std::printf("  parallel: %8.3f s  %8.2f M particle-steps/s  speedup %.2fx\n", t_parallel,
                work / t_parallel, t_serial / t_parallel);
    const bool steps_same =
        std::memcmp(e_serial.positions.data(), e_parallel.positions.data(),
                    n_particles * sizeof(double)) == 0;
    std::printf("  bitwise identical: %s\n", steps_same ? "yes" : "NO");

    mvi::SimConfig sim;
    sim.n_particles = 1;
    sim.n_paths = n_paths;
    sim.dt = 1e-3;
    sim.horizon = 20.0;
    sim.x0 = 1.0;
    sim.seed = 7;
    const mvi::Policy policy = mvi::optimal_policy(mvi::solve(p));

    std::printf("path loop: n_paths=%zu horizon=%g dt=%g\n", n_paths, sim.horizon, sim.dt);
    auto t0 = Clock::now();
    const mvi::PerformanceEstimate serial =
        mvi::estimate_performance(model, policy, sim, n_paths, 0.0, {}, mvi::Exec::serial);
    const double tps = seconds(t0);
    t0 = Clock::now();
    const mvi::PerformanceEstimate parallel =
        mvi::estimate_performance(model, policy, sim, n_paths, 0.0, {}, mvi::Exec::parallel);
    const double tpp = seconds(t0);
    std::printf("  serial:   %8.3f s  %8.1f paths/s\n", tps, static_cast<double>(n_paths) / tps);
    std::printf("  parallel: %8.3f s  %8.1f paths/s  speedup %.2fx\n", tpp,
                static_cast<double>(n_paths) / tpp, tps / tpp);
    const bool est_same = std::memcmp(&serial.mean, &parallel.mean, sizeof(double)) == 0 &&
                          std::memcmp(&serial.stderr_, &parallel.stderr_, sizeof(double)) == 0;
    std::printf("  estimates bitwise identical: %s\n", est_same ? "yes" : "NO");

    return steps_same && est_same ? 0 : 1;
}
