#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "mvi/errors.hpp"
#include "mvi/numerics.hpp"
#include "mvi/particles.hpp"
#include "test_support.hpp"

using namespace mvi;

TEST_CASE("point-mass init") {
    const NoiseStream ns{1, 0};
    const ParticleEnsemble e = init_ensemble(4, InitialLaw::point_mass(1.0), ns);
    REQUIRE(e.positions.size() == 4);
    for (double x : e.positions) CHECK(x == 1.0);
    CHECK(e.t == 0.0);
    CHECK(e.steps_taken == 0);
    CHECK(conditional_mean(e) == 1.0);

    const ParticleEnsemble big = init_ensemble(10000, InitialLaw::point_mass(1.0), ns);
    CHECK(conditional_mean(big) == 1.0); // no sampling noise, exact

    CHECK_THROWS_AS(init_ensemble(0, InitialLaw::point_mass(1.0), ns), BadCount);
}

TEST_CASE("gaussian init hits its moments and reproduces") {
    const NoiseStream ns{7, 3};
    const ParticleEnsemble e = init_ensemble(10000, InitialLaw::gaussian(1.0, 0.1), ns);
    const double mean = conditional_mean(e);
    CHECK(std::abs(mean - 1.0) <= 4.0 * 0.1 / 100.0);
    double ss = 0.0;
    for (double x : e.positions) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (e.positions.size() - 1));
    CHECK(sd == doctest::Approx(0.1).epsilon(0.05));

    const ParticleEnsemble e2 = init_ensemble(10000, InitialLaw::gaussian(1.0, 0.1), ns);
    CHECK(std::memcmp(e.positions.data(), e2.positions.data(), sizeof(double) * 10000) == 0);
    const ParticleEnsemble other = init_ensemble(10000, InitialLaw::gaussian(1.0, 0.1),
                                                 NoiseStream{7, 4});
    CHECK(other.positions[0] != e.positions[0]);
}

TEST_CASE("single Euler step arithmetic") {
    // X=1, m=1, alpha0=0.02, dt=0.01, sigma1=0.2, dB1=0.05, sigma2=0, no jumps:
    // X' = 1 + (0.0002 + 0.01) = 1.0102
    ModelParams p = testsupport::base_params();
    const NoiseStream ns{11, 0};
    ParticleEnsemble e = init_ensemble(1, InitialLaw::point_mass(1.0), ns);
    step_inplace(e, 0.01, 0.05, p, ns, Exec::serial);
    CHECK(e.positions[0] == doctest::Approx(1.0102).epsilon(1e-14));
    CHECK(e.steps_taken == 1);
    CHECK(e.t == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("mean-field factor is frozen at the step start") {
    // ensemble [1,3]: both particles move by m * increment with m = 2, not by
    // their own positions
    ModelParams p = testsupport::base_params();
    p.alpha0 = 0.05;
    ParticleEnsemble e;
    e.positions = {1.0, 3.0};
    const NoiseStream ns{13, 0};
    step_inplace(e, 0.01, 0.02, p, ns, Exec::serial);
    const double inc = 2.0 * (0.05 * 0.01 + 0.2 * 0.02);
    CHECK(e.positions[0] == doctest::Approx(1.0 + inc).epsilon(1e-14));
    CHECK(e.positions[1] == doctest::Approx(3.0 + inc).epsilon(1e-14));
}

TEST_CASE("zero increment leaves positions untouched") {
    ModelParams p = testsupport::base_params();
    p.alpha0 = 0.0;
    ParticleEnsemble e;
    e.positions = {1.25, 2.5, 0.75};
    const std::vector<double> before = e.positions;
    const NoiseStream ns{17, 0};
    step_inplace(e, 0.01, 0.0, p, ns, Exec::serial);
    CHECK(e.positions == before);
}

TEST_CASE("common-noise degeneracy keeps particles identical") {
    // sigma2 = 0, no jumps, point-mass start: only the shared increment acts.
    // Within one ensemble the particles stay bitwise equal; across ensemble
    // sizes the summed mean of n identical doubles rounds, so the 33- and
    // 1-particle paths agree only to an ulp per step.
    const ModelParams p = testsupport::base_params();
    const ValidatedModel vm = validate_params(p);
    const NoiseStream ns{23, 5};
    ParticleEnsemble many = init_ensemble(33, InitialLaw::point_mass(1.0), ns);
    ParticleEnsemble one = init_ensemble(1, InitialLaw::point_mass(1.0), ns);
    for (int k = 0; k < 50; ++k) {
        const double db1 = common_increment(ns, many.steps_taken, 0.01);
        step_inplace(many, 0.01, db1, p, ns);
        step_inplace(one, 0.01, db1, p, ns);
        for (double x : many.positions) REQUIRE(x == many.positions[0]);
        REQUIRE(std::fabs(many.positions[0] - one.positions[0]) <=
                1e-13 * std::fabs(one.positions[0]));
    }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.1;
    p.levy = levy_uniform(0.5, -0.1, 0.3);
    const NoiseStream ns{29, 2};
    ParticleEnsemble a = init_ensemble(1024, InitialLaw::gaussian(1.0, 0.05), ns);
    ParticleEnsemble b = a;
    for (int k = 0; k < 10; ++k) {
        const double db1 = common_increment(ns, a.steps_taken, 0.005);
        step_inplace(a, 0.005, db1, p, ns, Exec::serial);
        step_inplace(b, 0.005, db1, p, ns, Exec::parallel);
    }
    CHECK(std::memcmp(a.positions.data(), b.positions.data(), sizeof(double) * 1024) == 0);
}

TEST_CASE("empirical mean is a martingale without drift") {
    ModelParams p = testsupport::base_params();
    p.alpha0 = 0.0;
    SUBCASE("common noise only") {}
    SUBCASE("with idiosyncratic noise and compensated jumps") {
        p.sigma2 = 0.15;
        p.levy = levy_uniform(1.0, -0.1, 0.3);
    }
    const ValidatedModel vm = validate_params(p);
    const std::size_t n_particles = p.sigma2 == 0.0 ? 1 : 8;
    const int n_paths = 3000;
    const int n_steps = 50;
    const double dt = 0.01;
    std::vector<double> finals(n_paths);
    for (int j = 0; j < n_paths; ++j) {
        const NoiseStream ns{910, static_cast<std::uint64_t>(j)};
        ParticleEnsemble e = init_ensemble(n_particles, InitialLaw::point_mass(1.0), ns);
        for (int k = 0; k < n_steps; ++k)
            step_inplace(e, dt, common_increment(ns, e.steps_taken, dt), p, ns);
        finals[j] = conditional_mean(e);
    }
    const MeanStderr ms = mean_stderr(finals);
    CHECK(std::abs(ms.mean - 1.0) <= 3.0 * ms.stderr_);
}

TEST_CASE("shift measure is an exact change of variables") {
    ParticleEnsemble e;
    e.positions = {1.0, 2.0};
    const auto gamma = [](double x) { return x + 1.0; };
    const auto q2 = [](double x) { return x * x; };
    const ParticleEnsemble shifted = shift_measure(e, gamma);
    CHECK(shifted.positions[0] == 2.0);
    CHECK(shifted.positions[1] == 3.0);
    // <mu^G, g> = <mu, g o G>: both sides are (4 + 9)/2
    CHECK(conditional_moment(shifted, q2) == 6.5);
    CHECK(conditional_moment(e, [&](double x) { return q2(gamma(x)); }) ==
          conditional_moment(shifted, q2));

    const ParticleEnsemble same = shift_measure(e, [](double x) { return x; });
    CHECK(same.positions == e.positions);

    // dividend shift: x -> x - c - (1+lambda) zeta with c=1, lambda=0, zeta=2
    ParticleEnsemble div;
    div.positions = {5.0, 7.0};
    const ParticleEnsemble after = shift_measure(div, [](double x) { return x - 1.0 - 2.0; });
    CHECK(after.positions[0] == 2.0);
    CHECK(after.positions[1] == 4.0);
    CHECK(conditional_mean(after) == 3.0);
}

TEST_CASE("conditional mean oracle") {
    ModelParams p = testsupport::base_params();
    SUBCASE("flat path with cancelling exponent stays put") {
        p.alpha0 = 0.5 * p.sigma1 * p.sigma1; // exponent vanishes exactly
        const std::vector<double> db1(40, 0.0);
        const std::vector<double> m = conditional_mean_oracle(1.5, p, db1, 0.01);
        REQUIRE(m.size() == 41);
        for (double v : m) CHECK(v == 1.5);
    }
    SUBCASE("vanishing volatility reduces to exponential growth") {
        p.sigma1 = 1e-8;
        const NoiseStream ns{31, 0};
        std::vector<double> db1(100);
        for (int k = 0; k < 100; ++k) db1[k] = common_increment(ns, k, 0.01);
        const std::vector<double> m = conditional_mean_oracle(2.0, p, db1, 0.01);
        for (int k = 0; k <= 100; ++k)
            CHECK(m[k] == doctest::Approx(2.0 * std::exp(0.02 * 0.01 * k)).epsilon(1e-6));
    }
    SUBCASE("stepwise ratios match the exact GBM factor") {
        const NoiseStream ns{37, 0};
        std::vector<double> db1(60);
        for (int k = 0; k < 60; ++k) db1[k] = common_increment(ns, k, 0.02);
        const std::vector<double> m = conditional_mean_oracle(1.0, p, db1, 0.02);
        const double a = (p.alpha0 - 0.5 * p.sigma1 * p.sigma1) * 0.02;
        for (int k = 0; k < 60; ++k)
            CHECK(m[k + 1] / m[k] ==
                  doctest::Approx(std::exp(a + p.sigma1 * db1[k])).epsilon(1e-13));
    }
}

TEST_CASE("ensemble mean converges to the oracle as N grows") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.1;
    const ValidatedModel vm = validate_params(p);
    const double dt = 5e-3;
    const std::size_t n_steps = 100;
    const int n_rep = 16;
    auto pooled_rms = [&](std::size_t n_particles) {
        double ss = 0.0;
        for (int j = 0; j < n_rep; ++j) {
            const NoiseStream ns{4242, static_cast<std::uint64_t>(j)};
            const Trajectory traj = simulate_trajectory(vm, n_particles,
                                                        InitialLaw::point_mass(1.0), dt, n_steps,
                                                        ns);
            const std::vector<double> oracle = conditional_mean_oracle(1.0, p, traj.db1, dt);
            for (std::size_t k = 1; k <= n_steps; ++k) {
                const double d = conditional_mean(traj.states[k]) - oracle[k];
                ss += d * d;
            }
        }
        return std::sqrt(ss / (n_rep * n_steps));
    };
    const double rms_small = pooled_rms(64);
    const double rms_large = pooled_rms(256);
    // idiosyncratic error scales like 1/sqrt(N): quadrupling N should halve it
    const double ratio = rms_small / rms_large;
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.8);
}

TEST_CASE("non-finite updates are refused") {
    const ModelParams p = testsupport::base_params();
    const NoiseStream ns{41, 0};
    ParticleEnsemble e = init_ensemble(2, InitialLaw::point_mass(1.0), ns);
    CHECK_THROWS_AS(step_inplace(e, 0.01, std::numeric_limits<double>::infinity(), p, ns),
                    NonFinite);
    ParticleEnsemble e2 = init_ensemble(2, InitialLaw::point_mass(1.0), ns);
    CHECK_THROWS_AS(step_inplace(e2, 0.01, std::numeric_limits<double>::quiet_NaN(), p, ns),
                    NonFinite);
}

TEST_CASE("trajectory bookkeeping") {
    const ValidatedModel vm = validate_params(testsupport::base_params());
    const NoiseStream ns{43, 1};
    const Trajectory traj = simulate_trajectory(vm, 8, InitialLaw::point_mass(1.0), 0.01, 25, ns);
    REQUIRE(traj.states.size() == 26);
    REQUIRE(traj.db1.size() == 25);
    CHECK(traj.dt == 0.01);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        CHECK(traj.states[k].steps_taken == k);
        CHECK(traj.states[k].t == doctest::Approx(0.01 * k).epsilon(1e-12));
    }
    // recorded increments are the reserved common substream draws
    for (std::size_t k = 0; k < traj.db1.size(); ++k)
        CHECK(traj.db1[k] == common_increment(ns, k, 0.01));
}
