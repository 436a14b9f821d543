#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mvi/errors.hpp"
#include "mvi/fokker_planck.hpp"
#include "mvi/numerics.hpp"
#include "mvi/particles.hpp"
#include "test_support.hpp"

using namespace mvi;

TEST_CASE("drift-diffusion action on the coordinate functions") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.1;

    SUBCASE("linear test function sees only the drift") {
        // jump integrand vanishes identically for g(x)=x, any mark law
        p.levy = levy_uniform(3.0, -0.1, 0.3);
        ParticleEnsemble e;
        e.positions = {0.7, 1.9, 2.4};
        const double m = conditional_mean(e);
        CHECK(apply_A0(TestFunction::q(), e, p) == doctest::Approx(p.alpha0 * m).epsilon(1e-14));
    }
    SUBCASE("quadratic at a point mass") {
        const NoiseStream ns{3, 0};
        const ParticleEnsemble e = init_ensemble(5, InitialLaw::point_mass(1.0), ns);
        // 2 alpha0 + sigma1^2 + sigma2^2 = 0.04 + 0.04 + 0.01
        CHECK(apply_A0(TestFunction::q2(), e, p) == doctest::Approx(0.09).epsilon(1e-14));
        // constant relative jumps add rate * g0^2 * m^2
        p.levy = levy_constant(2.0, -0.2);
        CHECK(apply_A0(TestFunction::q2(), e, p) == doctest::Approx(0.17).epsilon(1e-14));
    }
}

TEST_CASE("first-order noise action") {
    ModelParams p = testsupport::base_params();
    ParticleEnsemble e;
    e.positions = {2.0};
    CHECK(apply_A1(TestFunction::q(), e, p) == doctest::Approx(p.sigma1 * 2.0).epsilon(1e-14));
    // g = x^2 at a point mass m: sigma1 * m * 2m
    CHECK(apply_A1(TestFunction::q2(), e, p) == doctest::Approx(2.0 * p.sigma1 * 4.0).epsilon(1e-14));
    p.sigma1 = 0.0;
    CHECK(apply_A1(TestFunction::q2(), e, p) == 0.0);
}

TEST_CASE("ensemble pairing equals the particlewise average") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.2;
    p.levy = levy_uniform(1.5, -0.1, 0.3);
    ParticleEnsemble e;
    e.positions = {0.5, 1.0, 1.5, 2.25, 3.0};
    const double m = conditional_mean(e);
    const TestFunction g = TestFunction::q2();
    std::vector<double> vals;
    for (double x : e.positions) vals.push_back(a0_pointwise(g, x, m, p));
    CHECK(apply_A0(g, e, p) == doctest::Approx(mean_of(vals)).epsilon(1e-12));
}

TEST_CASE("mark expectation: closed forms vs quadrature") {
    const double x = 1.3;
    const double m = 0.7;
    SUBCASE("polynomial closed forms") {
        for (const LevyMeasureSpec& levy :
             {levy_uniform(1.0, -0.1, 0.3), levy_constant(1.0, -0.2)}) {
            const TestFunction g = TestFunction::q2();
            const double closed = jump_expectation(g, x, m, levy, false);
            const double quad = jump_expectation(g, x, m, levy, true);
            CHECK(closed == doctest::Approx(quad).epsilon(1e-10));
            // independent algebra: integrand of x^2 reduces to (gamma0 m)^2
            CHECK(closed == doctest::Approx(m * m * levy.second_moment_gamma0()).epsilon(1e-12));
        }
        CHECK(jump_expectation(TestFunction::q(), x, m, levy_uniform(1.0, -0.1, 0.3)) == 0.0);
        CHECK(jump_expectation(TestFunction::q2(), x, m, levy_none()) == 0.0);
    }
    SUBCASE("bounded exponential against a hand integral") {
        const double s = 2.0;
        const TestFunction g = TestFunction::exp_cap(s);
        const LevyMeasureSpec levy = levy_uniform(1.0, -0.1, 0.3);
        const double got = jump_expectation(g, x, m, levy);
        // E[e^{-gamma m/s}] for gamma ~ U[a,b], then
        // integrand mean = e^{-x/s} (1 - K - mean m / s)
        const double K =
            s * (std::exp(-levy.a * m / s) - std::exp(-levy.b * m / s)) / (m * (levy.b - levy.a));
        const double expect = std::exp(-x / s) * (1.0 - K - levy.mean_gamma0() * m / s);
        CHECK(got == doctest::Approx(expect).epsilon(1e-12));
        CHECK(got == doctest::Approx(jump_expectation(g, x, m, levy, true)).epsilon(1e-13));
    }
    SUBCASE("constant mark needs no quadrature but tolerates it") {
        const TestFunction g = TestFunction::exp_cap(1.0);
        const LevyMeasureSpec levy = levy_constant(1.0, 0.25);
        CHECK(jump_expectation(g, x, m, levy, false) ==
              doctest::Approx(jump_expectation(g, x, m, levy, true)).epsilon(1e-13));
    }
}

TEST_CASE("one-step residual recomputed by hand") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.1;
    Trajectory traj;
    traj.dt = 0.01;
    traj.db1 = {0.03};
    ParticleEnsemble e0;
    e0.positions = {1.0, 2.0};
    ParticleEnsemble e1 = e0;
    e1.positions = {1.1, 2.3};
    e1.t = 0.01;
    traj.states = {e0, e1};

    const std::vector<double> r = residual_steps(traj, TestFunction::q2(), p);
    REQUIRE(r.size() == 1);
    // by hand: m = 1.5; <A0 q2> = alpha0 m (x1+x2... ) per particle 2x, plus
    // full diffusion coefficient; <A1 q2> = sigma1 m <2x>
    const double m = 1.5;
    const double a0 = p.alpha0 * m * (2.0 * 1.0 + 2.0 * 2.0) / 2.0 +
                      0.5 * (p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2) * m * m * 2.0;
    const double a1 = p.sigma1 * m * (2.0 * 1.0 + 2.0 * 2.0) / 2.0;
    const double hand =
        (1.1 * 1.1 + 2.3 * 2.3) / 2.0 - (1.0 + 4.0) / 2.0 - a0 * 0.01 - a1 * 0.03;
    CHECK(r[0] == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("static measure with zero coefficients has exactly zero residuals") {
    ModelParams p; // all coefficients zero on purpose; not a validated model
    ParticleEnsemble e;
    e.positions = {1.0, 2.0, 4.0};
    Trajectory traj;
    traj.dt = 0.5;
    traj.db1 = {0.2, -0.1};
    traj.states = {e, e, e};
    for (const TestFunction& g : {TestFunction::q(), TestFunction::q2()}) {
        for (double r : residual_steps(traj, g, p)) CHECK(r == 0.0);
    }
}

TEST_CASE("single-particle first-moment residuals are pure roundoff") {
    // with one particle the Euler update *is* the empirical-mean dynamics, so
    // the weak-form residual of g(x)=x vanishes identically
    const ModelParams p = testsupport::base_params();
    const ValidatedModel vm = validate_params(p);
    const NoiseStream ns{55, 0};
    const Trajectory traj = simulate_trajectory(vm, 1, InitialLaw::point_mass(1.0), 1e-3, 200, ns);
    for (double r : residual_steps(traj, TestFunction::q(), p)) CHECK(std::abs(r) <= 1e-15);
}

TEST_CASE("grid mismatch is rejected") {
    const ModelParams p = testsupport::base_params();
    const ValidatedModel vm = validate_params(p);
    const NoiseStream ns{56, 0};
    Trajectory traj = simulate_trajectory(vm, 4, InitialLaw::point_mass(1.0), 0.01, 10, ns);
    traj.db1.pop_back();
    CHECK_THROWS_AS(residual_steps(traj, TestFunction::q(), p), GridMismatch);
}

TEST_CASE("mean residual of the first moment shrinks linearly in dt") {
    // for g(x)=x the residual is exactly mean-zero noise from the
    // idiosyncratic terms; at fixed horizon its standard error is
    // proportional to dt, which is the operational form of the O(dt) claim
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.2;
    const ValidatedModel vm = validate_params(p);
    const double horizon = 0.4;
    const int n_rep = 20;
    auto stats_at = [&](double dt) {
        const std::size_t n_steps = static_cast<std::size_t>(horizon / dt + 0.5);
        std::vector<Trajectory> trajs;
        for (int j = 0; j < n_rep; ++j)
            trajs.push_back(simulate_trajectory(vm, 64, InitialLaw::point_mass(1.0), dt, n_steps,
                                                NoiseStream{606, static_cast<std::uint64_t>(j)}));
        return weak_form_residual(trajs, TestFunction::q(), p);
    };
    const ResidualStats s2 = stats_at(1e-2);
    const ResidualStats s3 = stats_at(1e-3);
    const ResidualStats s4 = stats_at(1e-4);
    CHECK(std::abs(s2.mean) <= 4.0 * s2.stderr_);
    CHECK(std::abs(s3.mean) <= 4.0 * s3.stderr_);
    CHECK(std::abs(s4.mean) <= 4.0 * s4.stderr_);
    CHECK(s3.stderr_ / s2.stderr_ > 0.08);
    CHECK(s3.stderr_ / s2.stderr_ < 0.12);
    CHECK(s4.stderr_ / s3.stderr_ > 0.08);
    CHECK(s4.stderr_ / s3.stderr_ < 0.12);
    CHECK(s2.n_paths == n_rep);
    CHECK(s2.n_steps == 40);
    CHECK(s2.test_function == "q");
}

TEST_CASE("second-moment residual is centered, jumps included") {
    ModelParams p = testsupport::base_params();
    p.sigma2 = 0.1;
    p.levy = levy_constant(0.5, -0.2);
    const ValidatedModel vm = validate_params(p);
    std::vector<Trajectory> trajs;
    for (int j = 0; j < 4; ++j)
        trajs.push_back(simulate_trajectory(vm, 2000, InitialLaw::point_mass(1.0), 1e-3, 200,
                                            NoiseStream{707, static_cast<std::uint64_t>(j)}));
    const ResidualStats st = weak_form_residual(trajs, TestFunction::q2(), p);
    CHECK(std::abs(st.mean) <= 3.0 * st.stderr_);
    CHECK(st.max_abs > 0.0);
    CHECK(st.dt == 1e-3);
}
