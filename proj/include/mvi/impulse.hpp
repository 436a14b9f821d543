#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "mvi/config.hpp"
#include "mvi/model.hpp"
#include "mvi/particles.hpp"
#include "mvi/policy.hpp"

namespace mvi {

// Controller's information state: discounting time origin s, a representative
// position, and the empirical conditional law (whose .t is path-local time).
struct ExtendedState {
    double s = 0.0;
    double x = 0.0;
    ParticleEnsemble law;
};

// Realized impulse sequence: (tau_k, zeta_k), tau nondecreasing, zeta >= 0.
struct ImpulseControl {
    std::vector<std::pair<double, double>> interventions;
};

// One impulse template: where positions land, what the controller collects,
// and which (mean, zeta) pairs are feasible.
struct InterventionSpec {
    std::function<double(double x, double zeta)> shift;
    std::function<double(double m, double zeta)> reward;
    std::function<bool(double m, double zeta)> admissible;
};

// Dividend impulse: every position drops by c + (1+lambda) zeta and the
// controller collects zeta. zeta = 0 is always admissible (the fixed cost is
// still charged); positive payouts cannot exceed the mean surplus, up to a
// relative slack covering the roundoff of a full payout.
InterventionSpec dividend_intervention(const ModelParams& p);

struct InterventionEvent {
    double tau = 0.0;  // path-local time
    double zeta = 0.0;
    double m_before = 0.0;
    double m_after = 0.0;
    double discounted_reward = 0.0;  // e^{-rho (s + tau)} * reward
};

// Applies one impulse in place: both x and the law move through spec.shift
// (the law via its elementwise image). Throws Inadmissible when the
// predicate rejects (conditional mean, zeta).
InterventionEvent apply_intervention(ExtendedState& y, double zeta, const InterventionSpec& spec,
                                     const ModelParams& p);

struct ControlledTrajectory {
    std::vector<double> grid;    // recorded times; may stop early at ruin
    std::vector<double> m_path;  // post-intervention conditional mean per time
    std::vector<InterventionEvent> events;
    double tau_S = std::numeric_limits<double>::infinity();
    double payoff = 0.0;  // discounted rewards + running profit + bequest

    ImpulseControl control() const;
};

// Optional performance plug-ins, both on (absolute time, conditional mean).
// running_profit is integrated with left-endpoint weights up to ruin/horizon;
// bequest is added once at termination. Empty means zero.
struct PerfHooks {
    std::function<double(double t, double m)> running_profit;
    std::function<double(double t, double m)> bequest;
};

// First grid time with a nonpositive entry; +inf sentinel when none.
double tau_S_of(std::span<const double> m_path, double dt);

// Simulates one controlled path on the uniform grid k dt, k = 0..horizon/dt.
// At each grid time, in order: ruin check (m <= 0), policy trigger and
// intervention (threshold: m >= u_bar, skipped while m <= c; wait: once at
// the first time >= t1), running-profit accrual, then one Euler step. A full
// payout lands on mean zero only up to rounding, so ruin after an
// intervention is declared at a tiny relative tolerance instead of 0.
ControlledTrajectory run_controlled_path(const ValidatedModel& model, const Policy& policy,
                                         const SimConfig& sim, const NoiseStream& stream,
                                         double start_time = 0.0, const PerfHooks& hooks = {},
                                         bool record_path = true, Exec exec = Exec::parallel);

struct PerformanceEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    double ruin_fraction = 0.0;
    double mean_event_count = 0.0;
};

// Monte-Carlo mean and standard error of the realized payoff over n_paths
// independent paths (path index keys all noise substreams). Paths run in
// parallel; aggregation is a fixed-shape pairwise reduction, so results are
// identical for any thread count. events_out, when given, receives each
// path's events at its path index. Throws BadCount when n_paths < 2.
PerformanceEstimate estimate_performance(const ValidatedModel& model, const Policy& policy,
                                         const SimConfig& sim, std::size_t n_paths,
                                         double start_time = 0.0, const PerfHooks& hooks = {},
                                         Exec exec = Exec::parallel,
                                         std::vector<std::vector<InterventionEvent>>* events_out = nullptr);

} // namespace mvi
