#include "mvi/impulse.hpp"

#include <cmath>
#include <exception>
#include <variant>

#include "mvi/errors.hpp"

namespace mvi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

InterventionSpec dividend_intervention(const ModelParams& p) {
    const double c = p.c_fixed;
    const double load = 1.0 + p.lambda_prop;
    InterventionSpec spec;
    spec.shift = [c, load](double x, double zeta) { return x - c - load * zeta; };
    spec.reward = [](double, double zeta) { return zeta; };
    spec.admissible = [c, load](double m, double zeta) {
        if (!(zeta >= 0.0) || !std::isfinite(zeta)) return false;
        if (zeta == 0.0) return true;
        const double slack = 1e-9 * std::max(1.0, std::abs(m));
        return m - c - load * zeta >= -slack;
    };
    return spec;
}

ImpulseControl ControlledTrajectory::control() const {
    ImpulseControl ic;
    ic.interventions.reserve(events.size());
    for (const InterventionEvent& ev : events) ic.interventions.emplace_back(ev.tau, ev.zeta);
    return ic;
}

InterventionEvent apply_intervention(ExtendedState& y, double zeta, const InterventionSpec& spec,
                                     const ModelParams& p) {
    const double m_before = conditional_mean(y.law);
    if (!spec.admissible(m_before, zeta))
        throw Inadmissible("apply_intervention: impulse rejected by admissibility predicate");
    y.law = shift_measure(y.law, [&](double x) { return spec.shift(x, zeta); });
    y.x = spec.shift(y.x, zeta);
    InterventionEvent ev;
    ev.tau = y.law.t;
    ev.zeta = zeta;
    ev.m_before = m_before;
    ev.m_after = conditional_mean(y.law);
    ev.discounted_reward = std::exp(-p.rho * (y.s + y.law.t)) * spec.reward(m_before, zeta);
    return ev;
}

double tau_S_of(std::span<const double> m_path, double dt) {
    for (std::size_t k = 0; k < m_path.size(); ++k)
        if (m_path[k] <= 0.0) return static_cast<double>(k) * dt;
    return kInf;
}

ControlledTrajectory run_controlled_path(const ValidatedModel& model, const Policy& policy,
                                         const SimConfig& sim, const NoiseStream& stream,
                                         double start_time, const PerfHooks& hooks,
                                         bool record_path, Exec exec) {
    validate_sim(sim);
    const ModelParams& p = model.params();
    const auto n_steps = static_cast<std::size_t>(std::llround(sim.horizon / sim.dt));
    if (n_steps == 0) throw BadCount("run_controlled_path: horizon shorter than one step");

    const InterventionSpec spec = dividend_intervention(p);
    ExtendedState y;
    y.s = start_time;
    y.law = init_ensemble(sim.n_particles, InitialLaw::point_mass(sim.x0), stream);
    y.x = y.law.positions.front();

    ControlledTrajectory out;
    if (record_path) {
        out.grid.reserve(n_steps + 1);
        out.m_path.reserve(n_steps + 1);
    }
    bool wait_fired = false;
    double t_end = 0.0;
    double m_end = sim.x0;

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * sim.dt;
        y.law.t = t;  // pin to the grid instead of accumulating dt
        double m = conditional_mean(y.law);
        t_end = t;
        m_end = m;
        if (m <= 0.0) {
            if (record_path) {
                out.grid.push_back(t);
                out.m_path.push_back(m);
            }
            out.tau_S = t;
            break;
        }

        bool ruined = false;
        bool fire = false;
        double zeta = 0.0;
        if (const auto* th = std::get_if<ThresholdPolicy>(&policy)) {
            if (m >= th->u_bar && m > p.c_fixed) {
                fire = true;
                zeta = th->payout(m, p);
            }
        } else if (const auto* w = std::get_if<WaitThenLiquidate>(&policy)) {
            if (!wait_fired && t >= w->t1) {
                wait_fired = true;
                fire = true;
                zeta = std::max(0.0, (m - p.c_fixed) / (1.0 + p.lambda_prop));
            }
        }
        if (fire) {
            const InterventionEvent ev = apply_intervention(y, zeta, spec, p);
            out.events.push_back(ev);
            out.payoff += ev.discounted_reward;
            m = ev.m_after;
            m_end = m;
            // A full payout lands on zero only up to rounding.
            ruined = m <= 1e-12 * std::max(1.0, std::abs(ev.m_before));
        }

        if (record_path) {
            out.grid.push_back(t);
            out.m_path.push_back(m);
        }
        if (ruined) {
            out.tau_S = t;
            break;
        }
        if (k == n_steps) break;

        if (hooks.running_profit) out.payoff += hooks.running_profit(start_time + t, m) * sim.dt;
        const double db1 = common_increment(stream, y.law.steps_taken, sim.dt);
        step_inplace(y.law, sim.dt, db1, p, stream, exec);
        y.x = y.law.positions.front();
    }

    if (hooks.bequest) out.payoff += hooks.bequest(start_time + t_end, m_end);
    return out;
}

PerformanceEstimate estimate_performance(const ValidatedModel& model, const Policy& policy,
                                         const SimConfig& sim, std::size_t n_paths,
                                         double start_time, const PerfHooks& hooks, Exec exec,
                                         std::vector<std::vector<InterventionEvent>>* events_out) {
    if (n_paths < 2) throw BadCount("estimate_performance: need at least 2 paths");
    validate_sim(sim);

    struct PathRecord {
        double payoff = 0.0;
        double tau_S = kInf;
        std::uint32_t n_events = 0;
    };
    std::vector<PathRecord> records(n_paths);
    if (events_out) {
        events_out->clear();
        events_out->resize(n_paths);
    }

    std::exception_ptr first_error = nullptr;
    auto run_one = [&](std::size_t i) {
        const NoiseStream path_stream(sim.seed, static_cast<std::uint64_t>(i));
        ControlledTrajectory traj = run_controlled_path(model, policy, sim, path_stream, start_time,
                                                        hooks, /*record_path=*/false, Exec::serial);
        records[i].payoff = traj.payoff;
        records[i].tau_S = traj.tau_S;
        records[i].n_events = static_cast<std::uint32_t>(traj.events.size());
        if (events_out) (*events_out)[i] = std::move(traj.events);
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_paths); ++i) {
            try {
                run_one(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                {
                    if (!first_error) first_error = std::current_exception();
                }
            }
        }
    } else {
        for (std::size_t i = 0; i < n_paths; ++i) run_one(i);
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> payoffs(n_paths);
    double ruined = 0.0;
    double events_total = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        payoffs[i] = records[i].payoff;
        if (std::isfinite(records[i].tau_S)) ruined += 1.0;
        events_total += records[i].n_events;
    }
    const MeanStderr ms = mean_stderr(payoffs);
    PerformanceEstimate est;
    est.mean = ms.mean;
    est.stderr_ = ms.stderr_;
    est.n_paths = n_paths;
    est.ruin_fraction = ruined / static_cast<double>(n_paths);
    est.mean_event_count = events_total / static_cast<double>(n_paths);
    return est;
}

} // namespace mvi
