#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "mvi/config.hpp"
#include "mvi/dividend.hpp"
#include "mvi/errors.hpp"
#include "mvi/fokker_planck.hpp"
#include "mvi/impulse.hpp"
#include "mvi/io_util.hpp"
#include "mvi/qvi.hpp"

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxDumpPaths = 8;  // paths.csv keeps only the first few paths

struct Sink {
    fs::path dir;
    std::vector<std::string> names;

    void emit(const std::string& name, const std::string& content) {
        mvi::write_text_file(dir / name, content);
        names.push_back(name);
    }
};

double spec_number(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
    const char* begin = tail.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (tail.empty() || end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw mvi::ConfigError("bad policy spec '" + spec + "'");
    return v;
}

// Resolves a policy spec; "optimal" also yields the closed-form solution for
// the value comparison in the summary.
mvi::Policy parse_policy(const std::string& spec, const mvi::RunConfig& cfg,
                         std::optional<mvi::DividendSolution>& sol) {
    if (spec == "optimal") {
        sol = mvi::solve(cfg.model);
        return mvi::optimal_policy(*sol);
    }
    if (spec == "never") return mvi::ThresholdPolicy{};
    if (spec.rfind("threshold:", 0) == 0) {
        const double u = spec_number(spec);
        if (!(u > 0.0)) throw mvi::ConfigError("bad policy spec '" + spec + "': level must be > 0");
        return mvi::ThresholdPolicy{u};
    }
    if (spec.rfind("wait:", 0) == 0) {
        const double t1 = spec_number(spec);
        if (!(t1 >= 0.0)) throw mvi::ConfigError("bad policy spec '" + spec + "': wait must be >= 0");
        return mvi::WaitThenLiquidate{t1};
    }
    throw mvi::ConfigError("unknown policy spec '" + spec + "'");
}

int cmd_solve(const mvi::RunConfig& cfg, Sink& out) {
    const mvi::DividendSolution sol = mvi::solve(cfg.model);
    const double margin = mvi::condition_vi_bound(cfg.model) - sol.gamma1;
    const std::string report = mvi::json_solution(sol, margin);
    out.emit("solution.json", report);
    out.emit("phi.csv", mvi::csv_phi_table(sol, 200, 2.0 * sol.u_bar));
    std::cout << report;
    return 0;
}

int cmd_simulate(const mvi::RunConfig& cfg, const std::string& policy_spec, Sink& out) {
    std::optional<mvi::DividendSolution> sol;
    const mvi::Policy policy = parse_policy(policy_spec, cfg, sol);
    const mvi::ValidatedModel model = mvi::validate_params(cfg.model);

    std::vector<std::vector<mvi::InterventionEvent>> events;
    const mvi::PerformanceEstimate est = mvi::estimate_performance(
        model, policy, cfg.sim, cfg.sim.n_paths, 0.0, {}, mvi::Exec::parallel, &events);

    std::optional<double> phi;
    if (sol) phi = mvi::value_phi(0.0, cfg.sim.x0, *sol);
    const std::string summary = mvi::json_summary(est, cfg.sim, policy_spec, phi);
    out.emit("summary.json", summary);
    out.emit("events.csv", mvi::csv_events(events));
    std::cout << summary;
    return 0;
}

int cmd_verify_qvi(const mvi::RunConfig& cfg, double perturb_c1, Sink& out) {
    const mvi::DividendSolution sol = mvi::solve(cfg.model);
    const mvi::ReducedFunction psi = mvi::reduced_value(sol, perturb_c1);
    const mvi::QviReport rep = mvi::verify(psi, sol, cfg.model);
    const std::string report = mvi::json_qvi_report(rep);
    out.emit("qvi_report.json", report);
    out.emit("qvi_grid.csv", mvi::csv_qvi_grid(rep));
    std::cout << report;
    if (!rep.passed) {
        std::cerr << "error: QVI verification failed\n";
        return 3;
    }
    return 0;
}

int cmd_fp_check(const mvi::RunConfig& cfg, const std::string& testfn, Sink& out) {
    const mvi::ValidatedModel model = mvi::validate_params(cfg.model);
    const mvi::TestFunction g =
        testfn == "q2" ? mvi::TestFunction::q2() : mvi::TestFunction::q();
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.sim.horizon / cfg.sim.dt));
    if (n_steps == 0) throw mvi::BadCount("fp-check: horizon shorter than one step");

    const mvi::InitialLaw law = mvi::InitialLaw::point_mass(cfg.sim.x0);
    std::vector<mvi::Trajectory> trajs;
    trajs.reserve(cfg.sim.n_paths);
    for (std::size_t i = 0; i < cfg.sim.n_paths; ++i) {
        const mvi::NoiseStream stream(cfg.sim.seed, i);
        trajs.push_back(mvi::simulate_trajectory(model, cfg.sim.n_particles, law, cfg.sim.dt,
                                                 n_steps, stream));
    }
    const mvi::ResidualStats stats = mvi::weak_form_residual(trajs, g, cfg.model);
    const std::string report = mvi::json_residual(stats);
    out.emit("residual.json", report);
    const std::size_t dump = std::min(trajs.size(), kMaxDumpPaths);
    out.emit("paths.csv", mvi::csv_mean_paths({trajs.data(), dump}, cfg.model, cfg.sim.x0));
    std::cout << report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impulse control of a conditional mean-field jump diffusion"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed_val = 0;
    int threads = 0;
    app.add_option("--config", config_path, "key = value configuration file")->required();
    auto* seed_opt = app.add_option("--seed", seed_val, "override the config seed");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", threads, "worker thread cap (0 = library default)");

    std::string policy_spec = "optimal";
    double perturb_c1 = 1.0;
    std::string testfn = "q";
    auto* sub_solve = app.add_subcommand("solve", "closed-form thresholds and value");
    auto* sub_sim = app.add_subcommand("simulate", "Monte-Carlo payoff of a policy");
    sub_sim->add_option("--policy", policy_spec, "optimal|never|threshold:<u>|wait:<t1>")
        ->capture_default_str();
    auto* sub_qvi = app.add_subcommand("verify-qvi", "grid check of the variational conditions");
    sub_qvi->add_option("--perturb-c1", perturb_c1, "scale the value coefficient before checking")
        ->capture_default_str();
    auto* sub_fp = app.add_subcommand("fp-check", "weak-form residual of the empirical law");
    sub_fp->add_option("--test-function", testfn, "q|q2")
        ->check(CLI::IsMember({"q", "q2"}))
        ->capture_default_str();
    for (CLI::App* sub : {sub_solve, sub_sim, sub_qvi, sub_fp}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const auto t_start = std::chrono::steady_clock::now();
    int rc = 0;
    try {
#ifdef _OPENMP
        if (threads > 0) omp_set_num_threads(threads);
#endif
        mvi::RunConfig cfg = mvi::load_config(config_path);
        if (seed_opt->count() > 0) cfg.sim.seed = seed_val;

        // The closed form exists only below the discount rate; above it the
        // value is unbounded, which gets its own exit code.
        const bool needs_finite = sub_solve->parsed() || sub_qvi->parsed() ||
                                  (sub_sim->parsed() && policy_spec == "optimal");
        if (needs_finite && mvi::check_case_split(cfg.model) == mvi::CaseSplit::Infinite) {
            std::cerr << "error: value is +infinity (alpha0 > rho)\n";
            return 2;
        }

        Sink out;
        out.dir = out_dir;
        fs::create_directories(out.dir);

        mvi::RunManifest man;
        man.config = cfg;
        if (sub_solve->parsed()) {
            man.command = "solve";
            rc = cmd_solve(cfg, out);
        } else if (sub_sim->parsed()) {
            man.command = "simulate --policy " + policy_spec;
            rc = cmd_simulate(cfg, policy_spec, out);
        } else if (sub_qvi->parsed()) {
            man.command = "verify-qvi --perturb-c1 " + mvi::fmt12(perturb_c1);
            rc = cmd_verify_qvi(cfg, perturb_c1, out);
        } else {
            man.command = "fp-check --test-function " + testfn;
            rc = cmd_fp_check(cfg, testfn, out);
        }

        man.outputs = out.names;
        man.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        mvi::write_text_file(out.dir / "run.json", mvi::json_manifest(man));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
