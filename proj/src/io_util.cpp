#include "mvi/io_util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvi/errors.hpp"

namespace mvi {

namespace {

// JSON has no NaN/Inf literals; non-finite values become null.
std::string jnum(double v) { return std::isfinite(v) ? fmt12(v) : "null"; }

std::string jbool(bool b) { return b ? "true" : "false"; }

std::string jstr(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += ch; break;
        }
    }
    out += '"';
    return out;
}

} // namespace

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string json_solution(const DividendSolution& sol, double condition_vi_margin) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"gamma1\": " << jnum(sol.gamma1) << ",\n";
    o << "  \"gamma2\": " << jnum(sol.gamma2) << ",\n";
    o << "  \"u_bar\": " << jnum(sol.u_bar) << ",\n";
    o << "  \"C1\": " << jnum(sol.C1) << ",\n";
    o << "  \"condition_vi_margin\": " << jnum(condition_vi_margin) << "\n";
    o << "}\n";
    return o.str();
}

std::string json_summary(const PerformanceEstimate& est, const SimConfig& sim,
                         const std::string& policy_spec, std::optional<double> phi_value) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"mean\": " << jnum(est.mean) << ",\n";
    o << "  \"stderr\": " << jnum(est.stderr_) << ",\n";
    o << "  \"n_paths\": " << est.n_paths << ",\n";
    o << "  \"dt\": " << jnum(sim.dt) << ",\n";
    o << "  \"policy\": " << jstr(policy_spec);
    if (phi_value) {
        o << ",\n";
        o << "  \"phi_value\": " << jnum(*phi_value) << ",\n";
        o << "  \"abs_error\": " << jnum(std::abs(est.mean - *phi_value)) << "\n";
    } else {
        o << "\n";
    }
    o << "}\n";
    return o.str();
}

std::string json_residual(const ResidualStats& stats) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"test_function\": " << jstr(stats.test_function) << ",\n";
    o << "  \"n_paths\": " << stats.n_paths << ",\n";
    o << "  \"n_steps\": " << stats.n_steps << ",\n";
    o << "  \"dt\": " << jnum(stats.dt) << ",\n";
    o << "  \"mean\": " << jnum(stats.mean) << ",\n";
    o << "  \"stderr\": " << jnum(stats.stderr_) << ",\n";
    o << "  \"max_abs\": " << jnum(stats.max_abs) << "\n";
    o << "}\n";
    return o.str();
}

std::string json_qvi_report(const QviReport& rep) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"passed\": " << jbool(rep.passed) << ",\n";
    o << "  \"ii_ok\": " << jbool(rep.ii_ok) << ",\n";
    o << "  \"x_ok\": " << jbool(rep.x_ok) << ",\n";
    o << "  \"vi_ok\": " << jbool(rep.vi_ok) << ",\n";
    o << "  \"fit_ok\": " << jbool(rep.fit_ok) << ",\n";
    o << "  \"ii_min\": " << jnum(rep.ii_min) << ",\n";
    o << "  \"ii_eq_max_abs\": " << jnum(rep.ii_eq_max_abs) << ",\n";
    o << "  \"x_max_abs\": " << jnum(rep.x_max_abs) << ",\n";
    o << "  \"vi_max\": " << jnum(rep.vi_max) << ",\n";
    o << "  \"fit_value_gap\": " << jnum(rep.fit_value_gap) << ",\n";
    o << "  \"fit_deriv_gap\": " << jnum(rep.fit_deriv_gap) << ",\n";
    o << "  \"n_grid\": " << rep.grid.size() << ",\n";
    o << "  \"u_max\": " << jnum(rep.grid.empty() ? 0.0 : rep.grid.back()) << "\n";
    o << "}\n";
    return o.str();
}

std::string json_manifest(const RunManifest& man) {
    const RunConfig& cfg = man.config;
    std::ostringstream o;
    o << "{\n";
    o << "  \"version\": " << jstr(kVersion) << ",\n";
    o << "  \"command\": " << jstr(man.command) << ",\n";
    o << "  \"config\": {\n";
    o << "    \"alpha0\": " << jnum(cfg.model.alpha0) << ",\n";
    o << "    \"sigma1\": " << jnum(cfg.model.sigma1) << ",\n";
    o << "    \"sigma2\": " << jnum(cfg.model.sigma2) << ",\n";
    o << "    \"rho\": " << jnum(cfg.model.rho) << ",\n";
    o << "    \"lambda\": " << jnum(cfg.model.lambda_prop) << ",\n";
    o << "    \"c\": " << jnum(cfg.model.c_fixed) << ",\n";
    o << "    \"jump_rate\": " << jnum(cfg.model.levy.rate) << ",\n";
    o << "    \"jump_gamma0\": " << jstr(gamma0_preset_string(cfg.model.levy)) << ",\n";
    o << "    \"n_particles\": " << cfg.sim.n_particles << ",\n";
    o << "    \"n_paths\": " << cfg.sim.n_paths << ",\n";
    o << "    \"dt\": " << jnum(cfg.sim.dt) << ",\n";
    o << "    \"horizon\": " << jnum(cfg.sim.horizon) << ",\n";
    o << "    \"x0\": " << jnum(cfg.sim.x0) << ",\n";
    o << "    \"seed\": " << cfg.sim.seed << "\n";
    o << "  },\n";
    o << "  \"outputs\": [";
    for (std::size_t i = 0; i < man.outputs.size(); ++i)
        o << (i ? ", " : "") << jstr(man.outputs[i]);
    o << "],\n";
    o << "  \"wall_time_s\": " << jnum(man.wall_time_s) << "\n";
    o << "}\n";
    return o.str();
}

std::string csv_phi_table(const DividendSolution& sol, std::size_t n, double u_max) {
    if (n < 2) throw BadCount("csv_phi_table: need at least 2 rows");
    std::ostringstream o;
    o << "u,phi,branch\n";
    for (std::size_t i = 1; i <= n; ++i) {
        const double u = u_max * static_cast<double>(i) / static_cast<double>(n);
        o << fmt12(u) << ',' << fmt12(value_phi(0.0, u, sol)) << ','
          << (u < sol.u_bar ? "power" : "linear") << '\n';
    }
    return o.str();
}

std::string csv_events(const std::vector<std::vector<InterventionEvent>>& per_path) {
    std::ostringstream o;
    o << "path_index,tau_k,zeta_k,m_before,m_after,discounted_reward\n";
    for (std::size_t i = 0; i < per_path.size(); ++i) {
        for (const InterventionEvent& ev : per_path[i]) {
            o << i << ',' << fmt12(ev.tau) << ',' << fmt12(ev.zeta) << ',' << fmt12(ev.m_before)
              << ',' << fmt12(ev.m_after) << ',' << fmt12(ev.discounted_reward) << '\n';
        }
    }
    return o.str();
}

std::string csv_qvi_grid(const QviReport& rep) {
    std::ostringstream o;
    o << "u,cond_ii,cond_x,cond_vi\n";
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        o << fmt12(rep.grid[i]) << ',' << fmt12(rep.cond_ii[i]) << ',' << fmt12(rep.cond_x[i])
          << ',' << fmt12(rep.cond_vi[i]) << '\n';
    }
    return o.str();
}

std::string csv_mean_paths(std::span<const Trajectory> trajectories, const ModelParams& p,
                           double x0) {
    std::ostringstream o;
    o << "t,m_hat,m_oracle,n_particles,path_index\n";
    for (std::size_t pi = 0; pi < trajectories.size(); ++pi) {
        const Trajectory& traj = trajectories[pi];
        const std::vector<double> oracle = conditional_mean_oracle(x0, p, traj.db1, traj.dt);
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            o << fmt12(static_cast<double>(k) * traj.dt) << ','
              << fmt12(conditional_mean(traj.states[k])) << ',' << fmt12(oracle[k]) << ','
              << traj.states[k].positions.size() << ',' << pi << '\n';
        }
    }
    return o.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file '" + path.string() + "'");
    out << content;
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

} // namespace mvi
