#include "mvi/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "mvi/errors.hpp"
#include "mvi/io_util.hpp"

namespace mvi {

namespace {

const char* const kKeys[] = {"alpha0",      "sigma1",  "sigma2", "rho",     "lambda",
                             "c",           "jump_rate", "jump_gamma0", "n_particles",
                             "n_paths",     "dt",      "horizon", "x0",     "seed"};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        throw ConfigError("config key '" + key + "': bad number '" + text + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
    if (text.empty() || text[0] == '-')
        throw ConfigError("config key '" + key + "': bad count '" + text + "'");
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw ConfigError("config key '" + key + "': bad count '" + text + "'");
    return static_cast<std::uint64_t>(v);
}

} // namespace

void validate_sim(const SimConfig& sim) {
    std::vector<std::string> bad;
    if (sim.n_particles < 1) bad.emplace_back("n_particles must be >= 1");
    if (sim.n_paths < 1) bad.emplace_back("n_paths must be >= 1");
    if (!(sim.dt > 0.0) || !std::isfinite(sim.dt)) bad.emplace_back("dt must be positive and finite");
    if (!(sim.horizon > 0.0) || !std::isfinite(sim.horizon)) {
        bad.emplace_back("horizon must be positive and finite");
    } else if (sim.dt > sim.horizon) {
        bad.emplace_back("dt must not exceed horizon");
    }
    if (!(sim.x0 > 0.0) || !std::isfinite(sim.x0)) bad.emplace_back("x0 must be positive and finite");
    if (bad.empty()) return;
    std::string msg = "invalid simulation settings:";
    for (const std::string& b : bad) msg += "\n  - " + b;
    throw InvalidParam(msg);
}

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        bool known = false;
        for (const char* k : kKeys) known = known || key == k;
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        if (!kv.emplace(key, value).second) throw ConfigError("duplicate config key '" + key + "'");
    }
    std::string missing;
    for (const char* k : kKeys) {
        if (kv.find(k) == kv.end()) {
            if (!missing.empty()) missing += ", ";
            missing += k;
        }
    }
    if (!missing.empty()) throw ConfigError("missing config key(s): " + missing);

    RunConfig cfg;
    cfg.model.alpha0 = to_double("alpha0", kv["alpha0"]);
    cfg.model.sigma1 = to_double("sigma1", kv["sigma1"]);
    cfg.model.sigma2 = to_double("sigma2", kv["sigma2"]);
    cfg.model.rho = to_double("rho", kv["rho"]);
    cfg.model.lambda_prop = to_double("lambda", kv["lambda"]);
    cfg.model.c_fixed = to_double("c", kv["c"]);
    const double rate = to_double("jump_rate", kv["jump_rate"]);
    cfg.model.levy = parse_gamma0_preset(kv["jump_gamma0"], rate);
    cfg.sim.n_particles = static_cast<std::size_t>(to_u64("n_particles", kv["n_particles"]));
    cfg.sim.n_paths = static_cast<std::size_t>(to_u64("n_paths", kv["n_paths"]));
    cfg.sim.dt = to_double("dt", kv["dt"]);
    cfg.sim.horizon = to_double("horizon", kv["horizon"]);
    cfg.sim.x0 = to_double("x0", kv["x0"]);
    cfg.sim.seed = to_u64("seed", kv["seed"]);

    validate_params(cfg.model);
    validate_sim(cfg.sim);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out << "alpha0 = " << fmt12(cfg.model.alpha0) << '\n';
    out << "sigma1 = " << fmt12(cfg.model.sigma1) << '\n';
    out << "sigma2 = " << fmt12(cfg.model.sigma2) << '\n';
    out << "rho = " << fmt12(cfg.model.rho) << '\n';
    out << "lambda = " << fmt12(cfg.model.lambda_prop) << '\n';
    out << "c = " << fmt12(cfg.model.c_fixed) << '\n';
    out << "jump_rate = " << fmt12(cfg.model.levy.rate) << '\n';
    out << "jump_gamma0 = " << gamma0_preset_string(cfg.model.levy) << '\n';
    out << "n_particles = " << cfg.sim.n_particles << '\n';
    out << "n_paths = " << cfg.sim.n_paths << '\n';
    out << "dt = " << fmt12(cfg.sim.dt) << '\n';
    out << "horizon = " << fmt12(cfg.sim.horizon) << '\n';
    out << "x0 = " << fmt12(cfg.sim.x0) << '\n';
    out << "seed = " << cfg.sim.seed << '\n';
    return out.str();
}

} // namespace mvi
