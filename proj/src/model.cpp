#include "mvi/model.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "mvi/errors.hpp"

namespace mvi {

double LevyMeasureSpec::mean_gamma0() const noexcept {
    switch (law) {
        case MarkLaw::none: return 0.0;
        case MarkLaw::constant: return g0;
        case MarkLaw::uniform: return 0.5 * (a + b);
    }
    return 0.0;
}

double LevyMeasureSpec::second_moment_gamma0() const noexcept {
    switch (law) {
        case MarkLaw::none: return 0.0;
        case MarkLaw::constant: return g0 * g0;
        case MarkLaw::uniform: return (a * a + a * b + b * b) / 3.0;
    }
    return 0.0;
}

double LevyMeasureSpec::gamma0_quantile(double u) const noexcept {
    switch (law) {
        case MarkLaw::none: return 0.0;
        case MarkLaw::constant: return g0;
        case MarkLaw::uniform: return a + (b - a) * u;
    }
    return 0.0;
}

double LevyMeasureSpec::sample_gamma0(Substream& s) const noexcept {
    switch (law) {
        case MarkLaw::none: return 0.0;
        case MarkLaw::constant: return g0;
        case MarkLaw::uniform: return a + (b - a) * s.uniform();
    }
    return 0.0;
}

LevyMeasureSpec levy_none() { return LevyMeasureSpec{}; }

LevyMeasureSpec levy_constant(double rate, double g0) {
    LevyMeasureSpec l;
    l.rate = rate;
    l.law = MarkLaw::constant;
    l.g0 = g0;
    return l;
}

LevyMeasureSpec levy_uniform(double rate, double a, double b) {
    LevyMeasureSpec l;
    l.rate = rate;
    l.law = MarkLaw::uniform;
    l.a = a;
    l.b = b;
    return l;
}

double levy_mass(const LevyMeasureSpec& levy) noexcept { return levy.rate; }

ValidatedModel validate_params(const ModelParams& p) {
    std::vector<std::string> bad;
    auto require = [&bad](bool ok, const char* msg) {
        if (!ok) bad.emplace_back(msg);
    };

    require(std::isfinite(p.alpha0), "alpha0 must be finite");
    require(std::isfinite(p.sigma1) && p.sigma1 != 0.0, "sigma1 must be finite and nonzero");
    require(std::isfinite(p.sigma2), "sigma2 must be finite");
    require(std::isfinite(p.rho) && p.rho > 0.0, "rho must be > 0");
    require(std::isfinite(p.lambda_prop) && p.lambda_prop >= 0.0, "lambda must be >= 0");
    require(std::isfinite(p.c_fixed) && p.c_fixed > 0.0, "c_fixed must be > 0");
    require(std::isfinite(p.levy.rate) && p.levy.rate >= 0.0, "jump_rate must be >= 0");
    switch (p.levy.law) {
        case MarkLaw::none:
            break;
        case MarkLaw::constant:
            require(std::isfinite(p.levy.g0) && p.levy.g0 >= -1.0,
                    "jump_gamma0 constant must be finite and >= -1");
            break;
        case MarkLaw::uniform:
            require(std::isfinite(p.levy.a) && std::isfinite(p.levy.b) && p.levy.a <= p.levy.b,
                    "jump_gamma0 uniform needs a <= b, both finite");
            require(p.levy.a >= -1.0, "jump_gamma0 uniform lower bound must be >= -1");
            break;
    }

    if (!bad.empty()) {
        std::string msg = "invalid model parameters:";
        for (const auto& m : bad) msg += "\n  - " + m;
        throw InvalidParam(msg);
    }
    return ValidatedModel(p);
}

LevyMeasureSpec parse_gamma0_preset(const std::string& text, double rate) {
    if (text == "none") {
        LevyMeasureSpec l = levy_none();
        l.rate = rate;
        return l;
    }
    if (text.rfind("constant:", 0) == 0) {
        char* end = nullptr;
        const std::string body = text.substr(9);
        const double g0 = std::strtod(body.c_str(), &end);
        if (end == body.c_str() || *end != '\0')
            throw ConfigError("jump_gamma0: cannot parse \"" + text + "\"");
        return levy_constant(rate, g0);
    }
    if (text.rfind("uniform:", 0) == 0) {
        const std::string body = text.substr(8);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw ConfigError("jump_gamma0: uniform needs \"uniform:<a>,<b>\", got \"" + text + "\"");
        char* end = nullptr;
        const std::string sa = body.substr(0, comma), sb = body.substr(comma + 1);
        const double a = std::strtod(sa.c_str(), &end);
        if (end == sa.c_str() || *end != '\0')
            throw ConfigError("jump_gamma0: cannot parse \"" + text + "\"");
        const double b = std::strtod(sb.c_str(), &end);
        if (end == sb.c_str() || *end != '\0')
            throw ConfigError("jump_gamma0: cannot parse \"" + text + "\"");
        return levy_uniform(rate, a, b);
    }
    throw ConfigError("jump_gamma0: unknown preset \"" + text +
                      "\" (expected none | constant:<g> | uniform:<a>,<b>)");
}

std::string gamma0_preset_string(const LevyMeasureSpec& levy) {
    char buf[80];
    switch (levy.law) {
        case MarkLaw::none:
            return "none";
        case MarkLaw::constant:
            std::snprintf(buf, sizeof buf, "constant:%.12g", levy.g0);
            return buf;
        case MarkLaw::uniform:
            std::snprintf(buf, sizeof buf, "uniform:%.12g,%.12g", levy.a, levy.b);
            return buf;
    }
    return "none";
}

} // namespace mvi
