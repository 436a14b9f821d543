#pragma once

#include <string>

#include "mvi/rng.hpp"

namespace mvi {

// Finite-activity jump measure: Poisson arrivals at `rate` with marks zeta
// mapped through gamma0 to relative jump sizes. gamma0(zeta) >= -1 always, so
// a jump can at worst wipe out the mean-field factor, never flip its sign.
enum class MarkLaw { none, constant, uniform };

struct LevyMeasureSpec {
    double rate = 0.0;  // jump intensity; equals the total mass ||nu||
    MarkLaw law = MarkLaw::none;
    double g0 = 0.0;  // constant: gamma0 = g0 for every mark
    double a = 0.0;   // uniform: gamma0(zeta) = zeta with zeta ~ U[a, b]
    double b = 0.0;

    double mean_gamma0() const noexcept;
    double second_moment_gamma0() const noexcept;
    // Quantile of the gamma0(mark) distribution, u in [0, 1]. Degenerate laws
    // return the constant; used to reduce mark expectations to integrals on
    // the unit interval.
    double gamma0_quantile(double u) const noexcept;
    double sample_gamma0(Substream& s) const noexcept;
};

LevyMeasureSpec levy_none();
LevyMeasureSpec levy_constant(double rate, double g0);
LevyMeasureSpec levy_uniform(double rate, double a, double b);

// Total mass ||nu|| of the jump measure.
double levy_mass(const LevyMeasureSpec& levy) noexcept;

struct ModelParams {
    double alpha0 = 0.0;       // drift rate
    double sigma1 = 0.0;       // common-noise volatility, must be nonzero
    double sigma2 = 0.0;       // idiosyncratic volatility; zero is allowed
    double rho = 0.0;          // discount rate, > 0
    double lambda_prop = 0.0;  // proportional transaction cost, >= 0
    double c_fixed = 0.0;      // fixed transaction cost, > 0
    LevyMeasureSpec levy;
};

// Wrapper certifying that params passed validate_params. Immutable.
class ValidatedModel {
  public:
    const ModelParams& params() const noexcept { return p_; }

  private:
    friend ValidatedModel validate_params(const ModelParams& p);
    explicit ValidatedModel(const ModelParams& p) : p_(p) {}
    ModelParams p_;
};

// Throws InvalidParam whose message names every violated constraint.
ValidatedModel validate_params(const ModelParams& p);

// Parses the jump_gamma0 preset syntax: "none" | "constant:<g>" |
// "uniform:<a>,<b>". Throws ConfigError on malformed input.
LevyMeasureSpec parse_gamma0_preset(const std::string& text, double rate);
std::string gamma0_preset_string(const LevyMeasureSpec& levy);

} // namespace mvi
