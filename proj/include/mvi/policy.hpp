#pragma once

#include <limits>
#include <variant>

#include "mvi/model.hpp"

namespace mvi {

// Intervene when the conditional mean first reaches u_bar (comparison uses >=,
// so the continuation region is closed on the left), paying out everything
// above the fixed cost. u_bar = +inf encodes "never intervene".
struct ThresholdPolicy {
    double u_bar = std::numeric_limits<double>::infinity();

    double payout(double u, const ModelParams& p) const noexcept {
        return (u - p.c_fixed) / (1.0 + p.lambda_prop);
    }
};

// Liquidate once at the first grid time >= t1, regardless of level; the fixed
// cost is paid even when the payout clamps to zero. Demonstrates the
// unbounded-value regime alpha0 > rho.
struct WaitThenLiquidate {
    double t1 = 0.0;
};

using Policy = std::variant<ThresholdPolicy, WaitThenLiquidate>;

} // namespace mvi
