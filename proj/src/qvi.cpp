#include "mvi/qvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvi/errors.hpp"
#include "mvi/fokker_planck.hpp"

namespace mvi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Golden-section maximization on [lo, hi]; h is assumed unimodal on the
// bracket (grid refinement only, so a bad bracket just returns a lower bound).
template <typename F>
double golden_max(const F& h, double lo, double hi, double& arg) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = h(c);
    double fd = h(d);
    const double span_tol = 1e-13 * std::max(1.0, std::abs(hi) + std::abs(lo));
    for (int it = 0; it < 90 && (b - a) > span_tol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = h(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = h(d);
        }
    }
    if (fc > fd) {
        arg = c;
        return fc;
    }
    arg = d;
    return fd;
}

} // namespace

ReducedFunction reduced_value(const DividendSolution& sol, double c1_factor) {
    if (!(c1_factor > 0.0) || !std::isfinite(c1_factor))
        throw InvalidParam("reduced_value: c1_factor must be finite and positive");
    const double g1 = sol.gamma1;
    const double C1 = sol.C1 * c1_factor;
    const double ub = sol.u_bar;
    const double c = sol.params.c_fixed;
    const double slope = 1.0 / (1.0 + sol.params.lambda_prop);
    ReducedFunction f;
    f.psi = [=](double u) { return u < ub ? C1 * std::pow(u, g1) : (u - c) * slope; };
    f.dpsi = [=](double u) { return u < ub ? C1 * g1 * std::pow(u, g1 - 1.0) : slope; };
    f.d2psi = [=](double u) { return u < ub ? C1 * g1 * (g1 - 1.0) * std::pow(u, g1 - 2.0) : 0.0; };
    return f;
}

MResult intervention_operator_M(const ReducedFunction& psi, double u, const ModelParams& p,
                                std::size_t grid_n) {
    if (grid_n < 2) throw BadCount("intervention_operator_M: grid_n must be >= 2");
    const double headroom = u - p.c_fixed;
    if (!(headroom > 0.0))
        throw NoAdmissibleImpulse("intervention_operator_M: u <= c leaves no admissible impulse");
    const double rate = 1.0 + p.lambda_prop;
    const double zeta_max = headroom / rate;
    auto h = [&](double zeta) { return psi.psi(headroom - rate * zeta) + zeta; };

    MResult best;
    best.value = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        const double zeta = zeta_max * static_cast<double>(i) / static_cast<double>(grid_n);
        const double v = h(zeta);
        if (v > best.value) {
            best.value = v;
            best.argmax_zeta = zeta;
            best_i = i;
        }
    }
    // One refinement pass around the best cell; keep the grid optimum if the
    // interior search cannot beat it (endpoint maxima stay exact).
    const double cell = zeta_max / static_cast<double>(grid_n);
    const double lo = best_i == 0 ? 0.0 : best.argmax_zeta - cell;
    const double hi = std::min(zeta_max, best.argmax_zeta + cell);
    double refined_arg = 0.0;
    const double refined = golden_max(h, lo, hi, refined_arg);
    if (refined > best.value) {
        best.value = refined;
        best.argmax_zeta = refined_arg;
    }
    return best;
}

double generator_G0(const ReducedFunction& f, double u, const ModelParams& p) {
    double up = 0.0;
    double dn = 0.0;
    double step = 0.0;
    const bool need_fd = !f.dpsi || !f.d2psi;
    if (need_fd) {
        step = f.fd_step * std::max(1.0, std::abs(u));
        up = f.psi(u + step);
        dn = f.psi(u - step);
    }
    const double d1 = f.dpsi ? f.dpsi(u) : (up - dn) / (2.0 * step);
    const double d2 = f.d2psi ? f.d2psi(u) : (up - 2.0 * f.psi(u) + dn) / (step * step);
    return -p.rho * f.psi(u) + p.alpha0 * u * d1 + 0.5 * p.sigma1 * p.sigma1 * u * u * d2;
}

std::pair<bool, double> check_condition_vi(const DividendSolution& sol, const ModelParams& p) {
    const double margin = condition_vi_bound(p) - sol.gamma1;
    return {margin >= 0.0, margin};
}

QviReport verify(const ReducedFunction& psi, const DividendSolution& sol, const ModelParams& p,
                 const QviGridSpec& grid_spec) {
    if (grid_spec.n < 10) throw BadCount("verify: need at least 10 grid points");
    const double ub = sol.u_bar;
    const double u_max = grid_spec.u_max > 0.0 ? grid_spec.u_max : 2.0 * ub;
    if (!(u_max > ub)) throw InvalidParam("verify: u_max must exceed the intervention boundary");
    // One-ulp-safe classifier around the boundary point.
    const double edge = 1e-12 * std::max(1.0, ub);

    // Wrapper for the nonlocal term evaluated at x = m = u, so a mark gamma0
    // maps u to u (1 + gamma0).
    TestFunction tf;
    tf.name = "reduced";
    tf.g = psi.psi;
    if (psi.dpsi) {
        tf.g1 = psi.dpsi;
    } else {
        const auto base = psi.psi;
        const double rel = psi.fd_step;
        tf.g1 = [base, rel](double x) {
            const double hh = rel * std::max(1.0, std::abs(x));
            return (base(x + hh) - base(x - hh)) / (2.0 * hh);
        };
    }

    QviReport rep;
    rep.grid.resize(grid_spec.n);
    rep.cond_ii.assign(grid_spec.n, kNaN);
    rep.cond_x.assign(grid_spec.n, kNaN);
    rep.cond_vi.assign(grid_spec.n, kNaN);
    rep.ii_min = std::numeric_limits<double>::infinity();
    rep.vi_max = -std::numeric_limits<double>::infinity();

    bool any_eq = false;
    bool any_vi = false;
    const double step = u_max / static_cast<double>(grid_spec.n);
    for (std::size_t i = 0; i < grid_spec.n; ++i) {
        const double u = static_cast<double>(i + 1) * step;
        rep.grid[i] = u;

        if (u > p.c_fixed) {
            const MResult m = intervention_operator_M(psi, u, p, grid_spec.zeta_grid);
            const double diff = psi.psi(u) - m.value;
            rep.cond_ii[i] = diff;
            rep.ii_min = std::min(rep.ii_min, diff);
            if (u >= ub - edge) {
                rep.ii_eq_max_abs = std::max(rep.ii_eq_max_abs, std::abs(diff));
                any_eq = true;
            }
        }

        if (u < ub - edge) {
            const double g0 = generator_G0(psi, u, p);
            rep.cond_x[i] = g0;
            rep.x_max_abs = std::max(rep.x_max_abs, std::abs(g0));
        } else {
            const double jump = p.levy.rate > 0.0
                                    ? p.levy.rate * jump_expectation(tf, u, u, p.levy)
                                    : 0.0;
            const double v = generator_G0(psi, u, p) + jump;
            rep.cond_vi[i] = v;
            rep.vi_max = std::max(rep.vi_max, v);
            any_vi = true;
        }
    }

    // One-sided value and slope gaps at the boundary, from psi alone so an
    // injected mismatch in either branch is caught. The value gap uses
    // Richardson extrapolation of psi(ub+h) - psi(ub-h) to cancel the smooth
    // part; the left slope is extrapolated from three points strictly below.
    const double h = 1e-5 * std::max(1.0, ub);
    auto across = [&](double hh) { return psi.psi(ub + hh) - psi.psi(ub - hh); };
    rep.fit_value_gap = 2.0 * across(0.5 * h) - across(h);
    const double right =
        (-3.0 * psi.psi(ub) + 4.0 * psi.psi(ub + h) - psi.psi(ub + 2.0 * h)) / (2.0 * h);
    const double pa = psi.psi(ub - 3.0 * h);
    const double pb = psi.psi(ub - 2.0 * h);
    const double pc = psi.psi(ub - h);
    const double left = (pa - 4.0 * pb + 3.0 * pc) / (2.0 * h) + (pa - 2.0 * pb + pc) / h;
    rep.fit_deriv_gap = right - left;

    rep.ii_ok = rep.ii_min >= -grid_spec.tol_ii && any_eq && rep.ii_eq_max_abs <= grid_spec.tol_ii;
    rep.x_ok = rep.x_max_abs <= grid_spec.tol_x;
    rep.vi_ok = any_vi && rep.vi_max <= grid_spec.tol_vi;
    rep.fit_ok = std::abs(rep.fit_value_gap) <= grid_spec.tol_fit &&
                 std::abs(rep.fit_deriv_gap) <= grid_spec.tol_fit;
    rep.passed = rep.ii_ok && rep.x_ok && rep.vi_ok && rep.fit_ok;
    return rep;
}

} // namespace mvi
