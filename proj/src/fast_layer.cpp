#include "fhn/fast_layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhn/errors.hpp"
#include "fhn/roots.hpp"

namespace fhn::layer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct OuterSaddles {
    double xl;
    double xr;
};

OuterSaddles outer_saddles(double pbar) {
    const auto eq = fast_equilibria_x1(pbar);
    if (eq.size() < 2) throw DomainError("layer problem has a single equilibrium at this pbar");
    return {eq.front(), eq.back()};
}

// Unit eigenvector (1, lambda) of A(x1) for the larger (unstable) or smaller
// (stable) real eigenvalue; sign picks the x1-orientation.
std::array<double, 2> eigen_direction(double x1, double s, bool unstable, double sign) {
    const auto ev = eigenvalues(fast_jacobian(x1, s));
    const auto& l = unstable ? ev.back() : ev.front();
    if (l.imag() != 0.0) throw DomainError("equilibrium is not a saddle (complex eigenvalues)");
    const double lam = l.real();
    if (unstable ? !(lam > 0.0) : !(lam < 0.0)) throw DomainError("equilibrium has no such hyperbolic direction");
    const double n = std::hypot(1.0, lam);
    return {sign / n, sign * lam / n};
}

ode::Field<2> layer_field(double pbar, double s) {
    return [pbar, s](double, const ode::Vec<2>& z) {
        const FastState r = fast_field({z[0], z[1]}, pbar, s);
        return ode::Vec<2>{r.x1, r.x2};
    };
}

// First crossing of x1 = section; NaN when the branch leaves through the
// far guard, escapes, or times out.
double first_crossing(const ode::Field<2>& field, const ode::Vec<2>& start, double t_span, double section,
                      int crossing_dir, double guard, int guard_dir, const ode::IntegratorOptions& base) {
    ode::IntegratorOptions io = base;
    io.store_dense = false;
    const std::vector<ode::Event<2>> events{
        {[section](double, const ode::Vec<2>& z) { return z[0] - section; }, true, crossing_dir},
        {[guard](double, const ode::Vec<2>& z) { return z[0] - guard; }, true, guard_dir},
    };
    const auto tr = ode::integrate<2>(field, start, 0.0, t_span, io, events);
    if (tr.reason == ode::Termination::event && !tr.events.empty() && tr.events.back().id == 0)
        return tr.events.back().state[1];
    return kNaN;
}

}  // namespace

double HamiltonianData::V(double x1) const {
    const double x2 = x1 * x1;
    return pbar * x1 / 5.0 - x2 / 100.0 + 11.0 * x2 * x1 / 150.0 - x2 * x2 / 20.0;
}

double HamiltonianData::H(const FastState& z) const { return 0.5 * z.x2 * z.x2 + V(z.x1); }

const char* to_string(HetDirection d) {
    return d == HetDirection::left_to_right ? "left-to-right" : "right-to-left";
}

SaddleDirections saddle_eigendirections(const EquilibriumInfo& eq, double s) {
    if (eq.kind != EquilibriumKind::saddle) throw DomainError("saddle_eigendirections: equilibrium is not a saddle");
    const double x1 = eq.x1();
    double sign;
    switch (eq.branch) {
        case ManifoldBranch::left: sign = 1.0; break;
        case ManifoldBranch::right: sign = -1.0; break;
        default: throw DomainError("saddle_eigendirections: saddle on the middle branch");
    }
    return {eigen_direction(x1, s, true, sign), eigen_direction(x1, s, false, sign)};
}

SectionGap section_gap(double pbar, double s, HetDirection dir, const ShootOptions& opts) {
    const auto [xl, xr] = outer_saddles(pbar);
    const double section = 0.5 * (xl + xr);
    const auto field = layer_field(pbar, s);
    const double T = opts.integ.max_time;

    SectionGap out{kNaN, GapStatus::crossed, section, kNaN, kNaN};
    if (dir == HetDirection::left_to_right) {
        const auto u = eigen_direction(xl, s, true, 1.0);
        const auto st = eigen_direction(xr, s, false, -1.0);
        out.x2_source = first_crossing(field, {xl + opts.offset * u[0], opts.offset * u[1]}, T, section, +1,
                                       xl - 1.0, -1, opts.integ);
        out.x2_target = first_crossing(field, {xr + opts.offset * st[0], opts.offset * st[1]}, -T, section, -1,
                                       xr + 1.0, +1, opts.integ);
    } else {
        const auto u = eigen_direction(xr, s, true, -1.0);
        const auto st = eigen_direction(xl, s, false, 1.0);
        out.x2_source = first_crossing(field, {xr + opts.offset * u[0], opts.offset * u[1]}, T, section, -1,
                                       xr + 1.0, +1, opts.integ);
        out.x2_target = first_crossing(field, {xl + opts.offset * st[0], opts.offset * st[1]}, -T, section, +1,
                                       xl - 1.0, -1, opts.integ);
    }
    const bool src = std::isfinite(out.x2_source);
    const bool tgt = std::isfinite(out.x2_target);
    if (src && tgt) {
        out.gap = out.x2_source - out.x2_target;
        return out;
    }
    if (!src && !tgt) throw NumericalError("section_gap: neither branch reaches the section");
    // A branch that misses the section turned back before it: its x2 is
    // "below" (left-to-right) or "above" (right-to-left) every crossing value.
    const double lr = dir == HetDirection::left_to_right ? 1.0 : -1.0;
    if (!src) {
        out.status = GapStatus::source_missed;
        out.gap = -lr * kInf;
    } else {
        out.status = GapStatus::target_missed;
        out.gap = lr * kInf;
    }
    return out;
}

double shoot_heteroclinic(double pbar, double s, HetDirection dir, const ShootOptions& opts) {
    return section_gap(pbar, s, dir, opts).gap;
}

namespace {

HetConnection make_connection(double pbar, double s, HetDirection dir, double gap) {
    const auto [xl, xr] = outer_saddles(pbar);
    const bool lr = dir == HetDirection::left_to_right;
    return {pbar, s, dir, gap, fast_equilibrium_info(lr ? xl : xr, s), fast_equilibrium_info(lr ? xr : xl, s)};
}

void check_converged(double gap, double tol, const char* who) {
    if (!(std::abs(gap) < tol))
        throw NumericalError(std::string(who) + ": bracket collapsed onto a gap discontinuity, not a connection");
}

}  // namespace

HetConnection find_het_speed(double pbar, double s_lo, double s_hi, HetDirection dir, const HetSolveOptions& opts) {
    auto g = [&](double s) { return shoot_heteroclinic(pbar, s, dir, opts.shoot); };
    const auto r = roots::illinois(g, s_lo, s_hi, {.x_tol = opts.param_tol, .f_tol = opts.gap_tol});
    check_converged(r.fx, std::max(opts.gap_tol, 1e-9), "find_het_speed");
    return make_connection(pbar, r.x, dir, r.fx);
}

HetConnection find_het_pbar(double s, double pbar_lo, double pbar_hi, HetDirection dir, const HetSolveOptions& opts) {
    auto g = [&](double pb) { return shoot_heteroclinic(pb, s, dir, opts.shoot); };
    const auto r = roots::illinois(g, pbar_lo, pbar_hi, {.x_tol = opts.param_tol, .f_tol = opts.gap_tol});
    check_converged(r.fx, std::max(opts.gap_tol, 1e-9), "find_het_pbar");
    return make_connection(r.x, s, dir, r.fx);
}

namespace {

// Gap at (pbar, s), or NaN outside the three-equilibrium band.
double safe_gap(double pbar, double s, HetDirection dir, const ShootOptions& so) {
    try {
        return shoot_heteroclinic(pbar, s, dir, so);
    } catch (const DomainError&) {
        return kNaN;
    } catch (const NumericalError&) {
        return kNaN;
    }
}

// Grow a bracket around `guess` for the free parameter; nullopt if none.
std::optional<roots::Bracket> grow_bracket(const roots::ScalarFn& g, double guess, double w0, double w_max) {
    const double g0 = g(guess);
    if (std::isnan(g0)) return std::nullopt;
    if (g0 == 0.0) return roots::Bracket{guess, guess};
    for (double w = w0; w <= w_max; w *= 2.0) {
        for (double side : {1.0, -1.0}) {
            const double x = guess + side * w;
            const double gx = g(x);
            if (std::isnan(gx)) continue;
            if (roots::opposite_signs(g0, gx)) return roots::Bracket{std::min(guess, x), std::max(guess, x)};
        }
    }
    return std::nullopt;
}

}  // namespace

CurveBranch<HetConnection> continue_het_curve(const HetConnection& seed, double step, const ContinuationLimits& limits,
                                              const HetSolveOptions& opts) {
    if (!(step > 0.0)) throw DomainError("continue_het_curve: step must be positive");
    CurveBranch<HetConnection> branch;
    branch.label = to_string(seed.direction);
    branch.points.push_back(seed);
    const HetDirection dir = seed.direction;
    const double k = limits.pbar_scale;

    // initial secant: straight up in s
    double dp = 0.0, ds = 1.0;
    double h = step;
    while (branch.points.size() < limits.max_points) {
        const auto& last = branch.points.back();
        if (last.s >= limits.s_max) break;
        if (h < limits.min_step) {
            branch.termination = "step underflow at pbar=" + std::to_string(last.pbar) + " s=" + std::to_string(last.s);
            break;
        }
        const double norm = std::hypot(k * dp, ds);
        const double pred_p = last.pbar + h * dp / norm;
        const double pred_s = last.s + h * ds / norm;
        std::optional<HetConnection> next;
        try {
            if (std::abs(ds) >= std::abs(k * dp)) {
                const double s_fix = std::clamp(pred_s, limits.s_min, limits.s_max);
                auto g = [&](double pb) { return safe_gap(pb, s_fix, dir, opts.shoot); };
                const auto br = grow_bracket(g, pred_p, 0.25 * h / k, 4.0 * h / k);
                if (br) next = find_het_pbar(s_fix, br->lo, br->hi, dir, opts);
            } else {
                auto g = [&](double s) { return safe_gap(pred_p, s, dir, opts.shoot); };
                const auto br = grow_bracket(g, pred_s, 0.25 * h, 4.0 * h);
                if (br) next = find_het_speed(pred_p, br->lo, br->hi, dir, opts);
            }
        } catch (const NumericalError&) {
            next.reset();
        } catch (const DomainError&) {
            next.reset();
        }
        if (!next || next->s < limits.s_min - 1e-12) {
            h *= 0.5;
            continue;
        }
        dp = next->pbar - last.pbar;
        ds = next->s - last.s;
        if (dp == 0.0 && ds == 0.0) {
            h *= 0.5;
            continue;
        }
        branch.points.push_back(*next);
        h = std::min(step, 1.5 * h);
    }
    if (branch.termination.empty() && branch.points.size() >= limits.max_points) branch.termination = "max points";
    return branch;
}

std::array<CurveBranch<HetConnection>, 2> het_v_curve(double step, const ContinuationLimits& limits,
                                                      const HetSolveOptions& opts) {
    const double pstar = double_het_pbar();
    std::array<CurveBranch<HetConnection>, 2> out;
    int i = 0;
    for (auto dir : {HetDirection::left_to_right, HetDirection::right_to_left}) {
        const auto seed = find_het_pbar(0.0, pstar - 0.01, pstar + 0.01, dir, opts);
        out[i++] = continue_het_curve(seed, step, limits, opts);
    }
    return out;
}

double double_het_pbar() {
    const auto [pl, pr] = fast_pbar_bounds();
    auto energy_gap = [](double pbar) {
        const auto eq = fast_equilibria_x1(pbar);
        const HamiltonianData ham{pbar};
        return ham.V(eq.front()) - ham.V(eq.back());
    };
    const double w = 1e-6 * (pr - pl);
    return roots::illinois(energy_gap, pl + w, pr - w, {.x_tol = 0.0, .f_tol = 0.0, .max_iter = 300}).x;
}

}  // namespace fhn::layer
