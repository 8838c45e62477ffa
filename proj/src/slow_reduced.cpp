#include "fhn/slow_reduced.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhn/errors.hpp"
#include "fhn/quadrature.hpp"
#include "fhn/roots.hpp"

namespace fhn::reduced {

namespace {

using C = CubicNullcline;

const double kSqrt91 = std::sqrt(91.0);
const double kPhiA = kSqrt91 / 10.0;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite input");
}

}  // namespace

double slow_flow_rate(double x1, double p, double s) {
    require_finite(x1, "slow_flow_rate");
    require_finite(p, "slow_flow_rate");
    if (!(s > 0.0)) throw DomainError("slow_flow_rate: wave-speed division (s must be > 0)");
    const double d = C::d1(x1);
    if (std::abs(d) < 1e-14) throw DomainError("slow_flow_rate: fold blow-up");
    return (x1 - C::c(x1, p)) / (s * d);
}

double desingularized_rate(double x1, double p) { return x1 - C::c(x1, p); }

bool desingularized_time_reversed(double x1) { return C::d1(x1) < 0.0; }

std::pair<double, double> reduced_hopf_values(double eps) {
    require_finite(eps, "reduced_hopf_values");
    const double e2 = eps * eps;
    const double disc = 11728171.0 / 182250000.0 - 359.0 * eps / 1350.0 + 509.0 * e2 / 2700.0 - e2 * eps / 27.0;
    if (disc < 0.0) throw DomainError("reduced_hopf_values: negative discriminant, no reduced Hopf points");
    const double r = std::sqrt(disc);
    return {2057.0 / 6750.0 - r, 2057.0 / 6750.0 + r};
}

double maximal_canard_p(double eps) {
    if (!(eps >= 0.0)) throw DomainError("maximal_canard_p: eps must be >= 0");
    return slow_fold_params().first + 5.0 * eps / 8.0;
}

CanardInfo canard_info(double eps) {
    const auto [hm, hp] = reduced_hopf_values(eps);
    return {eps, maximal_canard_p(eps), hm, hp};
}

double canard_phi(double x) { return kPhiA * x * x - x * x * x; }

double canard_h_max() { return canard_phi(kSqrt91 / 15.0); }

std::pair<double, double> canard_roots(double h) {
    const double hmax = canard_h_max();
    if (!(h > 0.0 && h <= hmax * (1.0 + 1e-15)))
        throw DomainError("canard_roots: h outside (0, phi(sqrt(91)/15)]");
    h = std::min(h, hmax);
    auto g = [h](double x) { return canard_phi(x) - h; };
    auto dg = [](double x) { return 2.0 * kPhiA * x - 3.0 * x * x; };
    const double left_end = -kSqrt91 / 30.0;
    const double right_end = kSqrt91 / 15.0;
    // at h = hmax both roots sit on the interval ends (and the right one is a double root)
    const double xl = (h == hmax) ? left_end : roots::newton_bisect(g, dg, left_end, 0.0).x;
    const double xm = (h == hmax) ? right_end : roots::newton_bisect(g, dg, 0.0, right_end).x;
    return {xl, xm};
}

double canard_integrand(double x) {
    // phi'^2 / (x - phi) with the common factor x cancelled; 1 - a x + x^2 > 0.
    const double u = 2.0 * kPhiA - 3.0 * x;
    return x * u * u / (1.0 - kPhiA * x + x * x);
}

double canard_stability_R(double h, double abs_tol) {
    const auto [xl, xm] = canard_roots(h);
    const auto left = quad::gauss_kronrod(canard_integrand, xl, 0.0, 0.5 * abs_tol);
    const auto right = quad::gauss_kronrod(canard_integrand, 0.0, xm, 0.5 * abs_tol);
    return left.value + right.value;
}

const char* to_string(ReducedVariant v) { return v == ReducedVariant::first_order ? "first-order" : "second-order"; }

const char* to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::equilibrium: return "equilibrium";
        case OrbitKind::small: return "small";
        case OrbitKind::relaxation: return "relaxation";
    }
    return "unknown";
}

AttractorSummary summarize_attractor(const std::vector<double>& t, const std::vector<double>& x1,
                                     const std::vector<double>& x2, double threshold) {
    if (t.size() < 3 || x1.size() != t.size() || x2.size() != t.size())
        throw DomainError("summarize_attractor: need at least three aligned samples");
    AttractorSummary sm{};
    const auto [x1lo, x1hi] = std::minmax_element(x1.begin(), x1.end());
    const auto [x2lo, x2hi] = std::minmax_element(x2.begin(), x2.end());
    sm.x1_min = *x1lo;
    sm.x1_max = *x1hi;
    sm.x1_amplitude = sm.x1_max - sm.x1_min;
    sm.x2_min = *x2lo;
    sm.x2_max = *x2hi;
    sm.x2_amplitude = sm.x2_max - sm.x2_min;
    sm.period = 0.0;
    sm.x2_excursions = 0;

    if (sm.x1_amplitude < 1e-6) {
        sm.kind = OrbitKind::equilibrium;
        return sm;
    }
    sm.kind = sm.x1_max > fold_points().x_plus ? OrbitKind::relaxation : OrbitKind::small;

    // last full period between upward crossings of the x1 mid-level
    const double mid = 0.5 * (sm.x1_min + sm.x1_max);
    std::vector<std::size_t> up;
    for (std::size_t i = 1; i < x1.size(); ++i)
        if (x1[i - 1] < mid && x1[i] >= mid) up.push_back(i);
    if (up.size() < 2) return sm;
    const std::size_t i0 = up[up.size() - 2];
    const std::size_t i1 = up.back();
    sm.period = t[i1] - t[i0];

    double peak = 0.0;
    for (std::size_t i = i0; i < i1; ++i) peak = std::max(peak, std::abs(x2[i]));
    const double level = threshold * peak;
    int runs = 0;
    bool inside = false;
    for (std::size_t i = i0; i < i1; ++i) {
        const bool above = std::abs(x2[i]) > level;
        if (above && !inside) ++runs;
        inside = above;
    }
    // a pulse straddling the period boundary was counted twice
    if (runs > 1 && std::abs(x2[i0]) > level && std::abs(x2[i1 - 1]) > level) --runs;
    sm.x2_excursions = runs;
    return sm;
}

ReducedOrbit simulate_reduced(double p, double s, double eps, ReducedVariant variant, const ReducedOptions& opts) {
    require_finite(p, "simulate_reduced");
    if (!(s > 0.0)) throw DomainError("simulate_reduced: wave-speed division (s must be > 0)");
    if (!(eps > 0.0)) throw DomainError("simulate_reduced: eps must be > 0");
    if (!(opts.t_end > 0.0) || !(opts.window > 0.0 && opts.window <= 1.0) || opts.samples < 3)
        throw DomainError("simulate_reduced: bad options");

    const double xs = equilibrium_x1(p);
    const double x0 = xs + opts.initial_offset;
    ode::Field<2> field;
    ode::Vec<2> z0;
    ode::IntegratorOptions io = opts.integ;
    io.max_time = opts.t_end;
    if (variant == ReducedVariant::first_order) {
        field = [p, eps](double, const ode::Vec<2>& z) {
            return ode::Vec<2>{(C::c0(z[0]) - z[1] + p) / eps, z[0] - z[1]};
        };
        z0 = {x0, xs};
    } else {
        field = [p, s, eps](double, const ode::Vec<2>& z) {
            const double x = z[0], w = z[1];
            const double rhs = (-(x - C::c0(x) - p) / (s * s) + w * (C::d1(x) - eps) / s) / eps;
            return ode::Vec<2>{w, rhs};
        };
        z0 = {x0, (C::c0(x0) - xs + p) / (s * eps)};
        // x2bar = x2 / eps is O(1 / (s eps)) on relaxation orbits
        io.escape_radius = std::max(io.escape_radius, 100.0 / (s * eps));
    }

    ReducedOrbit out{variant, ode::integrate<2>(field, z0, 0.0, opts.t_end, io), {}, {}, {}, {}};
    const auto& tr = out.trajectory;
    if (tr.reason == ode::Termination::escape) throw NumericalError("simulate_reduced: orbit escaped");
    if (tr.reason == ode::Termination::step_failure) throw NumericalError("simulate_reduced: step failure");

    const double tb = tr.t_final() * (1.0 - opts.window);
    const double te = tr.t_final();
    out.t.resize(opts.samples);
    out.x1.resize(opts.samples);
    out.x2.resize(opts.samples);
    for (std::size_t i = 0; i < opts.samples; ++i) {
        const double ti = tb + (te - tb) * static_cast<double>(i) / static_cast<double>(opts.samples - 1);
        const auto z = tr.at(ti);
        out.t[i] = ti;
        out.x1[i] = z[0];
        out.x2[i] = variant == ReducedVariant::first_order ? (C::c0(z[0]) - z[1] + p) / s : eps * z[1];
    }
    out.summary = summarize_attractor(out.t, out.x1, out.x2, opts.excursion_threshold);
    return out;
}

}  // namespace fhn::reduced
