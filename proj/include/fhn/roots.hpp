#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "fhn/errors.hpp"

namespace fhn::roots {

struct Bracket {
    double lo;
    double hi;
    double width() const { return std::abs(hi - lo); }
    double mid() const { return 0.5 * (lo + hi); }
};

struct RootResult {
    double x;
    double fx;
    Bracket bracket;
    int iterations;
};

struct RootOptions {
    double x_tol = 1e-14;   // absolute bracket width
    double f_tol = 0.0;     // stop once |f| <= f_tol (0 disables)
    int max_iter = 200;
};

using ScalarFn = std::function<double(double)>;

inline bool opposite_signs(double fa, double fb) {
    return (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0);
}

/// Newton steps safeguarded by a sign-change bracket. Used for the fixed
/// cubics of the model, where roots can sit next to a fold and a plain
/// closed form loses half its digits.
inline RootResult newton_bisect(const ScalarFn& f, const ScalarFn& df, double a, double b,
                                const RootOptions& opts = {}) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, 0.0, {a, a}, 0};
    if (fb == 0.0) return {b, 0.0, {b, b}, 0};
    if (!opposite_signs(fa, fb)) throw NumericalError("newton_bisect: no sign change in bracket");
    double lo = a, hi = b, flo = fa;
    double x = 0.5 * (lo + hi);
    for (int it = 1; it <= opts.max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0 || (opts.f_tol > 0.0 && std::abs(fx) <= opts.f_tol)) return {x, fx, {lo, hi}, it};
        if (opposite_signs(flo, fx)) {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        if (std::abs(hi - lo) <= opts.x_tol) return {x, fx, {lo, hi}, it};
        const double d = df(x);
        double next = (d != 0.0) ? x - fx / d : lo - 1.0;
        if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
        if (next == x) return {x, fx, {lo, hi}, it};
        x = next;
    }
    return {x, f(x), {lo, hi}, opts.max_iter};
}

/// Bracketed root of a continuous function by regula falsi with the
/// Illinois modification. Non-finite function values carry sign only;
/// whenever one appears the step falls back to bisection.
inline RootResult illinois(const ScalarFn& f, double a, double b, const RootOptions& opts = {}) {
    double fa = f(a);
    double fb = f(b);
    if (std::isnan(fa) || std::isnan(fb)) throw NumericalError("illinois: NaN at bracket end");
    if (fa == 0.0) return {a, 0.0, {a, a}, 0};
    if (fb == 0.0) return {b, 0.0, {b, b}, 0};
    if (!opposite_signs(fa, fb)) throw NumericalError("illinois: no sign change in bracket");
    int side = 0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        double x;
        if (std::isfinite(fa) && std::isfinite(fb)) {
            x = (a * fb - b * fa) / (fb - fa);
            if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        } else {
            x = 0.5 * (a + b);
        }
        const double fx = f(x);
        if (std::isnan(fx)) throw NumericalError("illinois: NaN inside bracket");
        if (fx == 0.0 || (opts.f_tol > 0.0 && std::abs(fx) <= opts.f_tol))
            return {x, fx, {std::min(a, b), std::max(a, b)}, it};
        if (opposite_signs(fx, fb)) {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
            side = 0;
        } else {
            b = x;
            fb = fx;
            if (side == -1) fa *= 0.5;
            side = -1;
        }
        if (std::abs(b - a) <= opts.x_tol) {
            const bool take_b = std::abs(fb) <= std::abs(fa);
            return {take_b ? b : a, take_b ? fb : fa, {std::min(a, b), std::max(a, b)}, it};
        }
    }
    const bool take_b = std::abs(fb) <= std::abs(fa);
    return {take_b ? b : a, take_b ? fb : fa, {std::min(a, b), std::max(a, b)}, opts.max_iter};
}

/// Bisection on a two-valued classifier. `lo` and `hi` must classify
/// differently; the returned bracket still does.
template <class Classify>
Bracket bisect_flip(Classify&& classify, double lo, double hi, double width, int max_iter = 200) {
    auto clo = classify(lo);
    const auto chi = classify(hi);
    if (clo == chi) throw NumericalError("bisect_flip: endpoints classify identically");
    for (int it = 0; it < max_iter && std::abs(hi - lo) > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // float-limited
        const auto cm = classify(mid);
        if (cm == clo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

/// Uniform sign scan; each returned bracket has a strict sign change.
inline std::vector<Bracket> sign_changes(const ScalarFn& f, double a, double b, std::size_t n) {
    std::vector<Bracket> out;
    double x0 = a;
    double f0 = f(a);
    for (std::size_t i = 1; i <= n; ++i) {
        const double x1 = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        const double f1 = f(x1);
        if (opposite_signs(f0, f1)) out.push_back({x0, x1});
        x0 = x1;
        f0 = f1;
    }
    return out;
}

}  // namespace fhn::roots
