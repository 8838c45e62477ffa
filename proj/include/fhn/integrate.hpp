#pragma once

// Adaptive Dormand-Prince 5(4) integration with the standard continuous
// extension (4th order, no extra stages), scalar events localized on the
// dense output, and escape detection.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fhn/errors.hpp"

namespace fhn::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Field = std::function<Vec<N>(double, const Vec<N>&)>;

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double max_time = 1e4;        // cap on |t - t0|, applied on top of the span
    double escape_radius = 10.0;  // sup-norm
    double event_tolerance = 1e-12;
    double initial_step = 0.0;    // 0: automatic
    std::size_t max_steps = 20'000'000;
    bool store_dense = true;      // keep per-step interpolants and samples
};

enum class Termination { time_out, event, escape, step_failure };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::time_out: return "time-out";
        case Termination::event: return "event";
        case Termination::escape: return "escape";
        case Termination::step_failure: return "step-failure";
    }
    return "unknown";
}

template <std::size_t N>
struct Event {
    std::function<double(double, const Vec<N>&)> g;
    bool terminal = true;
    int direction = 0;  // +1: only increasing crossings, -1: only decreasing
};

template <std::size_t N>
struct EventRecord {
    std::size_t id;
    double t;
    Vec<N> state;
};

template <std::size_t N>
struct DenseSegment {
    double t0;
    double h;
    std::array<Vec<N>, 5> r;

    Vec<N> operator()(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        Vec<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        return y;
    }
};

template <std::size_t N>
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec<N>> x;
    std::vector<DenseSegment<N>> dense;
    std::vector<EventRecord<N>> events;
    Termination reason = Termination::time_out;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;

    double t_final() const { return t.back(); }
    const Vec<N>& x_final() const { return x.back(); }

    /// Dense-output evaluation; requires store_dense.
    Vec<N> at(double tq) const {
        if (dense.empty()) throw NumericalError("Trajectory::at: no dense output stored");
        const bool fwd = dense.front().h > 0.0;
        auto key = [fwd](double v) { return fwd ? v : -v; };
        auto it = std::upper_bound(dense.begin(), dense.end(), key(tq),
                                   [&](double v, const DenseSegment<N>& seg) { return v < key(seg.t0); });
        if (it != dense.begin()) --it;
        return (*it)(tq);
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau and continuous-extension weights.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const Vec<N>& v) {
    for (double e : v)
        if (!std::isfinite(e)) return false;
    return true;
}

template <std::size_t N>
double sup_norm(const Vec<N>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
}

}  // namespace detail

/// Integrate `field` from (t0, x0) toward t1 (t1 < t0 integrates backward).
template <std::size_t N>
Trajectory<N> integrate(const Field<N>& field, const Vec<N>& x0, double t0, double t1,
                        const IntegratorOptions& opts, std::span<const Event<N>> events = {}) {
    using namespace detail;
    if (!(opts.rel_tol >= 1e-14) || !(opts.abs_tol > 0.0) || !(opts.max_step > 0.0) || !(opts.max_time > 0.0) ||
        !(opts.escape_radius > 0.0) || !(opts.event_tolerance > 0.0))
        throw DomainError("integrate: tolerances and limits must be positive (rel_tol >= 1e-14)");
    if (t1 == t0) throw DomainError("integrate: degenerate time span");
    if (!all_finite(x0)) throw DomainError("integrate: non-finite initial state");

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double t_end = t0 + dir * std::min(std::abs(t1 - t0), opts.max_time);

    Trajectory<N> traj;
    traj.t.push_back(t0);
    traj.x.push_back(x0);

    auto err_norm = [&](const Vec<N>& y0, const Vec<N>& y1, const Vec<N>& err) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            acc += (err[i] / sc) * (err[i] / sc);
        }
        return std::sqrt(acc / static_cast<double>(N));
    };

    double t = t0;
    Vec<N> y = x0;
    Vec<N> k1 = field(t, y);
    if (!all_finite(k1)) throw DomainError("integrate: non-finite field at initial state");

    double h = opts.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic (first half only).
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    }
    h = std::min({h, opts.max_step, std::abs(t_end - t0)});

    std::vector<double> g_prev(events.size());
    for (std::size_t j = 0; j < events.size(); ++j) g_prev[j] = events[j].g(t, y);

    const double h_min_rel = 16.0 * std::numeric_limits<double>::epsilon();
    double last_finite_norm = sup_norm(y);

    while (true) {
        if (traj.steps_accepted + traj.steps_rejected >= opts.max_steps) {
            traj.reason = Termination::step_failure;
            break;
        }
        const double remaining = std::abs(t_end - t);
        if (remaining <= h_min_rel * std::max(1.0, std::abs(t))) {
            traj.reason = Termination::time_out;
            break;
        }
        h = std::min(h, remaining);
        if (h <= h_min_rel * std::max(1.0, std::abs(t))) {
            traj.reason = last_finite_norm > opts.escape_radius ? Termination::escape : Termination::step_failure;
            break;
        }
        const double hs = dir * h;

        const Vec<N> k2 = field(t + c2 * hs, axpy<N>(y, hs, {{a21, &k1}}));
        const Vec<N> k3 = field(t + c3 * hs, axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = field(t + c4 * hs, axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = field(t + c5 * hs, axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 =
            field(t + hs, axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y1 = axpy<N>(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const Vec<N> k7 = field(t + hs, y1);

        Vec<N> err;
        for (std::size_t i = 0; i < N; ++i)
            err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double en = (all_finite(y1) && all_finite(k7)) ? err_norm(y, y1, err)
                                                             : std::numeric_limits<double>::infinity();

        if (!(en <= 1.0)) {
            ++traj.steps_rejected;
            const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.1;
            h *= fac;
            continue;
        }
        ++traj.steps_accepted;

        DenseSegment<N> seg;
        seg.t0 = t;
        seg.h = hs;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1[i] - y[i];
            const double bspl = hs * k1[i] - ydiff;
            seg.r[0][i] = y[i];
            seg.r[1][i] = ydiff;
            seg.r[2][i] = bspl;
            seg.r[3][i] = ydiff - hs * k7[i] - bspl;
            seg.r[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        const double t_new = t + hs;

        // earliest event crossing inside this step
        std::size_t hit = events.size();
        double t_hit = t_new;
        std::vector<double> g_new(events.size());
        for (std::size_t j = 0; j < events.size(); ++j) {
            g_new[j] = events[j].g(t_new, y1);
            const double ga = g_prev[j], gb = g_new[j];
            const bool crossed = (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
            if (!crossed) continue;
            if (events[j].direction > 0 && !(gb > ga)) continue;
            if (events[j].direction < 0 && !(gb < ga)) continue;
            // bisection-secant on the dense output in t
            double lo = t, hi = t_new, glo = ga;
            double tc = hi;
            for (int it = 0; it < 200 && std::abs(hi - lo) > opts.event_tolerance; ++it) {
                double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                const double gm = events[j].g(mid, seg(mid));
                if ((glo < 0.0 && gm >= 0.0) || (glo > 0.0 && gm <= 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            tc = hi;
            if (events[j].terminal) {
                if (dir * (tc - t_hit) < 0.0 || hit == events.size()) {
                    t_hit = tc;
                    hit = j;
                }
            } else {
                traj.events.push_back({j, tc, seg(tc)});
            }
        }

        if (hit < events.size()) {
            const Vec<N> yh = seg(t_hit);
            traj.events.push_back({hit, t_hit, yh});
            if (opts.store_dense) {
                DenseSegment<N> cut = seg;
                traj.dense.push_back(cut);
                traj.t.push_back(t_hit);
                traj.x.push_back(yh);
            } else {
                traj.t.back() = t_hit;
                traj.x.back() = yh;
            }
            traj.reason = Termination::event;
            break;
        }

        if (opts.store_dense) {
            traj.dense.push_back(seg);
            traj.t.push_back(t_new);
            traj.x.push_back(y1);
        } else {
            traj.t.back() = t_new;
            traj.x.back() = y1;
        }
        t = t_new;
        y = y1;
        k1 = k7;
        g_prev = std::move(g_new);
        last_finite_norm = sup_norm(y);

        if (last_finite_norm > opts.escape_radius) {
            traj.reason = Termination::escape;
            break;
        }

        const double fac = en > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
        h = std::min(h * fac, opts.max_step);
    }
    if (!opts.store_dense && traj.steps_accepted > 0) {
        // keep the start so callers can still read both ends
        traj.t.insert(traj.t.begin(), t0);
        traj.x.insert(traj.x.begin(), x0);
    }
    return traj;
}

template <std::size_t N>
Trajectory<N> integrate(const Field<N>& field, const Vec<N>& x0, double t0, double t1,
                        const IntegratorOptions& opts, const std::vector<Event<N>>& events) {
    return integrate<N>(field, x0, t0, t1, opts, std::span<const Event<N>>(events.data(), events.size()));
}

enum class EscapeSide { left, right, none };

inline const char* to_string(EscapeSide e) {
    switch (e) {
        case EscapeSide::left: return "left";
        case EscapeSide::right: return "right";
        case EscapeSide::none: return "none";
    }
    return "unknown";
}

inline constexpr double kEscapeThresholdX = 2.0;

/// Side on which x1 left the region of interest, read from the final state.
template <std::size_t N>
EscapeSide classify_escape(const Trajectory<N>& traj, double threshold_x = kEscapeThresholdX) {
    const double x1 = traj.x_final()[0];
    if (x1 <= -threshold_x) return EscapeSide::left;
    if (x1 >= threshold_x) return EscapeSide::right;
    return EscapeSide::none;
}

}  // namespace fhn::ode
