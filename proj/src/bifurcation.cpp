#include "fhn/bifurcation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fhn/errors.hpp"
#include "fhn/roots.hpp"

namespace fhn::bif {

namespace {

using C = CubicNullcline;
using cd = std::complex<double>;

// D(x) = 1 - 22 x + 30 x^2, so that d(x2')/d(x1) = D / 50 at q.
double hopf_D(double x) { return 1.0 - 22.0 * x + 30.0 * x * x; }

Criticality criticality_of(double l1, double omega) {
    if (!(omega > 1e-10) || !std::isfinite(l1) || l1 == 0.0) return Criticality::degenerate;
    return l1 < 0.0 ? Criticality::super : Criticality::sub;
}

}  // namespace

const char* to_string(Criticality c) {
    switch (c) {
        case Criticality::super: return "super";
        case Criticality::sub: return "sub";
        case Criticality::degenerate: return "degenerate";
    }
    return "unknown";
}

CharPoly characteristic_coefficients(const Mat3& j) {
    const double tr = j[0][0] + j[1][1] + j[2][2];
    const double minors = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) + (j[0][0] * j[2][2] - j[0][2] * j[2][0]) +
                          (j[1][1] * j[2][2] - j[1][2] * j[2][1]);
    const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                       j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                       j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    return {-det, minors, -tr, 1.0};
}

CharPoly characteristic_coefficients(const ModelParams& params) {
    const double x = equilibrium_x1(params.p);
    return characteristic_coefficients(full_jacobian({x, 0.0, x}, params));
}

double hopf_p_of_x(double x) { return x * x * x - 1.1 * x * x + 1.1 * x; }

std::pair<double, double> hopf_x_range(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("hopf_x_range: eps must lie in (0, 1)");
    const double disc = 484.0 - 120.0 * (1.0 + 10.0 * eps);
    if (!(disc > 0.0)) throw DomainError("hopf_x_range: empty interval, eps too large for a Hopf curve");
    const double r = std::sqrt(disc);
    return {(22.0 - r) / 60.0, (22.0 + r) / 60.0};
}

double lyapunov_l1(const HopfPoint& pt) {
    if (!(pt.omega > 1e-10)) throw NumericalError("lyapunov_l1: near-zero omega (degenerate Hopf point)");
    const double w = pt.omega;
    const double k = pt.eps / pt.s;
    const Mat3 j = full_jacobian({pt.x1_star, 0.0, pt.x1_star}, {hopf_p_of_x(pt.x1_star), pt.s, pt.eps});
    Eigen::Matrix3cd A;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) A(r, c) = j[r][c];
    const cd iw(0.0, w);

    // A q = i w q and A^T p = -i w p, both in closed form for this Jacobian.
    Eigen::Vector3cd q(1.0, iw, k / (k + iw));
    Eigen::Vector3cd p(-(pt.s / kDelta + iw), 1.0, 1.0 / (kDelta * (k - iw)));
    p /= std::conj(p.dot(q));  // Eigen's dot conjugates the left factor: <p, q> = 1

    // Only the x2-equation is nonlinear: -f(x1) / 5.
    const double b = -C::d2(pt.x1_star) / kDelta;
    const double c = -C::d3(pt.x1_star) / kDelta;
    auto B = [b](const Eigen::Vector3cd& u, const Eigen::Vector3cd& v) {
        return Eigen::Vector3cd(0.0, b * u(0) * v(0), 0.0);
    };
    const Eigen::Vector3cd qb = q.conjugate();
    const Eigen::Vector3cd C3(0.0, c * q(0) * q(0) * qb(0), 0.0);
    const Eigen::Vector3cd a_inv_b = A.partialPivLu().solve(B(q, qb));
    const Eigen::Matrix3cd shift = 2.0 * iw * Eigen::Matrix3cd::Identity() - A;
    const Eigen::Vector3cd s_inv_b = shift.partialPivLu().solve(B(q, q));
    const cd val = p.dot(C3) - 2.0 * p.dot(B(q, a_inv_b)) + p.dot(B(qb, s_inv_b));
    return val.real() / (2.0 * w);
}

HopfPoint hopf_point_at(double x, double eps) {
    const auto [lo, hi] = hopf_x_range(eps);
    if (!(x > lo && x < hi)) throw DomainError("hopf_point_at: x outside the Hopf interval");
    const double denom = hopf_D(x) + 10.0 * eps;
    const double s = std::sqrt(50.0 * eps * (eps - 1.0) / denom);
    HopfPoint pt{hopf_p_of_x(x), s, eps, x, 0.0, 0.0, Criticality::degenerate};
    const CharPoly cp = characteristic_coefficients(full_jacobian({x, 0.0, x}, {pt.p, s, eps}));
    pt.omega = cp.c1 > 0.0 ? std::sqrt(cp.c1) : 0.0;
    if (pt.omega > 1e-10) pt.l1 = lyapunov_l1(pt);
    pt.criticality = criticality_of(pt.l1, pt.omega);
    return pt;
}

CurveBranch<HopfPoint> hopf_curve(double eps, std::size_t n) {
    if (n == 0) throw DomainError("hopf_curve: n must be positive");
    const auto [lo, hi] = hopf_x_range(eps);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    CurveBranch<HopfPoint> out;
    out.label = "hopf eps=" + std::to_string(eps);
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double th = std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        out.points.push_back(hopf_point_at(mid - half * std::cos(th), eps));
    }
    return out;
}

HopfAsymptotes hopf_asymptotes() {
    const auto [pm, pp] = slow_fold_params();
    return {pm, pp, {pm, pp}};
}

std::optional<HopfPoint> left_hopf_point_at_speed(double s, double eps) {
    if (!(s > 0.0)) throw DomainError("left_hopf_point_at_speed: s must be > 0");
    hopf_x_range(eps);
    const double disc = 484.0 - 120.0 * (1.0 + 10.0 * eps + 50.0 * eps * (1.0 - eps) / (s * s));
    if (!(disc > 0.0)) return std::nullopt;
    return hopf_point_at((22.0 - std::sqrt(disc)) / 60.0, eps);
}

std::vector<HopfPoint> gh_locate(double eps, const GhScanOptions& opts) {
    hopf_x_range(eps);
    const double s_min = std::sqrt(50.0 * eps * (1.0 - eps) / (364.0 / 120.0 - 10.0 * eps));
    const double a = std::log(s_min * (1.0 + 1e-6));
    const double b = std::log(opts.s_max);
    if (!(b > a)) throw DomainError("gh_locate: s_max below the minimum Hopf speed");
    auto l1_at = [eps](double log_s) { return left_hopf_point_at_speed(std::exp(log_s), eps)->l1; };
    auto brackets = roots::sign_changes(l1_at, a, b, opts.n_scan);
    std::vector<HopfPoint> out;
    for (const auto& br : brackets) {
        const auto r = roots::illinois(l1_at, br.lo, br.hi, {.x_tol = opts.tol});
        out.push_back(*left_hopf_point_at_speed(std::exp(r.x), eps));
    }
    if (out.empty()) throw NumericalError("gh_locate: no sign change of l1 on the left half");
    return out;
}

double aitken_limit(double a0, double a1, double a2) {
    const double d1 = a1 - a0, d2 = a2 - a1;
    const double den = d2 - d1;
    // ratio d2/d1 must be in (-1, 1) for the sequence to look convergent
    if (den == 0.0 || d1 == 0.0 || std::abs(d2 / d1) >= 1.0) return a2;
    return a2 - d2 * d2 / den;
}

GhTrack gh_track(const std::vector<double>& eps_grid, const GhScanOptions& opts) {
    if (eps_grid.empty()) throw DomainError("gh_track: empty eps grid");
    GhTrack out;
    out.branches[0].label = "GH1";
    out.branches[1].label = "GH2";
    for (double eps : eps_grid) {
        std::vector<HopfPoint> pts;
        try {
            pts = gh_locate(eps, opts);
        } catch (const NumericalError& e) {
            for (auto& br : out.branches)
                if (br.termination.empty()) br.termination = "eps=" + std::to_string(eps) + ": " + e.what();
            continue;
        }
        if (pts.size() != 2) {
            for (auto& br : out.branches)
                if (br.termination.empty())
                    br.termination = "eps=" + std::to_string(eps) + ": found " + std::to_string(pts.size()) +
                                     " GH points, expected 2";
            continue;
        }
        // pts is sorted by s; keep that assignment unless it crosses the previous points
        if (!out.branches[0].empty() && !out.branches[1].empty()) {
            auto dist = [](const HopfPoint& u, const HopfPoint& v) { return std::hypot(u.p - v.p, u.s - v.s); };
            const auto& l0 = out.branches[0].points.back();
            const auto& l1 = out.branches[1].points.back();
            if (dist(pts[0], l1) + dist(pts[1], l0) < dist(pts[0], l0) + dist(pts[1], l1)) {
                for (auto& br : out.branches)
                    if (br.termination.empty())
                        br.termination = "branch jump at eps=" + std::to_string(eps);
                continue;
            }
        }
        out.branches[0].points.push_back(pts[0]);
        out.branches[1].points.push_back(pts[1]);
    }
    for (int b = 0; b < 2; ++b) {
        const auto& pts = out.branches[b].points;
        if (pts.empty()) {
            out.extrapolated[b] = {std::nan(""), std::nan("")};
        } else if (pts.size() < 3) {
            out.extrapolated[b] = {pts.back().p, pts.back().s};
        } else {
            const auto n = pts.size();
            out.extrapolated[b] = {aitken_limit(pts[n - 3].p, pts[n - 2].p, pts[n - 1].p),
                                   aitken_limit(pts[n - 3].s, pts[n - 2].s, pts[n - 1].s)};
        }
    }
    return out;
}

}  // namespace fhn::bif
