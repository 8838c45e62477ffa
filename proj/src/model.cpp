#include "fhn/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fhn/errors.hpp"
#include "fhn/roots.hpp"

namespace fhn {

namespace {

using Cubic = CubicNullcline;

void require_finite(const FullState& z, const ModelParams& params) {
    if (!std::isfinite(z.x1) || !std::isfinite(z.x2) || !std::isfinite(z.y) || !std::isfinite(params.p) ||
        !std::isfinite(params.s) || !std::isfinite(params.eps))
        throw DomainError("full_field: non-finite input");
}

// Offset from x_c large enough that c0 is well away from its extreme value
// at |x| this large for any pbar we meet.
double outer_bound(double pbar) { return 2.0 + std::cbrt(std::abs(pbar)); }

}  // namespace

double EquilibriumInfo::x1() const {
    return std::visit([](const auto& z) { return z.x1; }, state);
}

const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::source: return "source";
        case EquilibriumKind::sink: return "sink";
        case EquilibriumKind::saddle_focus: return "saddle-focus";
        case EquilibriumKind::center: return "center";
        case EquilibriumKind::fold_degenerate: return "fold-degenerate";
    }
    return "unknown";
}

const char* to_string(ManifoldBranch b) {
    switch (b) {
        case ManifoldBranch::left: return "C_l";
        case ManifoldBranch::middle: return "C_m";
        case ManifoldBranch::right: return "C_r";
    }
    return "unknown";
}

FullState full_field(const FullState& z, const ModelParams& params, TimeScale ts) {
    require_finite(z, params);
    if (params.s == 0.0) throw DomainError("full_field: wave-speed division (s = 0)");
    FullState r;
    r.x1 = z.x2;
    r.x2 = (params.s * z.x2 - Cubic::c0(z.x1) + z.y - params.p) / kDelta;
    r.y = params.eps / params.s * (z.x1 - kGamma * z.y);
    if (ts == TimeScale::slow) {
        if (!(params.eps > 0.0)) throw DomainError("full_field: slow time scale needs eps > 0");
        r.x1 /= params.eps;
        r.x2 /= params.eps;
        r.y /= params.eps;
    }
    return r;
}

Mat3 full_jacobian(const FullState& z, const ModelParams& params) {
    if (params.s == 0.0) throw DomainError("full_jacobian: wave-speed division (s = 0)");
    const double k = params.eps / params.s;
    Mat3 m{};
    m[0] = {0.0, 1.0, 0.0};
    m[1] = {-Cubic::d1(z.x1) / kDelta, params.s / kDelta, 1.0 / kDelta};
    m[2] = {k, 0.0, -k * kGamma};
    return m;
}

FastState fast_field(const FastState& z, double pbar, double s) {
    return {z.x2, (s * z.x2 - Cubic::c0(z.x1) - pbar) / kDelta};
}

Mat2 fast_jacobian(double x1, double s) {
    Mat2 m{};
    m[0] = {0.0, 1.0};
    m[1] = {-Cubic::d1(x1) / kDelta, s / kDelta};
    return m;
}

double fast_divergence(double s) { return s / kDelta; }

FoldPoints fold_points() {
    const double r = std::sqrt(91.0);
    return {(11.0 - r) / 30.0, (11.0 + r) / 30.0};
}

std::pair<double, double> slow_fold_params() {
    const auto [xm, xp] = fold_points();
    return {xm - Cubic::c0(xm), xp - Cubic::c0(xp)};
}

std::pair<double, double> fast_pbar_bounds() {
    const auto [xm, xp] = fold_points();
    return {-Cubic::c0(xp), -Cubic::c0(xm)};
}

double equilibrium_x1(double p) {
    if (!std::isfinite(p)) throw DomainError("equilibrium_x1: non-finite p");
    // x - c0(x) - p = x^3 - 1.1 x^2 + 1.1 x - p is strictly increasing.
    auto g = [p](double x) { return x - Cubic::c0(x) - p; };
    auto dg = [](double x) { return 1.0 - Cubic::d1(x); };
    double lo = -1.0, hi = 1.0;
    while (g(lo) > 0.0) lo *= 2.0;
    while (g(hi) < 0.0) hi *= 2.0;
    return roots::newton_bisect(g, dg, lo, hi, {.x_tol = 0.0, .f_tol = 0.0, .max_iter = 400}).x;
}

ManifoldBranch branch_of(double x1) {
    const auto [xm, xp] = fold_points();
    if (x1 < xm) return ManifoldBranch::left;
    if (x1 > xp) return ManifoldBranch::right;
    return ManifoldBranch::middle;
}

std::vector<std::complex<double>> eigenvalues(const Mat3& m) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a(i, j) = m[i][j];
    Eigen::EigenSolver<Eigen::Matrix3d> es(a, false);
    std::vector<std::complex<double>> ev(3);
    for (int i = 0; i < 3; ++i) ev[i] = es.eigenvalues()(i);
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

std::vector<std::complex<double>> eigenvalues(const Mat2& m) {
    const double tr = m[0][0] + m[1][1];
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        // avoid cancellation in the smaller root
        const double big = 0.5 * tr + std::copysign(r, tr == 0.0 ? 1.0 : tr);
        const double small = big != 0.0 ? det / big : 0.5 * tr - r;
        return {std::min(big, small), std::max(big, small)};
    }
    const double im = std::sqrt(-disc);
    return {{0.5 * tr, -im}, {0.5 * tr, im}};
}

EquilibriumKind classify(const std::vector<std::complex<double>>& ev, double scale) {
    const double tol = 1e-12 * std::max(1.0, scale);
    int pos = 0, neg = 0;
    bool complex_pair = false;
    for (const auto& l : ev) {
        if (std::abs(l) <= tol) return EquilibriumKind::fold_degenerate;
        if (std::abs(l.imag()) > tol) complex_pair = true;
        if (std::abs(l.real()) <= tol) return EquilibriumKind::center;
        (l.real() > 0.0 ? pos : neg)++;
    }
    if (neg == 0) return EquilibriumKind::source;
    if (pos == 0) return EquilibriumKind::sink;
    return complex_pair ? EquilibriumKind::saddle_focus : EquilibriumKind::saddle;
}

EquilibriumInfo full_equilibrium(const ModelParams& params) {
    const double x = equilibrium_x1(params.p);
    const FullState q{x, 0.0, x};
    EquilibriumInfo info;
    info.state = q;
    info.eigenvalues = eigenvalues(full_jacobian(q, params));
    info.kind = classify(info.eigenvalues);
    info.branch = branch_of(x);
    return info;
}

std::vector<double> fast_equilibria_x1(double pbar) {
    if (!std::isfinite(pbar)) throw DomainError("fast_equilibria_x1: non-finite pbar");
    const auto [xm, xp] = fold_points();
    auto g = [pbar](double x) { return Cubic::c0(x) + pbar; };
    auto dg = [](double x) { return Cubic::d1(x); };
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(pbar));
    const double gm = g(xm);  // local minimum of g
    const double gp = g(xp);  // local maximum of g
    const double left = xm - outer_bound(pbar);
    const double right = xp + outer_bound(pbar);
    const roots::RootOptions opts{.x_tol = 0.0, .f_tol = 0.0, .max_iter = 400};

    std::vector<double> out;
    // g decreases on (-inf, xm], increases on [xm, xp], decreases on [xp, inf)
    if (std::abs(gm) <= tol) {
        out.push_back(xm);
    } else if (gm < 0.0) {
        out.push_back(roots::newton_bisect(g, dg, left, xm, opts).x);
        if (gp > tol) out.push_back(roots::newton_bisect(g, dg, xm, xp, opts).x);
    }
    if (std::abs(gp) <= tol) {
        out.push_back(xp);
    } else if (gp > 0.0) {
        out.push_back(roots::newton_bisect(g, dg, xp, right, opts).x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

EquilibriumInfo fast_equilibrium_info(double x1, double s) {
    EquilibriumInfo info;
    info.state = FastState{x1, 0.0};
    info.eigenvalues = eigenvalues(fast_jacobian(x1, s));
    // at a fold the eigenvalues are only accurate to sqrt(machine eps)
    info.kind = std::abs(Cubic::d1(x1)) <= 1e-12 ? EquilibriumKind::fold_degenerate : classify(info.eigenvalues);
    info.branch = branch_of(x1);
    return info;
}

std::pair<FullState, double> symmetry_transform(const FullState& z, double p) {
    return {FullState{kSymmetryX - z.x1, -z.x2, kSymmetryX - z.y}, kSymmetryP - p};
}

}  // namespace fhn
