#include "fhn/homoclinic.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "fhn/errors.hpp"
#include "fhn/roots.hpp"
#include "fhn/slow_reduced.hpp"

namespace fhn::homo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using layer::HetDirection;

double safe_gap(double pbar, double s, HetDirection dir, const layer::ShootOptions& so) {
    try {
        return layer::shoot_heteroclinic(pbar, s, dir, so);
    } catch (const DomainError&) {
        return kNaN;
    } catch (const NumericalError&) {
        return kNaN;
    }
}

// Layer shift for y = x1*(p) + v. At p = p_- (v = 0) rounding can push it
// just past pbar_r, where the outer saddle is a fold; snap it back.
double layer_shift(double p, double v) {
    const double pbar = p - equilibrium_x1(p) - v;
    const double pr = fast_pbar_bounds().second;
    if (pbar > pr && pbar - pr < 1e-12) return pr;
    return pbar;
}

// First speed in [0, s_max] at which the gap changes sign, solved to gap_tol.
std::optional<layer::HetConnection> connection_speed(double pbar, HetDirection dir, const SingularScanOptions& o) {
    // g0 is NaN at the fold end pbar = pbar_r, where s = 0 leaves no saddle
    const double g0 = safe_gap(pbar, 0.0, dir, o.solve.shoot);
    if (std::abs(g0) < o.solve.gap_tol) {
        try {
            return layer::find_het_speed(pbar, 0.0, o.s_step, dir, o.solve);
        } catch (const NumericalError&) {
            // s = 0 itself is the connection (the bracket has no sign change)
            const auto eq = fast_equilibria_x1(pbar);
            const bool lr = dir == HetDirection::left_to_right;
            return layer::HetConnection{pbar, 0.0, dir, g0, fast_equilibrium_info(lr ? eq.front() : eq.back(), 0.0),
                                        fast_equilibrium_info(lr ? eq.back() : eq.front(), 0.0)};
        }
    }
    double s_prev = 0.0, g_prev = g0;
    const int n = static_cast<int>(std::ceil(o.s_max / o.s_step));
    for (int i = 1; i <= n; ++i) {
        const double s = std::min(o.s_max, i * o.s_step);
        const double g = safe_gap(pbar, s, dir, o.solve.shoot);
        if (std::isnan(g)) continue;
        if (!std::isnan(g_prev) && roots::opposite_signs(g_prev, g)) {
            try {
                return layer::find_het_speed(pbar, s_prev, s, dir, o.solve);
            } catch (const NumericalError&) {
                // sign change across a sentinel jump rather than a zero; keep scanning
            }
        }
        s_prev = s;
        g_prev = g;
    }
    return std::nullopt;
}

std::optional<layer::HetConnection> upper_connection(double p, const SingularScanOptions& opts) {
    const double x = equilibrium_x1(p);
    // q has to sit on C_l (at most on the fold itself)
    if (x > fold_points().x_minus + 1e-12) return std::nullopt;
    const double pbar = layer_shift(p, 0.0);
    const auto [pl, pr] = fast_pbar_bounds();
    if (!(pbar > pl && pbar <= pr)) return std::nullopt;
    return connection_speed(pbar, HetDirection::left_to_right, opts);
}

SingularPoint to_point(double p, const layer::HetConnection& c) { return {p, c.s, c.pbar, c.section_gap}; }

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

}  // namespace

const char* to_string(HomoclinicKind k) {
    switch (k) {
        case HomoclinicKind::slow_wave: return "slow-wave";
        case HomoclinicKind::fast_wave: return "fast-wave";
        case HomoclinicKind::double_het: return "double-het";
    }
    return "unknown";
}

std::optional<SingularPoint> singular_upper_point(double p, const SingularScanOptions& opts) {
    const auto c = upper_connection(p, opts);
    if (!c) return std::nullopt;
    return to_point(p, *c);
}

CurveBranch<SingularPoint> singular_upper_curve(double p_lo, double p_hi, std::size_t n,
                                                const SingularScanOptions& opts) {
    CurveBranch<SingularPoint> out;
    out.label = "left-to-right y=x1*";
    std::size_t missing = 0;
    for (double p : linspace(p_lo, p_hi, n)) {
        if (auto pt = singular_upper_point(p, opts)) {
            out.points.push_back(*pt);
        } else {
            ++missing;
        }
    }
    if (missing) out.termination = std::to_string(missing) + " of " + std::to_string(n) + " p-values without connection";
    return out;
}

std::optional<SingularPoint> singular_return_point(double p, double v, const SingularScanOptions& opts) {
    if (!(v > 0.0)) throw DomainError("singular_return_point: v must be > 0");
    const double pbar = layer_shift(p, v);
    const auto [pl, pr] = fast_pbar_bounds();
    if (!(pbar > pl && pbar < pr)) return std::nullopt;
    const auto c = connection_speed(pbar, HetDirection::right_to_left, opts);
    if (!c) return std::nullopt;
    return to_point(p, *c);
}

CurveBranch<SingularPoint> singular_return_curve(double v, double p_lo, double p_hi, std::size_t n,
                                                 const SingularScanOptions& opts) {
    CurveBranch<SingularPoint> out;
    out.label = "right-to-left y=x1*+" + std::to_string(v);
    std::size_t missing = 0;
    for (double p : linspace(p_lo, p_hi, n)) {
        if (auto pt = singular_return_point(p, v, opts)) {
            out.points.push_back(*pt);
        } else {
            ++missing;
        }
    }
    if (missing) out.termination = std::to_string(missing) + " of " + std::to_string(n) + " p-values without connection";
    return out;
}

namespace {

layer::HetConnection return_connection(double s, const layer::HetSolveOptions& opts) {
    const double pl = fast_pbar_bounds().first;
    const double pstar = layer::double_het_pbar();
    auto g = [&](double pbar) { return safe_gap(pbar, s, HetDirection::right_to_left, opts.shoot); };
    const double lo = pl + 1e-9 * (pstar - pl);
    for (const auto& br : roots::sign_changes(g, lo, pstar, 64)) {
        try {
            return layer::find_het_pbar(s, br.lo, br.hi, HetDirection::right_to_left, opts);
        } catch (const NumericalError&) {
        }
    }
    throw NumericalError("return_height_at: no right-to-left connection at s=" + std::to_string(s));
}

}  // namespace

double return_height_at(double p, double s, const layer::HetSolveOptions& opts) {
    const auto c = return_connection(s, opts);
    return p - equilibrium_x1(p) - c.pbar;
}

SingularHomoclinic singular_homoclinic_at(double p, const SingularScanOptions& opts) {
    const auto up = upper_connection(p, opts);
    if (!up) throw NumericalError("singular_homoclinic_at: no left-to-right connection at p=" + std::to_string(p));
    SingularHomoclinic h{p, up->s, *up, std::nullopt, 0.0, HomoclinicKind::fast_wave};
    if (up->s == 0.0) {
        h.kind = HomoclinicKind::double_het;
        return h;
    }
    const auto down = return_connection(up->s, opts.solve);
    h.down_connection = down;
    h.v = p - equilibrium_x1(p) - down.pbar;
    return h;
}

std::array<double, 2> double_het_point() {
    const double target = layer::double_het_pbar();
    const double pm = slow_fold_params().first;
    auto g = [target](double p) { return p - equilibrium_x1(p) - target; };
    const auto r = roots::illinois(g, -1.0, pm, {.x_tol = 1e-15});
    return {r.x, 0.0};
}

std::array<double, 2> upper_curve_endpoint(const layer::HetSolveOptions& opts) {
    const double pm = slow_fold_params().first;
    SingularScanOptions so;
    so.solve = opts;
    const auto c = connection_speed(fast_pbar_bounds().second, HetDirection::left_to_right, so);
    if (!c) throw NumericalError("upper_curve_endpoint: no connection at p = p_-");
    return {pm, c->s};
}

ode::EscapeSide unstable_manifold_side(double p, double s, double eps, const SplitOptions& opts) {
    if (!(s > 0.0)) throw DomainError("unstable_manifold_side: wave-speed division (s must be > 0)");
    if (!(eps > 0.0)) throw DomainError("unstable_manifold_side: eps must be > 0");
    const ModelParams mp{p, s, eps};
    const double x = equilibrium_x1(p);
    const Mat3 j = full_jacobian({x, 0.0, x}, mp);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j[r][c];
    Eigen::EigenSolver<Eigen::Matrix3d> es(m);
    int unstable = -1, n_unstable = 0;
    for (int i = 0; i < 3; ++i) {
        if (es.eigenvalues()(i).real() > 0.0) {
            ++n_unstable;
            unstable = i;
        }
    }
    if (n_unstable != 1 || es.eigenvalues()(unstable).imag() != 0.0)
        throw DomainError("unstable_manifold_side: eigenvalue degeneracy, q does not have a 1-D unstable manifold");
    Eigen::Vector3d v = es.eigenvectors().col(unstable).real();
    v.normalize();
    if (v(0) < 0.0) v = -v;

    const ode::Field<3> field = [mp](double, const ode::Vec<3>& z) {
        const FullState r = full_field({z[0], z[1], z[2]}, mp);
        return ode::Vec<3>{r.x1, r.x2, r.y};
    };
    ode::IntegratorOptions io = opts.integ;
    io.max_time = std::min(opts.max_time_cap, 20.0 / eps);
    io.store_dense = false;
    io.escape_radius = std::max(io.escape_radius, 50.0);
    const double th = ode::kEscapeThresholdX;
    const std::vector<ode::Event<3>> events{
        {[th](double, const ode::Vec<3>& z) { return z[0] - th; }, true, +1},
        {[th](double, const ode::Vec<3>& z) { return z[0] + th; }, true, -1},
    };
    const ode::Vec<3> z0{x + opts.offset * v(0), opts.offset * v(1), x + opts.offset * v(2)};
    const auto tr = ode::integrate<3>(field, z0, 0.0, io.max_time, io, events);
    return ode::classify_escape(tr, th);
}

std::vector<Flip> splitting_flips(double p, double eps, double s_lo, double s_hi, const SplitOptions& opts) {
    if (!(s_lo > 0.0 && s_hi > s_lo)) throw DomainError("splitting_flips: need 0 < s_lo < s_hi");
    if (!(opts.scan_step > 0.0)) throw DomainError("splitting_flips: scan_step must be > 0");
    const auto n = static_cast<std::size_t>(std::ceil((s_hi - s_lo) / opts.scan_step));
    std::vector<double> grid(n + 1);
    for (std::size_t i = 0; i <= n; ++i) grid[i] = i == n ? s_hi : s_lo + static_cast<double>(i) * opts.scan_step;
    auto side = [&](double s) { return unstable_manifold_side(p, s, eps, opts); };
    std::vector<ode::EscapeSide> cls(grid.size());
    if (opts.reverse_scan) {
        for (std::size_t i = grid.size(); i-- > 0;) cls[i] = side(grid[i]);
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) cls[i] = side(grid[i]);
    }

    std::vector<Flip> flips;
    std::size_t last = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cls[i] == ode::EscapeSide::none) continue;
        if (last != grid.size() && cls[i] != cls[last]) {
            const auto br = roots::bisect_flip(side, grid[last], grid[i], opts.bracket_width);
            flips.push_back({br.lo, br.hi, side(br.lo), side(br.hi)});
        }
        last = i;
    }
    std::vector<Flip> merged;
    for (const auto& f : flips) {
        if (!merged.empty() && f.lo - merged.back().hi < opts.merge_width) {
            merged.back().hi = f.hi;
            merged.back().above = f.above;
        } else {
            merged.push_back(f);
        }
    }
    return merged;
}

CCurvePoint locate_c_curve(double p, double eps, double s_lo, double s_hi, const SplitOptions& opts) {
    const auto flips = splitting_flips(p, eps, s_lo, s_hi, opts);
    if (flips.size() < 2)
        throw NumericalError("locate_c_curve: found " + std::to_string(flips.size()) + " flip(s) in [" +
                             std::to_string(s_lo) + ", " + std::to_string(s_hi) + "], need 2");
    const auto& a = flips.front();
    const auto& b = flips.back();
    return {p, 0.5 * (a.lo + a.hi), 0.5 * (b.lo + b.hi), eps, std::max(a.hi - a.lo, b.hi - b.lo), flips.size()};
}

CCurveTrace trace_c_curve(double eps, const std::vector<double>& p_grid, const TraceOptions& opts) {
    CCurveTrace out;
    out.branch.label = "C-curve eps=" + std::to_string(eps);
    std::vector<std::optional<CCurvePoint>> results(p_grid.size());
    std::vector<std::string> errors(p_grid.size());

    auto full = [&](std::size_t i) {
        try {
            results[i] = locate_c_curve(p_grid[i], eps, opts.s_lo, opts.s_hi, opts.split);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };

    if (opts.parallel) {
        const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
        for (std::size_t start = 0; start < p_grid.size(); start += width) {
            std::vector<std::future<void>> jobs;
            for (std::size_t i = start; i < std::min(p_grid.size(), start + width); ++i)
                jobs.push_back(std::async(std::launch::async, full, i));
            for (auto& j : jobs) j.get();
        }
    } else {
        std::optional<CCurvePoint> prev;
        for (std::size_t i = 0; i < p_grid.size(); ++i) {
            if (prev) {
                const double w = opts.warm_window;
                const double a_lo = std::max(opts.s_lo, prev->s1 - w), a_hi = prev->s1 + w;
                const double b_lo = prev->s2 - w, b_hi = std::min(opts.s_hi, prev->s2 + w);
                if (a_hi < b_lo && a_lo < a_hi && b_lo < b_hi) {
                    try {
                        const auto fa = splitting_flips(p_grid[i], eps, a_lo, a_hi, opts.split);
                        const auto fb = splitting_flips(p_grid[i], eps, b_lo, b_hi, opts.split);
                        if (fa.size() == 1 && fb.size() == 1) {
                            results[i] = CCurvePoint{p_grid[i], 0.5 * (fa[0].lo + fa[0].hi), 0.5 * (fb[0].lo + fb[0].hi),
                                                     eps, std::max(fa[0].hi - fa[0].lo, fb[0].hi - fb[0].lo), 2};
                        }
                    } catch (const std::exception&) {
                    }
                }
            }
            if (!results[i]) full(i);
            if (results[i]) prev = results[i];
        }
    }
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        if (results[i]) {
            out.branch.points.push_back(*results[i]);
        } else {
            out.failures.emplace_back(p_grid[i], errors[i]);
        }
    }
    if (!out.failures.empty())
        out.branch.termination = std::to_string(out.failures.size()) + " grid point(s) failed";
    return out;
}

SingularDiagram assemble_singular_diagram(std::size_t n_ac, const SingularScanOptions& opts) {
    SingularDiagram d{};
    const auto [pm, pp] = slow_fold_params();
    const auto fp = fold_points();
    d.A = double_het_point();
    d.B = {pm, 0.0};
    d.C = upper_curve_endpoint(opts.solve);
    d.AB = {d.A, d.B};
    d.AC.push_back(d.A);
    if (n_ac > 2) {
        const auto curve = singular_upper_curve(d.A[0], pm, n_ac, opts);
        for (const auto& pt : curve.points)
            if (pt.p > d.A[0] + 1e-9 && pt.p < pm - 1e-9) d.AC.push_back({pt.p, pt.s});
    }
    d.AC.push_back(d.C);
    d.hopf_p_minus = pm;
    d.hopf_p_plus = pp;
    d.hopf_horizontal = {{pm, 0.0}, {pp, 0.0}};
    d.canard_p = reduced::maximal_canard_p(0.0);
    d.fold_x_minus = fp.x_minus;
    d.fold_x_plus = fp.x_plus;
    d.fold_p_minus = pm;
    d.fold_p_plus = pp;
    return d;
}

namespace {

double point_segment(const std::array<double, 2>& x, const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = b[0] - a[0], dy = b[1] - a[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((x[0] - a[0]) * dx + (x[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(x[0] - a[0] - t * dx, x[1] - a[1] - t * dy);
}

}  // namespace

double distance_to_singular(const std::array<double, 2>& pt, const SingularDiagram& d) {
    double best = point_segment(pt, d.AB.a, d.AB.b);
    for (std::size_t i = 1; i < d.AC.size(); ++i) best = std::min(best, point_segment(pt, d.AC[i - 1], d.AC[i]));
    return best;
}

namespace {

using Pt = std::array<double, 2>;

double point_polyline(const Pt& x, const std::vector<Pt>& line) {
    if (line.size() == 1) return std::hypot(x[0] - line[0][0], x[1] - line[0][1]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < line.size(); ++i) best = std::min(best, point_segment(x, line[i - 1], line[i]));
    return best;
}

// Points of the polyline with p in [lo, hi], cut at the window edges.
std::vector<Pt> clip_polyline(const std::vector<Pt>& line, double lo, double hi) {
    std::vector<Pt> out;
    auto lerp = [](const Pt& a, const Pt& b, double p) {
        const double t = (p - a[0]) / (b[0] - a[0]);
        return Pt{p, a[1] + t * (b[1] - a[1])};
    };
    for (std::size_t i = 0; i < line.size(); ++i) {
        const Pt& c = line[i];
        if (i > 0) {
            const Pt& a = line[i - 1];
            for (double edge : {lo, hi})
                if ((a[0] - edge) * (c[0] - edge) < 0.0) out.push_back(lerp(a, c, edge));
        }
        if (c[0] >= lo && c[0] <= hi) out.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Pt> densify(const std::vector<Pt>& line, std::size_t per_segment) {
    std::vector<Pt> out;
    if (line.size() == 1) return line;
    for (std::size_t i = 1; i < line.size(); ++i)
        for (std::size_t k = 0; k < per_segment; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(per_segment);
            out.push_back({line[i - 1][0] + t * (line[i][0] - line[i - 1][0]),
                           line[i - 1][1] + t * (line[i][1] - line[i - 1][1])});
        }
    out.push_back(line.back());
    return out;
}

}  // namespace

double hausdorff_to_singular(const std::vector<CCurvePoint>& curve, const SingularDiagram& d) {
    if (curve.empty()) throw DomainError("hausdorff_to_singular: empty curve");
    std::vector<Pt> lower, upper;
    for (const auto& c : curve) {
        lower.push_back({c.p, c.s1});
        upper.push_back({c.p, c.s2});
    }
    std::sort(lower.begin(), lower.end());
    std::sort(upper.begin(), upper.end());
    const double lo = lower.front()[0], hi = lower.back()[0];

    const std::vector<Pt> ab = clip_polyline({d.AB.a, d.AB.b}, lo, hi);
    const std::vector<Pt> ac = clip_polyline(d.AC, lo, hi);
    if (ab.empty() && ac.empty()) throw DomainError("hausdorff_to_singular: curve lies outside [p*, p_-]");

    auto to_singular = [&](const Pt& x) {
        double best = std::numeric_limits<double>::infinity();
        if (!ab.empty()) best = std::min(best, point_polyline(x, ab));
        if (!ac.empty()) best = std::min(best, point_polyline(x, ac));
        return best;
    };
    auto to_curve = [&](const Pt& x) { return std::min(point_polyline(x, lower), point_polyline(x, upper)); };

    constexpr std::size_t kDense = 16;
    double h = 0.0;
    for (const auto& line : {lower, upper})
        for (const auto& x : densify(line, kDense)) h = std::max(h, to_singular(x));
    for (const auto& line : {ab, ac})
        if (!line.empty())
            for (const auto& x : densify(line, kDense)) h = std::max(h, to_curve(x));
    return h;
}

}  // namespace fhn::homo
