// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every tolerance, threshold and time budget below is fixed here.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhn/bifurcation.hpp"
#include "fhn/errors.hpp"
#include "fhn/fast_layer.hpp"
#include "fhn/homoclinic.hpp"
#include "fhn/integrate.hpp"
#include "fhn/model.hpp"
#include "fhn/slow_reduced.hpp"

using namespace fhn;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Outcome&)> body;
};

std::string fmt(double v, int prec = 8) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

double interp_pbar(const CurveBranch<layer::HetConnection>& arm, double s) {
    for (std::size_t i = 1; i < arm.points.size(); ++i) {
        const auto& a = arm.points[i - 1];
        const auto& b = arm.points[i];
        if ((a.s - s) * (b.s - s) <= 0.0 && a.s != b.s) return a.pbar + (b.pbar - a.pbar) * (s - a.s) / (b.s - a.s);
    }
    return NAN;
}

// Second quadrature for R(h): tanh-sinh on the raw quotient, split at 0.
double R_tanh_sinh(double h) {
    const double a = std::sqrt(91.0) / 10.0;
    auto g = [a](double x) {
        if (x == 0.0) return 0.0;
        const double phi = a * x * x - x * x * x, dphi = 2.0 * a * x - 3.0 * x * x;
        return dphi * dphi / (x - phi);
    };
    const auto [xl, xm] = reduced::canard_roots(h);
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(g, xl, 0.0, 1e-13) + ts.integrate(g, 0.0, xm, 1e-13);
}

// ---- criteria ---------------------------------------------------------------

void c1_folds(Outcome& o) {
    const auto fp = fold_points();
    const double em = std::abs(fp.x_minus - (11.0 - std::sqrt(91.0)) / 30.0);
    const double ep = std::abs(fp.x_plus - (11.0 + std::sqrt(91.0)) / 30.0);
    o.detail << "x- = " << fmt(fp.x_minus, 12) << ", x+ = " << fmt(fp.x_plus, 12);
    o.require(em < 1e-12 && ep < 1e-12, "closed form to 1e-12");
    o.require(std::abs(fp.x_minus - 0.0487) < 1e-4 && std::abs(fp.x_plus - 0.6846) < 1e-4,
              "printed 0.0487 / 0.6846 to 1e-4");
}

void c2_slow_bif(Outcome& o) {
    const auto [pm, pp] = slow_fold_params();
    o.detail << "p- = " << fmt(pm) << ", p+ = " << fmt(pp) << ", |p- + p+ - 2057/3375| = "
             << fmt(std::abs(pm + pp - 2057.0 / 3375.0), 3);
    o.require(std::abs(pm - 0.0511) < 5e-4 && std::abs(pp - 0.5584) < 5e-4, "0.0511 / 0.5584 to 5e-4");
    o.require(std::abs(pm + pp - 2057.0 / 3375.0) < 1e-12, "sum identity to 1e-12");
}

void c3_fast_bounds(Outcome& o) {
    const auto [pl, pr] = fast_pbar_bounds();
    o.detail << "pbar_l = " << fmt(pl) << ", pbar_r = " << fmt(pr);
    o.require(std::abs(pl + 0.1262) < 5e-4 && std::abs(pr - 0.0024) < 5e-4, "-0.1262 / 0.0024 to 5e-4");
}

void c4_double_het(Outcome& o) {
    const double pstar = layer::double_het_pbar();
    const double gap = layer::shoot_heteroclinic(pstar, 0.0);
    o.detail << "pbar* = " << fmt(pstar, 12) << ", gap(s=0) = " << fmt(gap, 3);
    o.require(std::abs(pstar + 0.0619259) < 1e-6, "-0.0619259 to 1e-6");
    o.require(std::abs(pstar + 209.0 / 3375.0) < 1e-12, "-209/3375 to 1e-12");
    o.require(std::abs(gap) < 1e-8, "gap below 1e-8");
}

void c5_v_curve(Outcome& o) {
    layer::ContinuationLimits lim;
    lim.s_max = 1.5;
    const auto arms = layer::het_v_curve(0.02, lim);
    const auto [pl, pr] = fast_pbar_bounds();
    const double pstar = layer::double_het_pbar();
    const auto& lr = arms[0];  // left-to-right, toward pbar_r
    const auto& rl = arms[1];  // right-to-left, toward pbar_l
    o.detail << "points " << lr.size() << " / " << rl.size();
    o.require(lr.size() >= 50 && rl.size() >= 50, ">= 50 points per arm");
    if (lr.empty() || rl.empty()) return;
    for (const auto* arm : {&lr, &rl}) {
        const auto& v = arm->points.front();
        o.require(std::hypot(v.pbar - pstar, v.s) < 1e-3, "vertex within 1e-3 of (pbar*, 0)");
    }
    const double a = interp_pbar(lr, 1.2), b = interp_pbar(rl, 1.2);
    o.detail << ", pbar(s=1.2) = " << fmt(a) << " / " << fmt(b) << " (pbar_r - " << fmt(pr - a, 3) << ", pbar_l + "
             << fmt(b - pl, 3) << ")";
    o.require(std::abs(a - pr) < 5e-3, "left-to-right arm within 5e-3 of pbar_r at s = 1.2");
    o.require(std::abs(b - pl) < 5e-3, "right-to-left arm within 5e-3 of pbar_l at s = 1.2");
}

void c6_reduced_hopf(Outcome& o) {
    const auto [a, b] = reduced::reduced_hopf_values(0.01);
    const auto [a0, b0] = reduced::reduced_hopf_values(0.0);
    const auto [pm, pp] = slow_fold_params();
    o.detail << "pH(0.01) = (" << fmt(a, 7) << ", " << fmt(b, 7) << "), pH(0) - p = (" << fmt(a0 - pm, 3) << ", "
             << fmt(b0 - pp, 3) << ")";
    o.require(std::abs(a - 0.05632) < 1e-5 && std::abs(b - 0.55316) < 1e-5, "(0.05632, 0.55316) to 1e-5");
    o.require(std::abs(a0 - pm) < 1e-4 && std::abs(b0 - pp) < 1e-4, "eps = 0 limit equals p-+ to 1e-4");
}

void c7_canard(Outcome& o) {
    const double pc = reduced::maximal_canard_p(0.01);
    const double ph = reduced::reduced_hopf_values(0.01).first;
    o.detail << "p(0.01) = " << fmt(pc, 7) << ", pH-(0.01) = " << fmt(ph, 7);
    o.require(std::abs(pc - 0.05731) < 2e-5, "0.05731 to 2e-5");
    o.require(ph < pc, "pH-(0.01) < p(0.01)");
}

void c8_canard_stability(Outcome& o) {
    const double hmax = reduced::canard_h_max();
    std::vector<double> R(51);
    double worst_diff = 0.0, max_R = -INFINITY, max_dR = -INFINITY;
    for (int k = 1; k <= 50; ++k) {
        const double h = hmax * k / 50.0;
        R[k] = reduced::canard_stability_R(h);
        max_R = std::max(max_R, R[k]);
        worst_diff = std::max(worst_diff, std::abs(R[k] - R_tanh_sinh(h)));
    }
    const double d = 1e-5;
    for (int k = 1; k <= 50; ++k) {
        const double h = hmax * k / 50.0;
        // central differences inside, one-sided at the right end of the domain
        const double dR = k < 50 ? (reduced::canard_stability_R(h + d) - reduced::canard_stability_R(h - d)) / (2 * d)
                                 : (R[k] - reduced::canard_stability_R(h - d)) / d;
        max_dR = std::max(max_dR, dR);
    }
    o.detail << "max R = " << fmt(max_R, 4) << ", max R' = " << fmt(max_dR, 4) << ", R(hmax) = " << fmt(R[50], 10)
             << ", quadrature diff = " << fmt(worst_diff, 3);
    o.require(max_R < 0.0, "R < 0 on the 50-point grid");
    o.require(max_dR < 0.0, "finite-difference R' < 0");
    o.require(worst_diff < 1e-6, "two quadratures agree to 1e-6");
}

void c9_reduced_orbits(Outcome& o) {
    using reduced::OrbitKind;
    const auto a = reduced::simulate_reduced(0.058, 1.37, 0.01, reduced::ReducedVariant::first_order).summary;
    const auto b = reduced::simulate_reduced(0.06, 1.37, 0.01, reduced::ReducedVariant::first_order).summary;
    const auto c = reduced::simulate_reduced(0.058, 0.2, 0.01, reduced::ReducedVariant::first_order).summary;
    const double ratio = b.x1_amplitude / a.x1_amplitude;
    o.detail << "(a) " << reduced::to_string(a.kind) << " x1-amp " << fmt(a.x1_amplitude, 5) << "; (b) "
             << reduced::to_string(b.kind) << " x1-amp " << fmt(b.x1_amplitude, 5) << ", ratio " << fmt(ratio, 4)
             << "; (c) x2-amp " << fmt(c.x2_amplitude, 5) << " vs " << fmt(a.x2_amplitude, 5);
    o.require(a.kind == OrbitKind::small, "(a) small orbit");
    o.require(b.kind == OrbitKind::relaxation, "(b) relaxation orbit");
    o.require(ratio >= 5.0, "(b) x1-amplitude >= 5x case (a)");
    o.require(c.x2_amplitude > a.x2_amplitude, "(c) x2-excursion at s = 0.2 larger than at s = 1.37");
}

void c10_hopf_curve(Outcome& o) {
    const auto curve = bif::hopf_curve(0.01, 200);
    double worst_res = 0.0, worst_re = 0.0;
    for (const auto& pt : curve.points) {
        const Mat3 j = full_jacobian({pt.x1_star, 0.0, pt.x1_star}, {pt.p, pt.s, pt.eps});
        worst_res = std::max(worst_res, std::abs(bif::characteristic_coefficients(j).hopf_residual()));
        Eigen::Matrix3d m;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m(r, c) = j[r][c];
        const Eigen::EigenSolver<Eigen::Matrix3d> es(m, false);
        double best = INFINITY;
        for (int i = 0; i < 3; ++i)
            if (std::abs(es.eigenvalues()(i).imag()) > 0.0) best = std::min(best, std::abs(es.eigenvalues()(i).real()));
        worst_re = std::max(worst_re, best);
    }
    const auto as = bif::hopf_asymptotes();
    o.detail << curve.size() << " points, max |c0 - c1 c2| = " << fmt(worst_res, 3) << ", max |Re| = "
             << fmt(worst_re, 3) << ", asymptotes " << fmt(as.p_minus, 7) << " / " << fmt(as.p_plus, 7);
    o.require(curve.size() == 200, "200 points");
    o.require(worst_res < 1e-10, "residual < 1e-10");
    o.require(worst_re < 1e-8, "complex pair with |Re| < 1e-8");
    o.require(std::abs(as.p_minus - 0.0510636) < 1e-5 && std::abs(as.p_plus - 0.558418) < 1e-5,
              "asymptotes 0.0510636 / 0.558418 to 1e-5");
}

void c11_gh(Outcome& o) {
    const auto gh = bif::gh_locate(0.01);
    const auto tr = bif::gh_track({1e-2, 1e-3, 1e-4});
    const auto& e = tr.extrapolated;
    o.detail << gh.size() << " l1 zeros at eps = 0.01; extrapolated GH1 (" << fmt(e[0][0], 6) << ", " << fmt(e[0][1], 6)
             << "), GH2 (" << fmt(e[1][0], 6) << ", " << fmt(e[1][1], 6) << ")";
    o.require(gh.size() == 2, "two l1 zero-crossings on the left half");
    o.require(std::abs(e[0][0] - 0.171) <= 0.02 && std::abs(e[0][1] - 0.0) <= 0.02, "GH1 -> (0.171, 0) within 0.02");
    o.require(std::abs(e[1][0] - 0.051) <= 0.02 && std::abs(e[1][1] - 3.927) <= 0.02,
              "GH2 -> (0.051, 3.927) within 0.02");
}

void c12_singular_endpoints(Outcome& o) {
    const auto d = homo::assemble_singular_diagram();
    const double pm = slow_fold_params().first;
    o.detail << "A = (" << fmt(d.A[0], 8) << ", " << d.A[1] << "), B = (" << fmt(d.B[0], 8) << ", " << d.B[1]
             << "), C = (" << fmt(d.C[0], 8) << ", " << fmt(d.C[1], 7) << "), " << d.AC.size() << " AC points";
    o.require(std::abs(d.A[0] + 0.246016) < 1e-4, "p* = -0.246016 to 1e-4");
    o.require(std::abs(d.C[1] - 1.50815) < 1e-3, "s* = 1.50815 to 1e-3");
    o.require(d.A[1] == 0.0 && d.B == std::array<double, 2>{pm, 0.0} && d.C[0] == pm, "A = (p*, 0), B = (p-, 0), C = (p-, s*)");
    o.require(d.AB.a == d.A && d.AB.b == d.B, "AB joins A and B");
    o.require(d.AC.size() >= 2 && d.AC.front() == d.A && d.AC.back() == d.C, "AC runs from A to C");
}

void c13_c_curve(Outcome& o) {
    const auto c = homo::locate_c_curve(0.05, 0.01, 0.1, 1.5);
    homo::SplitOptions perturbed;
    perturbed.offset = 2e-8;
    const auto d = homo::locate_c_curve(0.05, 0.01, 0.1, 1.5, perturbed);
    const double stab = std::max(std::abs(c.s1 - d.s1), std::abs(c.s2 - d.s2));
    o.detail << "s1 = " << fmt(c.s1, 12) << ", s2 = " << fmt(c.s2, 12) << ", bracket " << fmt(c.bracket_width, 3)
             << ", offset shift " << fmt(stab, 3);
    o.require(c.s1 >= 0.1 && c.s1 <= 0.9, "first flip in [0.1, 0.9]");
    o.require(c.s2 >= 0.9 && c.s2 <= 1.5, "second flip in [0.9, 1.5]");
    o.require(c.bracket_width <= 1e-12, "brackets <= 1e-12");
    o.require(stab <= 1e-9, "offset-perturbation stability <= 1e-9");
}

void c14_convergence(Outcome& o) {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.005 * i);
    const auto d = homo::assemble_singular_diagram();
    std::vector<double> dist;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto tr = homo::trace_c_curve(eps, grid);
        o.require(tr.branch.size() == grid.size(), "all 10 p-points traced at eps = " + fmt(eps, 2));
        dist.push_back(tr.branch.empty() ? INFINITY : homo::hausdorff_to_singular(tr.branch.points, d));
    }
    o.detail << "Hausdorff distance " << fmt(dist[0], 4) << " > " << fmt(dist[1], 4) << " > " << fmt(dist[2], 4);
    o.require(dist[1] < dist[0] && dist[2] < dist[1], "strictly decreasing in eps");
}

void c15_structure(Outcome& o) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-0.5, 1.2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const FullState z{u(rng), 0.3 * u(rng), u(rng)};
        const double p = 0.5 * u(rng);
        const ModelParams par{p, 0.1 + std::abs(u(rng)), 0.01};
        const auto [zs, ps] = symmetry_transform(z, p);
        const auto fz = full_field(z, par);
        const auto fs = full_field(zs, {ps, par.s, par.eps});
        worst = std::max({worst, std::abs(fz.x1 + fs.x1), std::abs(fz.x2 + fs.x2), std::abs(fz.y + fs.y)});
    }

    const double pbar = kDoubleHetPbar;
    const layer::HamiltonianData H{pbar};
    const ode::Field<2> f = [pbar](double, const ode::Vec<2>& x) {
        const auto r = fast_field({x[0], x[1]}, pbar, 0.0);
        return ode::Vec<2>{r.x1, r.x2};
    };
    const double xm = fast_equilibria_x1(pbar)[1];
    const ode::Vec<2> x0{xm + 0.15, 0.0};
    const auto tr = ode::integrate<2>(f, x0, 0.0, 500.0, {.rel_tol = 1e-12, .abs_tol = 1e-14, .max_step = 0.5});
    double drift = 0.0;
    for (const auto& x : tr.x) drift = std::max(drift, std::abs(H.H({x[0], x[1]}) - H.H({x0[0], x0[1]})));

    const auto [pm, pp] = slow_fold_params();
    int found = 0;
    for (int i = 1; i < 40; ++i)
        if (homo::singular_upper_point(pm + (pp - pm) * i / 40.0)) ++found;

    o.detail << "equivariance residual " << fmt(worst, 3) << ", H drift " << fmt(drift, 3) << ", connections in band "
             << found << "/39";
    o.require(worst < 1e-12, "equivariance residual < 1e-12");
    o.require(drift < 1e-8, "Hamiltonian drift < 1e-8 at s = 0");
    o.require(found == 0, "no singular homoclinic in (p-, p+)");
}

}  // namespace

int main() {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::vector<Criterion> criteria = {
        {1, "fold points", 1, c1_folds},
        {2, "slow-flow bifurcation values", 1, c2_slow_bif},
        {3, "layer equilibrium count boundaries", 1, c3_fast_bounds},
        {4, "double heteroclinic", 10, c4_double_het},
        {5, "heteroclinic V-curve", 120, c5_v_curve},
        {6, "reduced Hopf values", 1, c6_reduced_hopf},
        {7, "maximal canard", 1, c7_canard},
        {8, "canard stability", 30, c8_canard_stability},
        {9, "reduced orbit geometry", 60, c9_reduced_orbits},
        {10, "Hopf curve", 30, c10_hopf_curve},
        {11, "generalized Hopf", 600, c11_gh},
        {12, "singular C-curve endpoints", 120, c12_singular_endpoints},
        {13, "finite-eps C-curve", 120, c13_c_curve},
        {14, "convergence to the singular curve", 900, c14_convergence},
        {15, "structural properties", 60, c15_structure},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(dt < c.budget_s, "runtime under " + fmt(c.budget_s, 4) + " s");
        if (!o.pass) ++failed;
        std::printf("[%s] %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), dt,
                    o.detail.str().c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
