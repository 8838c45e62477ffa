#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "fhn/errors.hpp"
#include "fhn/model.hpp"
#include "fhn/slow_reduced.hpp"

using namespace fhn;
using namespace fhn::reduced;

namespace {

double c_of(double x, double p) { return x * (x - 1.0) * (0.1 - x) + p; }

// R(h) from the raw quotient phi'^2 / (x - phi), integrated by tanh-sinh
// on each side of the removable point x = 0.
double R_oracle(double h) {
    const double a = std::sqrt(91.0) / 10.0;
    auto phi = [a](double x) { return a * x * x - x * x * x; };
    auto dphi = [a](double x) { return 2.0 * a * x - 3.0 * x * x; };
    auto g = [&](double x) {
        if (x == 0.0) return 0.0;
        return dphi(x) * dphi(x) / (x - phi(x));
    };
    const auto [xl, xm] = canard_roots(h);
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(g, xl, 0.0, 1e-13) + ts.integrate(g, 0.0, xm, 1e-13);
}

}  // namespace

TEST_CASE("slow flow rate vanishes at the equilibrium and matches implicit differentiation") {
    for (double p : {-0.1, 0.0, 0.3, 0.7}) {
        const double x = equilibrium_x1(p);
        CHECK(std::abs(slow_flow_rate(x, p, 1.0)) < 1e-14);
    }
    // along y = c(x1; p): dy/dT = (x1 - y) / s, dx1/dT = (dy/dT) / c'(x1)
    for (double x : {-0.3, 0.0, 0.2, 0.5, 0.9}) {
        const double p = 0.1, s = 0.8, h = 1e-6;
        const double dc = (c_of(x + h, p) - c_of(x - h, p)) / (2 * h);
        const double ref = (x - c_of(x, p)) / s / dc;
        CHECK(slow_flow_rate(x, p, s) == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("slow flow rate errors") {
    const auto fp = fold_points();
    CHECK_THROWS_AS(slow_flow_rate(fp.x_minus, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(slow_flow_rate(fp.x_plus, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(slow_flow_rate(0.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(slow_flow_rate(0.0, 0.0, -1.0), DomainError);
}

TEST_CASE("desingularized rate identity and time reversal") {
    for (double x = -0.5; x < 1.2; x += 0.07) {
        for (double p : {-0.2, 0.05, 0.4}) {
            for (double s : {0.3, 1.5}) {
                const double d = CubicNullcline::d1(x);
                if (std::abs(d) < 1e-6) continue;
                CHECK(desingularized_rate(x, p) ==
                      doctest::Approx(slow_flow_rate(x, p, s) * s * d).epsilon(1e-12));
            }
        }
        CHECK(desingularized_time_reversed(x) == (CubicNullcline::d1(x) < 0.0));
    }
}

TEST_CASE("desingularized flow has exactly one zero and never degenerates") {
    const auto [pm, pp] = slow_fold_params();
    std::vector<double> ps;
    for (double p = -0.5; p <= 1.0; p += 0.025) ps.push_back(p);
    ps.push_back(pm);
    ps.push_back(pp);
    for (double p : ps) {
        int zeros = 0;
        double prev = desingularized_rate(-3.0, p);
        for (int i = 1; i <= 6000; ++i) {
            const double x = -3.0 + 6.0 * i / 6000.0;
            const double g = desingularized_rate(x, p);
            if ((g > 0) != (prev > 0)) ++zeros;
            prev = g;
        }
        CHECK(zeros == 1);
        const double xs = equilibrium_x1(p), h = 1e-6;
        const double slope = (desingularized_rate(xs + h, p) - desingularized_rate(xs - h, p)) / (2 * h);
        CHECK(slope > 0.5);
    }
}

TEST_CASE("reduced Hopf values") {
    const auto [a, b] = reduced_hopf_values(0.01);
    CHECK(std::abs(a - 0.05632) < 1e-5);
    CHECK(std::abs(b - 0.55316) < 1e-5);
    const auto [a0, b0] = reduced_hopf_values(0.0);
    const auto [pm, pp] = slow_fold_params();
    CHECK(std::abs(a0 - pm) < 1e-4);
    CHECK(std::abs(b0 - pp) < 1e-4);
    for (double eps : {0.0, 0.001, 0.01, 0.05}) {
        const auto [l, r] = reduced_hopf_values(eps);
        CHECK(0.5 * (l + r) == doctest::Approx(2057.0 / 6750.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(reduced_hopf_values(1.0), DomainError);
}

TEST_CASE("reduced Jacobian has zero trace at the Hopf values") {
    // eps x1_T = f - y + p, y_T = x1 - y: trace = f'(x*) / eps - 1
    for (double eps : {0.001, 0.01, 0.05}) {
        const auto [l, r] = reduced_hopf_values(eps);
        for (double p : {l, r}) {
            const double x = equilibrium_x1(p);
            const double trace = CubicNullcline::d1(x) / eps - 1.0;
            CHECK(std::abs(trace) < 1e-10);
        }
    }
}

TEST_CASE("maximal canard") {
    CHECK(std::abs(maximal_canard_p(0.01) - 0.05731) < 2e-5);
    CHECK(maximal_canard_p(0.0) == doctest::Approx(slow_fold_params().first).epsilon(1e-15));
    for (double eps = 0.0005; eps <= 0.02; eps += 0.0005) {
        const auto info = canard_info(eps);
        CHECK(info.p_hopf_minus < info.p_maximal);
        CHECK(info.p_hopf_plus > info.p_maximal);
    }
}

TEST_CASE("canard roots and range") {
    const double r = std::sqrt(91.0);
    CHECK(canard_h_max() == doctest::Approx(canard_phi(r / 15.0)));
    CHECK(canard_phi(-r / 30.0) == doctest::Approx(canard_h_max()));  // both ends share the level
    for (double h : {1e-6, 0.01, 0.05, canard_h_max()}) {
        const auto [xl, xm] = canard_roots(h);
        CHECK(xl < 0.0);
        CHECK(xm > 0.0);
        CHECK(xl >= -r / 30.0 - 1e-12);
        CHECK(xm <= r / 15.0 + 1e-12);
        CHECK(std::abs(canard_phi(xl) - h) < 1e-14);
        CHECK(std::abs(canard_phi(xm) - h) < 1e-14);
    }
    CHECK_THROWS_AS(canard_roots(0.0), DomainError);
    CHECK_THROWS_AS(canard_roots(canard_h_max() * 1.01), DomainError);
    CHECK_THROWS_AS(canard_stability_R(-1.0), DomainError);
}

TEST_CASE("canard integrand equals the raw quotient") {
    const double a = std::sqrt(91.0) / 10.0;
    for (double x = -0.3; x <= 0.6; x += 0.0371) {
        if (std::abs(x) < 1e-3) continue;
        const double phi = a * x * x - x * x * x, dphi = 2 * a * x - 3 * x * x;
        CHECK(canard_integrand(x) == doctest::Approx(dphi * dphi / (x - phi)).epsilon(1e-10));
    }
}

TEST_CASE("canard stability function R") {
    const double hmax = canard_h_max();
    CHECK(std::abs(canard_stability_R(1e-10)) < 1e-8);
    std::vector<double> hs, rs;
    for (int i = 1; i <= 50; ++i) {
        hs.push_back(hmax * i / 50.0);
        rs.push_back(canard_stability_R(hs.back()));
        CHECK(rs.back() < 0.0);
    }
    for (std::size_t i = 1; i < rs.size(); ++i) CHECK(rs[i] < rs[i - 1]);
    // derivative by central differences at interior points
    for (int i = 1; i < 50; ++i) {
        const double h = hmax * i / 50.0, d = 1e-5;
        CHECK((canard_stability_R(h + d) - canard_stability_R(h - d)) / (2 * d) < 0.0);
    }
    CHECK(std::abs(canard_stability_R(hmax) - R_oracle(hmax)) < 1e-6);
    CHECK(std::abs(canard_stability_R(0.5 * hmax) - R_oracle(0.5 * hmax)) < 1e-6);
}

TEST_CASE("attractor summary on synthetic signals") {
    std::vector<double> t, x1, x2;
    for (int i = 0; i < 4000; ++i) {
        const double s = 0.01 * i;
        t.push_back(s);
        x1.push_back(std::sin(s));
        x2.push_back(std::pow(std::cos(s), 9));
    }
    const auto a = summarize_attractor(t, x1, x2, 0.3);
    CHECK(a.x1_amplitude == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(a.period == doctest::Approx(2 * std::numbers::pi).epsilon(1e-3));
    CHECK(a.x2_excursions == 2);
    std::vector<double> flat(t.size(), 0.01);
    const auto e = summarize_attractor(t, flat, flat, 0.3);
    CHECK(e.kind == OrbitKind::equilibrium);
    CHECK(e.period == 0.0);
}

TEST_CASE("reduced orbits at the three cited parameter sets") {
    const auto a = simulate_reduced(0.058, 1.37, 0.01, ReducedVariant::first_order);
    const auto b = simulate_reduced(0.06, 1.37, 0.01, ReducedVariant::first_order);
    const auto c = simulate_reduced(0.058, 0.2, 0.01, ReducedVariant::first_order);
    CHECK(a.summary.kind == OrbitKind::small);
    CHECK(a.summary.x2_excursions == 1);
    CHECK(b.summary.kind == OrbitKind::relaxation);
    CHECK(b.summary.x2_excursions == 2);
    CHECK(c.summary.x2_amplitude > a.summary.x2_amplitude);
    // the canard explosion separates the two: a much larger x1 range
    CHECK(b.summary.x1_amplitude > 3.0 * a.summary.x1_amplitude);
}

TEST_CASE("second-order form reproduces the first-order one") {
    for (auto [p, s] : {std::pair{0.058, 1.37}, std::pair{0.06, 1.37}, std::pair{0.058, 0.2}}) {
        const auto u = simulate_reduced(p, s, 0.01, ReducedVariant::first_order);
        const auto v = simulate_reduced(p, s, 0.01, ReducedVariant::second_order);
        CHECK(u.summary.kind == v.summary.kind);
        CHECK(std::abs(u.summary.x1_amplitude - v.summary.x1_amplitude) < 1e-3);
        CHECK(std::abs(u.summary.x2_amplitude - v.summary.x2_amplitude) < 1e-3);
    }
}

TEST_CASE("simulate_reduced errors") {
    CHECK_THROWS_AS(simulate_reduced(0.058, 0.0, 0.01, ReducedVariant::first_order), DomainError);
    CHECK_THROWS_AS(simulate_reduced(0.058, -1.0, 0.01, ReducedVariant::second_order), DomainError);
}

TEST_CASE("canard explosion factor") {
    // x1-amplitude must grow at least fivefold between the two parameters
    const double eps = 0.01;
    const double p_before = reduced_hopf_values(eps).first + 0.002;
    const double p_after = maximal_canard_p(eps) + 0.003;
    const auto a = simulate_reduced(p_before, 1.37, eps, ReducedVariant::first_order);
    const auto b = simulate_reduced(p_after, 1.37, eps, ReducedVariant::first_order);
    const double ratio = b.summary.x1_amplitude / a.summary.x1_amplitude;
    std::printf("explosion factor: p %.5f -> %.5f, amplitude %.5f -> %.5f, ratio %.3f\n", p_before, p_after,
                a.summary.x1_amplitude, b.summary.x1_amplitude, ratio);
    CHECK(ratio >= 5.0);
}
