#pragma once

// Hopf bifurcations of the full system along the equilibrium q = (x, 0, x).
// The Jacobian at q gives the monic characteristic polynomial
//   lambda^3 + c2 lambda^2 + c1 lambda + c0,
// with a purely imaginary pair iff c0 = c1 c2 and c1 > 0. Solving for s
// with x = x1* as the curve parameter:
//   s^2 = 50 eps (eps - 1) / (1 + 10 eps - 22 x + 30 x^2),
//   p   = x^3 - 1.1 x^2 + 1.1 x.

#include <array>
#include <optional>
#include <vector>

#include "fhn/curve.hpp"
#include "fhn/model.hpp"

namespace fhn::bif {

enum class Criticality { super, sub, degenerate };
const char* to_string(Criticality c);

struct HopfPoint {
    double p;
    double s;
    double eps;
    double x1_star;
    double omega;
    double l1;
    Criticality criticality;
};

struct CharPoly {
    double c0, c1, c2, c3;  // c3 = 1
    double hopf_residual() const { return c0 - c1 * c2; }
};

CharPoly characteristic_coefficients(const Mat3& j);
CharPoly characteristic_coefficients(const ModelParams& params);

/// p at which the full equilibrium sits at x.
double hopf_p_of_x(double x);
/// x-interval on which the Hopf curve exists (D + 10 eps < 0).
std::pair<double, double> hopf_x_range(double eps);

/// Hopf point with equilibrium at x; l1 filled in. Throws DomainError if x
/// is outside hopf_x_range(eps).
HopfPoint hopf_point_at(double x, double eps);

/// n points with Chebyshev spacing in x over the open interval, ordered by
/// increasing p (left half first).
CurveBranch<HopfPoint> hopf_curve(double eps, std::size_t n);

struct HopfAsymptotes {
    double p_minus;
    double p_plus;
    std::array<double, 2> horizontal;  // [p_minus, p_plus] x {0}
};
HopfAsymptotes hopf_asymptotes();

/// First Lyapunov coefficient at a Hopf point (Kuznetsov normalization,
/// <p, q> = 1 with the conjugate-linear product). Only its sign is used.
double lyapunov_l1(const HopfPoint& point);

/// Left-half Hopf point (x < 11/30) with speed s; nullopt below the curve minimum.
std::optional<HopfPoint> left_hopf_point_at_speed(double s, double eps);

struct GhScanOptions {
    std::size_t n_scan = 400;
    double s_max = 20.0;
    double tol = 1e-12;  // relative, in log s
};

/// Zeros of l1 on the left half of the curve, ordered by increasing s.
std::vector<HopfPoint> gh_locate(double eps, const GhScanOptions& opts = {});

struct GhTrack {
    std::array<CurveBranch<HopfPoint>, 2> branches;   // GH1 (low s), GH2 (high s)
    std::array<std::array<double, 2>, 2> extrapolated; // (p, s) at eps -> 0, per branch
};

/// gh_locate over the grid; points are matched to the branch they continue.
/// Extrapolation uses Aitken's delta-squared on the last three values.
GhTrack gh_track(const std::vector<double>& eps_grid, const GhScanOptions& opts = {});

/// Aitken delta-squared limit of a0, a1, a2; falls back to a2 when the
/// sequence is not geometric enough to extrapolate.
double aitken_limit(double a0, double a1, double a2);

}  // namespace fhn::bif
