#pragma once

// FitzHugh-Nagumo traveling-wave system with a = 1/10, gamma = 1, delta = 5:
//
//   x1' = x2
//   x2' = (s x2 - f(x1) + y - p) / 5,     f(x) = x (x - 1) (1/10 - x)
//   y'  = (eps / s) (x1 - y)
//
// ' is the fast (traveling-coordinate) time. The critical manifold is
// { x2 = 0, y = c(x1; p) = f(x1) + p }.

#include <array>
#include <complex>
#include <utility>
#include <variant>
#include <vector>

namespace fhn {

inline constexpr double kA = 0.1;
inline constexpr double kGamma = 1.0;
inline constexpr double kDelta = 5.0;

// Inflection abscissa of f and the constants of the reflection symmetry.
inline constexpr double kInflection = 11.0 / 30.0;
inline constexpr double kSymmetryX = 11.0 / 15.0;
inline constexpr double kSymmetryP = 2057.0 / 3375.0;
// Layer-problem shift at which both outer saddles share an energy level.
inline constexpr double kDoubleHetPbar = -209.0 / 3375.0;

struct ModelParams {
    double p = 0.0;
    double s = 1.0;
    double eps = 0.01;
};

struct FullState {
    double x1 = 0.0;
    double x2 = 0.0;
    double y = 0.0;
};

struct FastState {
    double x1 = 0.0;
    double x2 = 0.0;
};

using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat2 = std::array<std::array<double, 2>, 2>;

/// The p-free cubic c0(x) = x (x - 1) (1/10 - x) and its derivatives.
/// c(x; p) = c0(x) + p is the critical manifold graph.
struct CubicNullcline {
    static double c0(double x) { return x * (x - 1.0) * (kA - x); }
    static double d1(double x) { return -3.0 * x * x + 2.2 * x - 0.1; }
    static double d2(double x) { return -6.0 * x + 2.2; }
    static double d3(double) { return -6.0; }
    static double c(double x, double p) { return c0(x) + p; }
};

enum class TimeScale { fast, slow };

enum class EquilibriumKind { saddle, source, sink, saddle_focus, center, fold_degenerate };
enum class ManifoldBranch { left, middle, right };

struct EquilibriumInfo {
    std::variant<FullState, FastState> state;
    std::vector<std::complex<double>> eigenvalues;
    EquilibriumKind kind = EquilibriumKind::saddle;
    ManifoldBranch branch = ManifoldBranch::left;

    double x1() const;
};

struct FoldPoints {
    double x_minus;
    double x_plus;
};

const char* to_string(EquilibriumKind k);
const char* to_string(ManifoldBranch b);

/// Right-hand side of the full system. The fast form is the one used for
/// integration; the slow form (divided by eps) is for reporting only.
FullState full_field(const FullState& z, const ModelParams& params, TimeScale ts = TimeScale::fast);

/// Exact Jacobian of the fast-time field.
Mat3 full_jacobian(const FullState& z, const ModelParams& params);

/// Layer problem with pbar = p - y frozen.
FastState fast_field(const FastState& z, double pbar, double s);
Mat2 fast_jacobian(double x1, double s);
/// Divergence of the layer field. Constant in the state.
double fast_divergence(double s);

FoldPoints fold_points();

/// (p_-, p_+): values of p at which the full equilibrium sits on a fold.
std::pair<double, double> slow_fold_params();

/// (pbar_l, pbar_r): the layer problem has three equilibria exactly for
/// pbar strictly between these values.
std::pair<double, double> fast_pbar_bounds();

/// Unique real root of x - c(x; p) = 0.
double equilibrium_x1(double p);

/// q = (x1*, 0, x1*) with eigendata of the full Jacobian at (s, eps).
EquilibriumInfo full_equilibrium(const ModelParams& params);

/// Equilibria of the layer problem, sorted by x1. A double root at a fold
/// is reported once.
std::vector<double> fast_equilibria_x1(double pbar);
EquilibriumInfo fast_equilibrium_info(double x1, double s);

ManifoldBranch branch_of(double x1);

/// Reflection x1 -> 11/15 - x1, x2 -> -x2, y -> 11/15 - y, p -> 2057/3375 - p.
/// It is an involution and commutes with the full field.
std::pair<FullState, double> symmetry_transform(const FullState& z, double p);

/// Classify from eigenvalues; `scale` sets the zero threshold for real parts.
EquilibriumKind classify(const std::vector<std::complex<double>>& ev, double scale = 1.0);

std::vector<std::complex<double>> eigenvalues(const Mat3& m);
std::vector<std::complex<double>> eigenvalues(const Mat2& m);

}  // namespace fhn
