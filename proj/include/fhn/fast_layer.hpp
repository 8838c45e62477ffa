#pragma once

// Layer problem x1' = x2, x2' = (s x2 - c0(x1) - pbar) / 5 with pbar = p - y.
// Heteroclinic connections between the outer saddles are found by shooting
// to the section x1 = (x_l + x_r) / 2 and zeroing the x2-gap there.

#include <array>
#include <optional>

#include "fhn/curve.hpp"
#include "fhn/integrate.hpp"
#include "fhn/model.hpp"

namespace fhn::layer {

/// H = x2^2 / 2 + V(x1) with V' = (c0 + pbar) / 5; conserved when s = 0.
struct HamiltonianData {
    double pbar;

    double V(double x1) const;
    double H(const FastState& z) const;
};

enum class HetDirection { left_to_right, right_to_left };
const char* to_string(HetDirection d);

struct SaddleDirections {
    std::array<double, 2> unstable;
    std::array<double, 2> stable;
};

/// Unit eigenvectors of A(x1) at a saddle, both oriented into the strip
/// between the outer saddles (rightward on C_l, leftward on C_r).
SaddleDirections saddle_eigendirections(const EquilibriumInfo& eq, double s);

struct ShootOptions {
    double offset = 1e-8;
    ode::IntegratorOptions integ{.rel_tol = 1e-12, .abs_tol = 1e-14, .max_step = 0.5, .max_time = 5000.0};
};

enum class GapStatus { crossed, source_missed, target_missed };

struct SectionGap {
    double gap;         // +-inf when one branch misses the section
    GapStatus status;
    double section;     // x1 of the section
    double x2_source;   // first crossing of the unstable branch (NaN if missed)
    double x2_target;   // first crossing of the stable branch, backward time (NaN if missed)
};

/// Section data for the connection source saddle -> target saddle.
SectionGap section_gap(double pbar, double s, HetDirection dir = HetDirection::left_to_right,
                       const ShootOptions& opts = {});

/// h(pbar, s): x2-gap at the section, with signed infinities standing in for
/// a branch that never reaches it so that sign brackets survive.
double shoot_heteroclinic(double pbar, double s, HetDirection dir = HetDirection::left_to_right,
                          const ShootOptions& opts = {});

struct HetConnection {
    double pbar;
    double s;
    HetDirection direction;
    double section_gap;
    EquilibriumInfo from;
    EquilibriumInfo to;
};

struct HetSolveOptions {
    ShootOptions shoot;
    double gap_tol = 1e-10;
    double param_tol = 1e-14;
};

/// Solve for s with pbar fixed; [s_lo, s_hi] must bracket a gap sign change.
HetConnection find_het_speed(double pbar, double s_lo, double s_hi, HetDirection dir,
                             const HetSolveOptions& opts = {});
/// Solve for pbar with s fixed.
HetConnection find_het_pbar(double s, double pbar_lo, double pbar_hi, HetDirection dir,
                            const HetSolveOptions& opts = {});

struct ContinuationLimits {
    double s_min = 0.0;
    double s_max = 3.0;
    std::size_t max_points = 500;
    double min_step = 1e-6;
    double pbar_scale = 20.0;  // weight of pbar against s in the step length
};

/// Natural-parameter continuation from `seed` toward increasing s. Each
/// step fixes whichever parameter moves faster along the secant and solves
/// for the other; steps halve on failure.
CurveBranch<HetConnection> continue_het_curve(const HetConnection& seed, double step,
                                              const ContinuationLimits& limits = {},
                                              const HetSolveOptions& opts = {});

/// Both arms of the V of connections in the (pbar, s) plane, started at the
/// s = 0 double connection.
std::array<CurveBranch<HetConnection>, 2> het_v_curve(double step, const ContinuationLimits& limits = {},
                                                      const HetSolveOptions& opts = {});

/// pbar at which V(x_l) = V(x_r): the s = 0 double heteroclinic.
double double_het_pbar();

}  // namespace fhn::layer
