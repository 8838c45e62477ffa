#pragma once

// Homoclinic orbits to q = (x1*, 0, x1*).
//
// Singular limit: a left-to-right layer connection at y = x1* followed, after
// a slow climb on C_r, by a right-to-left one at y = x1* + v. The left-to-right
// curve (A to C) and the s = 0 segment (A to B) make up the singular C-curve.
//
// eps > 0: the 1-D unstable manifold of q is launched toward increasing x1
// and classified by the side it escapes on; each left/right flip in s marks
// a homoclinic orbit.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fhn/curve.hpp"
#include "fhn/fast_layer.hpp"
#include "fhn/integrate.hpp"
#include "fhn/model.hpp"

namespace fhn::homo {

enum class HomoclinicKind { slow_wave, fast_wave, double_het };
const char* to_string(HomoclinicKind k);

struct SingularHomoclinic {
    double p;
    double s;
    layer::HetConnection up_connection;
    std::optional<layer::HetConnection> down_connection;
    double v;
    HomoclinicKind kind;
};

struct SingularPoint {
    double p;
    double s;
    double pbar;  // layer shift at which the connection was solved
    double gap;
};

struct SingularScanOptions {
    double s_max = 3.0;
    double s_step = 0.02;  // coarse scan for the first sign change in s
    layer::HetSolveOptions solve{};
};

/// Left-to-right connection at y = x1*(p), or nullopt when there is none
/// (in particular for every p in (p_-, p_+), where q is on the middle branch).
std::optional<SingularPoint> singular_upper_point(double p, const SingularScanOptions& opts = {});

/// Red curve: singular_upper_point over n points of [p_lo, p_hi].
CurveBranch<SingularPoint> singular_upper_curve(double p_lo, double p_hi, std::size_t n,
                                                const SingularScanOptions& opts = {});

/// Right-to-left connection at y = x1*(p) + v.
std::optional<SingularPoint> singular_return_point(double p, double v, const SingularScanOptions& opts = {});
CurveBranch<SingularPoint> singular_return_curve(double v, double p_lo, double p_hi, std::size_t n,
                                                 const SingularScanOptions& opts = {});

/// Return height v such that a right-to-left connection exists at speed s
/// for this p; the singular homoclinic then closes.
double return_height_at(double p, double s, const layer::HetSolveOptions& opts = {});

/// Fast-wave singular homoclinic on the red curve at p.
SingularHomoclinic singular_homoclinic_at(double p, const SingularScanOptions& opts = {});

/// (p*, 0): the s = 0 double heteroclinic, p - x1*(p) = pbar*.
std::array<double, 2> double_het_point();

/// End of the red curve at p = p_-: (p_-, s*).
std::array<double, 2> upper_curve_endpoint(const layer::HetSolveOptions& opts = {});

struct SplitOptions {
    double offset = 1e-8;
    double scan_step = 0.01;
    double bracket_width = 1e-12;
    double merge_width = 1e-10;
    bool reverse_scan = false;
    ode::IntegratorOptions integ{.rel_tol = 1e-11, .abs_tol = 1e-13, .max_step = 1.0};
    double max_time_cap = 1e4;  // fast time; the run uses min(cap, 20 / eps)
};

/// Escape side of W^u(q) at (p, s, eps), launched toward increasing x1.
ode::EscapeSide unstable_manifold_side(double p, double s, double eps, const SplitOptions& opts = {});

struct Flip {
    double lo, hi;  // bracket in s; the two ends classify differently
    ode::EscapeSide below, above;
};

/// All left/right flips of the escape side over [s_lo, s_hi], refined by
/// bisection and merged when closer than merge_width.
std::vector<Flip> splitting_flips(double p, double eps, double s_lo, double s_hi, const SplitOptions& opts = {});

struct CCurvePoint {
    double p;
    double s1;
    double s2;
    double eps;
    double bracket_width;  // the wider of the two final brackets
    std::size_t flips;     // flips found in the scan window
};

/// Two homoclinic speeds at (p, eps): the first and last flips in the
/// window. Throws NumericalError reporting the flip count if fewer than two.
CCurvePoint locate_c_curve(double p, double eps, double s_lo, double s_hi, const SplitOptions& opts = {});

struct TraceOptions {
    double s_lo = 0.01;
    double s_hi = 2.0;
    double warm_window = 0.15;
    bool parallel = true;  // full scans run concurrently; serial mode warm-starts from the neighbour
    SplitOptions split{};
};

struct CCurveTrace {
    CurveBranch<CCurvePoint> branch;
    std::vector<std::pair<double, std::string>> failures;  // (p, reason)
};

CCurveTrace trace_c_curve(double eps, const std::vector<double>& p_grid, const TraceOptions& opts = {});

struct Segment {
    std::array<double, 2> a, b;
};

struct SingularDiagram {
    std::array<double, 2> A, B, C;
    Segment AB;
    std::vector<std::array<double, 2>> AC;  // red curve from A to C
    double hopf_p_minus, hopf_p_plus;         // vertical Hopf asymptotes
    Segment hopf_horizontal;
    double canard_p;                          // maximal canard at eps = 0
    double fold_x_minus, fold_x_plus;
    double fold_p_minus, fold_p_plus;
};

SingularDiagram assemble_singular_diagram(std::size_t n_ac = 60, const SingularScanOptions& opts = {});

/// Hausdorff distance between the traced curve (two polylines through the
/// (p, s1) and (p, s2) points) and AB u AC restricted to the p-range of the trace.
double hausdorff_to_singular(const std::vector<CCurvePoint>& curve, const SingularDiagram& diagram);

/// Distance from a point to the union of AB and the AC polyline.
double distance_to_singular(const std::array<double, 2>& pt, const SingularDiagram& diagram);

}  // namespace fhn::homo
