#pragma once

// Slow flow on the critical manifold and the reduction to the 2-D system
//
//   eps x1_T = f(x1) - y + p,   y_T = x1 - y,      x2 = (f(x1) - y + p) / s
//
// (slow time T = eps t / s), together with its second-order form in
// (x1, x2bar), x2 = eps x2bar, and the canard quantities near the lower fold.

#include <utility>
#include <vector>

#include "fhn/integrate.hpp"
#include "fhn/model.hpp"

namespace fhn::reduced {

/// dx1/dt of the slow flow projected to x1: (x1 - c(x1; p)) / (s c'(x1)).
/// Throws DomainError ("fold blow-up") at a fold and for s <= 0.
double slow_flow_rate(double x1, double p, double s);

/// x1 - c(x1; p). Equals slow_flow_rate * s c'(x1); the rescaling reverses
/// time where c' < 0, i.e. on C_l and C_r.
double desingularized_rate(double x1, double p);
bool desingularized_time_reversed(double x1);

/// Hopf values of the reduced system, 2057/6750 -+ sqrt(D(eps)).
std::pair<double, double> reduced_hopf_values(double eps);

/// First-order maximal canard p_- + 5 eps / 8.
double maximal_canard_p(double eps);

struct CanardInfo {
    double eps;
    double p_maximal;
    double p_hopf_minus;
    double p_hopf_plus;
};
CanardInfo canard_info(double eps);

/// Shifted cubic near the lower fold, phi(x) = (sqrt(91)/10) x^2 - x^3.
double canard_phi(double x);
/// Upper end of the admissible h range, phi(sqrt(91)/15).
double canard_h_max();
/// Roots x_l in [-sqrt(91)/30, 0) and x_m in (0, sqrt(91)/15] of phi = h.
std::pair<double, double> canard_roots(double h);

/// Integrand of R: phi'(x)^2 / (x - phi(x)), written in a cancellation-free form.
double canard_integrand(double x);

/// R(h) = integral of the integrand over [x_l(h), x_m(h)], split at 0.
double canard_stability_R(double h, double abs_tol = 1e-12);

enum class ReducedVariant { first_order, second_order };
const char* to_string(ReducedVariant v);

enum class OrbitKind { equilibrium, small, relaxation };
const char* to_string(OrbitKind k);

struct AttractorSummary {
    double x1_min, x1_max, x1_amplitude;  // amplitude = peak-to-peak
    double x2_min, x2_max, x2_amplitude;  // x2 = eps * x2bar
    double period;                        // 0 when no oscillation was detected
    int x2_excursions;                    // |x2| pulses per period above threshold * max|x2|
    OrbitKind kind;
};

struct ReducedOptions {
    double t_end = 400.0;          // in the variant's own time (T for the first-order form, s T for the second-order one)
    double window = 0.2;           // trailing fraction used for the summary
    double excursion_threshold = 0.3;
    double initial_offset = 1e-3;  // x1 displacement from the equilibrium
    std::size_t samples = 20000;   // uniform resample of the window
    ode::IntegratorOptions integ{.rel_tol = 1e-10, .abs_tol = 1e-12, .max_step = 0.05};
};

struct ReducedOrbit {
    ReducedVariant variant;
    ode::Trajectory<2> trajectory;  // (x1, y) or (x1, x2bar)
    std::vector<double> t;          // resampled window
    std::vector<double> x1;
    std::vector<double> x2;
    AttractorSummary summary;
};

/// Forward orbit of the chosen reduction from a small perturbation of the
/// equilibrium. Throws NumericalError if the orbit escapes.
ReducedOrbit simulate_reduced(double p, double s, double eps, ReducedVariant variant,
                              const ReducedOptions& opts = {});

/// Summary of a sampled periodic or stationary signal (exposed for tests).
AttractorSummary summarize_attractor(const std::vector<double>& t, const std::vector<double>& x1,
                                     const std::vector<double>& x2, double threshold);

}  // namespace fhn::reduced
