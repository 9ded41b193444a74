#pragma once

// Adaptive quadrature: Gauss-Kronrod 7/15 panels with interval halving.
// The embedded Gauss-7 rule supplies the error estimate. Node coordinates
// and weights are the standard QUADPACK dqk15 constants.

#include <cmath>
#include <functional>
#include <vector>

#include "evscale/errors.hpp"

namespace evscale {

namespace detail {

// Positive abscissae of the 15-point Kronrod rule (last entry is the center).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr double kGk15Weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Weights of the embedded 7-point Gauss rule (odd Kronrod nodes).
inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
  double value;
  double error;
};

template <class F>
PanelEstimate gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    double fx;
    if (i == 7) {
      fx = f(center);
    } else {
      fx = f(center - half * kGk15Nodes[i]) + f(center + half * kGk15Nodes[i]);
    }
    kronrod += kGk15Weights[i] * fx;
    if (i % 2 == 1) gauss += kG7Weights[i / 2] * fx; // odd nodes + center
  }
  return PanelEstimate{kronrod * half, std::fabs(kronrod - gauss) * half};
}

} // namespace detail

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Integrates f over [a,b], halving intervals until the local Kronrod-Gauss
// discrepancy meets max(abs_tol, rel_tol*|panel|). Throws numeric_error if
// the depth limit is reached with the estimate still above tolerance.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    double abs_tol = 1e-10,
                                    double rel_tol = 1e-10,
                                    int max_depth = 48) {
  if (!(a < b)) return QuadratureResult{0.0, 0.0};
  auto est = detail::gk15(f, a, b);
  if (est.error <= std::max(abs_tol, rel_tol * std::fabs(est.value)) ||
      (b - a) <= 1e-300)
    return QuadratureResult{est.value, est.error};
  if (max_depth <= 0)
    throw numeric_error("integrate_adaptive: did not converge");
  double mid = 0.5 * (a + b);
  auto left = integrate_adaptive(f, a, mid, 0.5 * abs_tol, rel_tol,
                                 max_depth - 1);
  auto right = integrate_adaptive(f, mid, b, 0.5 * abs_tol, rel_tol,
                                  max_depth - 1);
  return QuadratureResult{left.value + right.value,
                          left.error_estimate + right.error_estimate};
}

// Integrates across an ordered breakpoint list, distributing the absolute
// tolerance over the panels. Pre-splitting at known feature locations keeps
// sharp peaks from slipping between the nodes of one wide panel.
template <class F>
QuadratureResult integrate_panels(const F& f,
                                  const std::vector<double>& breakpoints,
                                  double abs_tol = 1e-10,
                                  double rel_tol = 1e-10) {
  QuadratureResult total;
  if (breakpoints.size() < 2) return total;
  double per_panel = abs_tol / static_cast<double>(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    auto r = integrate_adaptive(f, breakpoints[i], breakpoints[i + 1],
                                per_panel, rel_tol);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
  }
  return total;
}

} // namespace evscale
