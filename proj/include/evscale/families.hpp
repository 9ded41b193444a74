#pragma once

// Likelihood ratios for general alternatives against H0 = {p = p0}: the
// point alternatives H_x = {p = (k - x sigma_n)/n}, density alternatives
// H_f by quadrature, the normal-family closed form, the one-sided-uniform
// ratio, and the maximal LR attainable at a given p-value.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "evscale/asymptotics.hpp"
#include "evscale/errors.hpp"
#include "evscale/exact.hpp"
#include "evscale/quadrature.hpp"
#include "evscale/special.hpp"

namespace evscale {

// Offset coordinates of a point alternative: x in sigma_n units from k/n,
// y = u + x, z = y / sigma_n. The hypothesized p is p0 - p0 q0 z.
struct PointAlternative {
  double x;
  double y;
  double z;
};

inline PointAlternative point_alternative(const Parametrization& par,
                                          double x) {
  double y = par.u + x;
  return PointAlternative{x, y, y / par.sigma_n};
}

// ln LR of H_x against H0, exact:
// k ln(1 - q0 z) + (n-k) ln(1 + p0 z), z = (u + x)/sigma_n.
inline double ln_lr_x_exact(const Experiment& e, double p0, double x) {
  const Parametrization par = standardize(e, p0);
  const double z = (par.u + x) / par.sigma_n;
  const double lo = -par.q0 * z; // ln argument offsets
  const double hi = par.p0 * z;
  if (!(lo > -1.0 && hi > -1.0))
    throw domain_error("lr_x_exact: hypothesized p outside (0,1)");
  return static_cast<double>(e.k) * std::log1p(lo) +
         static_cast<double>(e.n - e.k) * std::log1p(hi);
}

inline double lr_x_exact(const Experiment& e, double p0, double x) {
  return std::exp(ln_lr_x_exact(e, p0, x));
}

// Leading-order LR of H_x against H0: exp((u^2 - x^2)/2).
inline double lr_x_approx(double u, double x) {
  return std::exp(0.5 * (u * u - x * x));
}

struct MaxLrResult {
  double u;
  double sup_lr; // sup over point alternatives, exp(u^2/2)
};

// The u matching a p-value and the largest LR any alternative can reach
// there.
inline MaxLrResult max_lr_for_pvalue(double p, Sided sided) {
  if (!(p > 0.0 && p < 1.0))
    throw domain_error("max_lr_for_pvalue: p must lie in (0,1)");
  double u = -phi_inv(sided == Sided::one ? p : 0.5 * p);
  return MaxLrResult{u, std::exp(0.5 * u * u)};
}

// An alternative where p has a density on (0,1). sup_bound_near_mle is the
// constant C certifying that the H_f-probability of |p - k/n| <= c0|u|/sqrt(n)
// is at most C|u|/sqrt(n); only the caller can certify it, so it travels as
// optional metadata.
struct DensityAlternative {
  std::function<double(double)> density;
  double support_lo = 0.0;
  double support_hi = 1.0;
  std::optional<double> sup_bound_near_mle;
};

inline DensityAlternative uniform_alternative(double a, double b) {
  if (!(a < b && a >= 0.0 && b <= 1.0))
    throw domain_error("uniform_alternative: need 0 <= a < b <= 1");
  double h = 1.0 / (b - a);
  return DensityAlternative{[h](double) { return h; }, a, b, std::nullopt};
}

inline DensityAlternative normal_alternative(double mean, double sd) {
  if (!(sd > 0.0)) throw domain_error("normal_alternative: sd must be > 0");
  auto f = [mean, sd](double p) {
    double t = (p - mean) / sd;
    return std::exp(-0.5 * t * t) / (sd * kSqrt2Pi);
  };
  return DensityAlternative{f, 0.0, 1.0, std::nullopt};
}

enum class LrKernel { leading_order, exact };

namespace detail {

inline std::vector<double> lr_f_breakpoints(double x_lo, double x_hi) {
  std::vector<double> pts;
  // uniform backbone so off-center density mass cannot hide inside one panel
  constexpr int kBackbone = 512;
  for (int i = 0; i <= kBackbone; ++i)
    pts.push_back(x_lo + (x_hi - x_lo) * i / kBackbone);
  // geometric refinement near x = 0 where the Gaussian kernel lives
  for (double a : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    for (double s : {a, -a}) {
      if (s > x_lo && s < x_hi) pts.push_back(s);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline void check_density_normalized(const DensityAlternative& alt) {
  std::vector<double> pts;
  constexpr int kPanels = 64;
  for (int i = 0; i <= kPanels; ++i)
    pts.push_back(alt.support_lo +
                  (alt.support_hi - alt.support_lo) * i / kPanels);
  auto mass = integrate_panels(alt.density, pts, 1e-10, 1e-10);
  if (std::fabs(mass.value - 1.0) > 1e-8)
    throw domain_error("lr_f: density does not integrate to 1 over support");
}

} // namespace detail

// LR of H_f against H0 by adaptive quadrature in the x coordinate:
//   (c0/sqrt(n)) e^{u^2/2} Int f(k/n - x c0/sqrt(n)) e^{-x^2/2} dx
// with the exact point-alternative kernel available instead of the Gaussian
// when asymptotic error is unwanted.
inline double lr_f(const Experiment& e, double p0, const DensityAlternative& alt,
                   LrKernel kernel = LrKernel::leading_order) {
  const Parametrization par = standardize(e, p0);
  detail::check_density_normalized(alt);

  const double nd = static_cast<double>(e.n);
  const double khat = static_cast<double>(e.k) / nd;
  const double scale = par.c0 / std::sqrt(nd); // dp = -scale dx
  const double pa = std::max(alt.support_lo, 0.0);
  const double pb = std::min(alt.support_hi, 1.0);
  if (!(pa < pb)) throw domain_error("lr_f: empty support");
  const double x_lo = (khat - pb) / scale;
  const double x_hi = (khat - pa) / scale;

  const double u2h = 0.5 * par.u * par.u;
  std::function<double(double)> integrand;
  if (kernel == LrKernel::leading_order) {
    // e^{u^2/2} factored out so the tolerance applies to an O(1) integrand
    integrand = [&alt, khat, scale](double x) {
      double p = khat - x * scale;
      if (!(p > 0.0 && p < 1.0)) return 0.0;
      return alt.density(p) * std::exp(-0.5 * x * x);
    };
  } else {
    integrand = [&alt, &e, p0, khat, scale, u2h](double x) {
      double p = khat - x * scale;
      if (!(p > 0.0 && p < 1.0)) return 0.0;
      double fp = alt.density(p);
      if (fp == 0.0) return 0.0;
      return fp * std::exp(ln_lr_x_exact(e, p0, x) - u2h);
    };
  }

  auto result = integrate_panels(integrand, detail::lr_f_breakpoints(x_lo, x_hi),
                                 1e-10, 1e-9);
  return scale * std::exp(u2h) * result.value;
}

// Closed form for a normal alternative with mean p0 - mean_shift and
// standard deviation s:
//   (1+sigma^2)^{-1/2} exp(u^2/2 - mu^2/(2(1+sigma^2))),
//   mu = n*mean_shift/sigma_n - u, sigma = n*s/sigma_n.
inline double lr_normal_family(const Experiment& e, double p0,
                               double mean_shift, double s) {
  if (!(s > 0.0)) throw domain_error("lr_normal_family: s must be positive");
  const Parametrization par = standardize(e, p0);
  const double nd = static_cast<double>(e.n);
  const double mu = nd * mean_shift / par.sigma_n - par.u;
  const double sigma = nd * s / par.sigma_n;
  const double s2 = 1.0 + sigma * sigma;
  return std::exp(0.5 * par.u * par.u - mu * mu / (2.0 * s2)) / std::sqrt(s2);
}

// LR of "p uniform on (p0, p0+alpha)" against "p uniform on (p0-alpha, p0)".
// Quadrature with the exact kernel; converges to Phi(-u)/(1-Phi(-u)) as n
// grows.
inline double lr_alpha(const Experiment& e, double p0, double alpha) {
  Parametrization par = standardize(e, p0);
  if (!(alpha > 0.0 && alpha < std::min(par.p0, par.q0)))
    throw domain_error("lr_alpha: need 0 < alpha < min(p0, 1-p0)");
  double above = lr_f(e, p0, uniform_alternative(p0, p0 + alpha),
                      LrKernel::exact);
  double below = lr_f(e, p0, uniform_alternative(p0 - alpha, p0),
                      LrKernel::exact);
  return above / below;
}

} // namespace evscale
