#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace bm::numeric {

using ScalarFn = std::function<double(double)>;

std::vector<double> linspace(double a, double b, std::size_t n);

/// Composite trapezoid of samples y over abscissae x.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Adaptive Gauss-Kronrod quadrature of fn over [a, b].
double integrate(const ScalarFn& fn, double a, double b, double rel_tol = 1e-11);

struct RootOptions {
    double x_tol = 1e-14;   // relative to max(1, |x|)
    double f_tol = 0.0;     // absolute residual accepted as converged
    int max_iter = 200;
};

/// Root of fn on [lo, hi] where fn(lo) and fn(hi) have opposite signs (or one
/// is zero). Newton steps with a central-difference slope, falling back to
/// bisection whenever the step leaves the current bracket or stalls.
/// Returns nullopt when the endpoints do not bracket a sign change.
std::optional<double> safeguarded_newton(const ScalarFn& fn, double lo, double hi,
                                         std::optional<double> guess = std::nullopt,
                                         const RootOptions& opts = {});

/// Plain bisection, used where fn is only piecewise smooth.
std::optional<double> bisect(const ScalarFn& fn, double lo, double hi,
                             const RootOptions& opts = {});

/// Grows hi geometrically from `start` until fn(hi) has the sign opposite to
/// `sign_at_lo`. Returns nullopt if `max_steps` doublings do not suffice.
std::optional<double> expand_bracket(const ScalarFn& fn, double start, double sign_at_lo,
                                     double factor = 2.0, int max_steps = 200);

}  // namespace bm::numeric
