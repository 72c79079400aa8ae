#include "numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bm::numeric {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return sum;
}

double integrate(const ScalarFn& fn, double a, double b, double rel_tol) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    return gauss_kronrod<double, 21>::integrate(fn, a, b, 25, rel_tol, &err);
}

namespace {

bool opposite(double a, double b) { return (a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0); }

}  // namespace

std::optional<double> safeguarded_newton(const ScalarFn& fn, double lo, double hi,
                                         std::optional<double> guess, const RootOptions& opts) {
    if (lo > hi) std::swap(lo, hi);
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!opposite(flo, fhi)) return std::nullopt;

    double x = guess.value_or(0.5 * (lo + hi));
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double prev_width = hi - lo;

    for (int it = 0; it < opts.max_iter; ++it) {
        const double fx = fn(x);
        if (fx == 0.0 || std::abs(fx) <= opts.f_tol) return x;
        if (opposite(flo, fx)) {
            hi = x;
            fhi = fx;
        } else {
            lo = x;
            flo = fx;
        }
        const double scale = std::max(1.0, std::abs(x));
        if (hi - lo <= opts.x_tol * scale) return 0.5 * (lo + hi);

        const double dx = 1e-7 * scale;
        double slope = 0.0;
        const double a = std::max(lo, x - dx);
        const double b = std::min(hi, x + dx);
        if (b > a) slope = (fn(b) - fn(a)) / (b - a);

        double next = (slope != 0.0 && std::isfinite(slope)) ? x - fx / slope
                                                             : std::numeric_limits<double>::quiet_NaN();
        const double width = hi - lo;
        // Bisect when Newton leaves the bracket or the bracket is not shrinking fast enough.
        if (!(next > lo && next < hi) || width > 0.5 * prev_width) next = 0.5 * (lo + hi);
        prev_width = width;
        if (next == x) return x;
        x = next;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> bisect(const ScalarFn& fn, double lo, double hi, const RootOptions& opts) {
    if (lo > hi) std::swap(lo, hi);
    double flo = fn(lo);
    const double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!opposite(flo, fhi)) return std::nullopt;
    for (int it = 0; it < std::max(opts.max_iter, 200); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (opposite(flo, fm)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo <= opts.x_tol * std::max(1.0, std::abs(mid))) break;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> expand_bracket(const ScalarFn& fn, double start, double sign_at_lo,
                                     double factor, int max_steps) {
    double hi = start;
    for (int i = 0; i < max_steps; ++i) {
        const double v = fn(hi);
        if (std::isfinite(v) && (v == 0.0 || (v > 0.0) != (sign_at_lo > 0.0))) return hi;
        hi *= factor;
        if (!std::isfinite(hi)) break;
    }
    return std::nullopt;
}

}  // namespace bm::numeric
