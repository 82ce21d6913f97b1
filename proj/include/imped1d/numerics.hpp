#pragma once

// Small shared numeric helpers: trapezoid quadrature on uniform grids,
// cumulative integration, linear interpolation, robust float comparisons.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace imped1d {

/// Composite trapezoid rule over uniformly spaced samples.
inline double trapezoid(std::span<const double> values, double dx) {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * dx;
}

/// Running trapezoid integral; result[i] = integral from sample 0 to sample i.
inline std::vector<double> cumulative_trapezoid(std::span<const double> values, double dx) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dx * (values[i - 1] + values[i]);
    return out;
}

/// Linear interpolation on a uniform grid starting at `start` with spacing `dx`.
/// Zero outside the sampled window.
inline double interp_uniform(std::span<const double> values, double start, double dx, double t) {
    if (values.empty()) return 0.0;
    if (values.size() == 1) return 0.0;
    const double u = (t - start) / dx;
    if (u <= 0.0 || u >= static_cast<double>(values.size() - 1)) {
        // endpoints themselves still count
        if (u == 0.0) return values.front();
        if (u == static_cast<double>(values.size() - 1)) return values.back();
        return 0.0;
    }
    const auto i = static_cast<std::size_t>(u);
    const double frac = u - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty set");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

/// Greatest common divisor of positive reals up to tolerance `tol` (absolute).
/// Returns 0 when the iteration collapses below tol (no usable common base).
inline double approx_gcd(double a, double b, double tol) {
    a = std::abs(a);
    b = std::abs(b);
    if (a < b) std::swap(a, b);
    while (b > tol) {
        double r = std::fmod(a, b);
        if (r < tol || b - r < tol) r = 0.0;
        a = b;
        b = r;
    }
    return a;
}

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
    const double diff = std::abs(a - b);
    return diff <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace imped1d
