#pragma once

// Impedance recovery from reflection data: the accumulation function, the
// refined impedance transform c (w - A) / (w + A), the classical exponential
// estimate c e^{-2A}, the zero-mean-source modification via k-fold
// antiderivatives, the pressure-data variants, the energy lag diagnostic, and
// the two smooth approximations to the Green's function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imped1d/forward.hpp"
#include "imped1d/media.hpp"
#include "imped1d/numerics.hpp"
#include "imped1d/wavelets.hpp"

namespace imped1d {

struct Curve {
    std::vector<double> x;
    std::vector<double> value;
};

/// A(x) = integral of the data up to two-way time 2x.
using AccumulationCurve = Curve;

enum class Method : std::uint8_t {
    refined,
    classical,
    refined_zero_mean,
    pressure_refined,
    pressure_classical,
};

inline const char* method_name(Method m) {
    switch (m) {
        case Method::refined: return "refined";
        case Method::classical: return "classical";
        case Method::refined_zero_mean: return "refined-zero-mean";
        case Method::pressure_refined: return "pressure-refined";
        case Method::pressure_classical: return "pressure-classical";
    }
    return "?";
}

struct EstimateParams {
    double weight = 1.0;       // w (wavelet area) or v (k-th moment / k!)
    double c = 1.0;            // impedance above the slab
    std::size_t moment_index = 0;  // k for the zero-mean pathway, else 0
};

/// Impedance estimate on a grid of one-way travel-time positions.  Samples
/// where the transform is singular are flagged invalid (value held at 0).
struct ImpedanceEstimate {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<std::uint8_t> valid;
    Method method = Method::refined;
    EstimateParams params;
};

namespace detail {

inline void require_increasing(std::span<const double> grid, const char* who) {
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(who) + ": grid must be strictly increasing");
}

}  // namespace detail

/// Exact partial sums of a delta train up to two-way time 2x; atoms sitting
/// exactly at t = 2x are included (right-continuous convention).
inline AccumulationCurve accumulate(const DeltaTrain& g, std::span<const double> grid) {
    detail::require_increasing(grid, "accumulate");
    AccumulationCurve out;
    out.x.assign(grid.begin(), grid.end());
    out.value.resize(grid.size());
    const auto& ev = g.events();
    std::size_t i = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double horizon = 2.0 * grid[k];
        while (i < ev.size() && ev[i].time <= horizon) sum += ev[i++].amplitude;
        out.value[k] = sum;
    }
    return out;
}

/// Integral of the linear interpolant of the trace from its first sample up to
/// two-way time 2x (the trace is taken to vanish outside its window).
inline AccumulationCurve accumulate(const SampledTrace& trace, std::span<const double> grid) {
    detail::require_increasing(grid, "accumulate");
    AccumulationCurve out;
    out.x.assign(grid.begin(), grid.end());
    out.value.resize(grid.size());
    if (trace.samples.empty()) return out;
    const std::vector<double> cum = cumulative_trapezoid(trace.samples, trace.dt);
    const double t_end = trace.end_time();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = 2.0 * grid[k];
        if (t <= trace.start) {
            out.value[k] = 0.0;
        } else if (t >= t_end) {
            out.value[k] = cum.back();
        } else {
            const double u = (t - trace.start) / trace.dt;
            const auto j = static_cast<std::size_t>(u);
            const double tj = trace.time_at(j);
            const double fj = trace.samples[j];
            const double ft = trace.value_at(t);
            out.value[k] = cum[j] + 0.5 * (t - tj) * (fj + ft);
        }
    }
    return out;
}

/// A sensible default evaluation grid: midpoints between consecutive event
/// half-times, plus a point before the first event and one beyond the last.
inline std::vector<double> default_estimate_grid(const DeltaTrain& g) {
    if (g.empty()) return {1.0};
    const auto& ev = g.events();
    std::vector<double> grid;
    grid.reserve(ev.size() + 1);
    grid.push_back(0.25 * ev.front().time);
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) grid.push_back(0.25 * (ev[i].time + ev[i + 1].time));
    const double last = 0.5 * ev.back().time;
    grid.push_back(grid.back() < last ? last * 1.05 : grid.back() * 1.05);
    return grid;
}

/// Trace grid halved: estimates live at x = t / 2.
inline std::vector<double> default_estimate_grid(const SampledTrace& trace) {
    std::vector<double> grid(trace.size());
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.5 * trace.time_at(i);
    return grid;
}

namespace detail {

inline ImpedanceEstimate refined_from_accumulation(AccumulationCurve&& acc, double w, double c, Method tag,
                                                   std::size_t moment_index) {
    if (w == 0.0)
        throw std::invalid_argument("refined_transform: w = 0 (zero-mean source); use the modified transform");
    if (!(c > 0.0)) throw std::invalid_argument("refined_transform: c must be positive");
    ImpedanceEstimate est;
    est.x = std::move(acc.x);
    est.value.resize(est.x.size());
    est.valid.assign(est.x.size(), 1);
    est.method = tag;
    est.params = {w, c, moment_index};
    const double singular = 1e-12 * std::abs(w);
    for (std::size_t i = 0; i < est.x.size(); ++i) {
        const double a = acc.value[i];
        const double denom = w + a;
        if (std::abs(denom) <= singular) {
            est.value[i] = 0.0;
            est.valid[i] = 0;
        } else {
            est.value[i] = c * (w - a) / denom;
        }
    }
    return est;
}

inline ImpedanceEstimate classical_from_accumulation(AccumulationCurve&& acc, double c, Method tag) {
    if (!(c > 0.0)) throw std::invalid_argument("classical_estimate: c must be positive");
    ImpedanceEstimate est;
    est.x = std::move(acc.x);
    est.value.resize(est.x.size());
    est.valid.assign(est.x.size(), 1);
    est.method = tag;
    est.params = {1.0, c, 0};
    for (std::size_t i = 0; i < est.x.size(); ++i) est.value[i] = c * std::exp(-2.0 * acc.value[i]);
    return est;
}

}  // namespace detail

/// Refined impedance transform c (w - A(x)) / (w + A(x)).
inline ImpedanceEstimate refined_transform(const DeltaTrain& g, double w, double c, std::span<const double> grid) {
    return detail::refined_from_accumulation(accumulate(g, grid), w, c, Method::refined, 0);
}
inline ImpedanceEstimate refined_transform(const SampledTrace& d, double w, double c, std::span<const double> grid) {
    return detail::refined_from_accumulation(accumulate(d, grid), w, c, Method::refined, 0);
}
inline ImpedanceEstimate refined_transform(const DeltaTrain& g, double w, double c) {
    return refined_transform(g, w, c, default_estimate_grid(g));
}
inline ImpedanceEstimate refined_transform(const SampledTrace& d, double w, double c) {
    return refined_transform(d, w, c, default_estimate_grid(d));
}

/// Classical estimate c e^{-2 A(x)} (single-scattering exponential).
inline ImpedanceEstimate classical_estimate(const DeltaTrain& g, double c, std::span<const double> grid) {
    return detail::classical_from_accumulation(accumulate(g, grid), c, Method::classical);
}
inline ImpedanceEstimate classical_estimate(const SampledTrace& d, double c, std::span<const double> grid) {
    return detail::classical_from_accumulation(accumulate(d, grid), c, Method::classical);
}

/// Zero-mean-source pathway: finds the least k with nonzero moment, forms the
/// k-fold antiderivative of the data and applies the refined transform with
/// weight v = moment(W, k) / k!.
inline ImpedanceEstimate modified_transform(const SampledTrace& d, const Wavelet& source, double c,
                                            std::span<const double> grid, double moment_tol = 1e-9) {
    const FirstMoment fm = first_nonzero_moment(source, moment_tol);
    if (fm.index == 0)
        throw std::invalid_argument(
            "modified_transform: source has nonzero mean; use refined_transform with w = integral of W");
    double factorial = 1.0;
    for (std::size_t i = 2; i <= fm.index; ++i) factorial *= static_cast<double>(i);
    const double v = fm.value / factorial;
    const SampledTrace integrated = antiderivative(d, fm.index);
    ImpedanceEstimate est = detail::refined_from_accumulation(accumulate(integrated, grid), v, c,
                                                              Method::refined_zero_mean, fm.index);
    return est;
}

/// Pressure-data refined transform: the refined transform of the negated data.
inline ImpedanceEstimate pressure_refined(const DeltaTrain& f, double w, double c, std::span<const double> grid) {
    ImpedanceEstimate est = detail::refined_from_accumulation(accumulate(to_pressure(f), grid), w, c,
                                                              Method::pressure_refined, 0);
    return est;
}
inline ImpedanceEstimate pressure_refined(const SampledTrace& f, double w, double c, std::span<const double> grid) {
    ImpedanceEstimate est = detail::refined_from_accumulation(accumulate(negated(f), grid), w, c,
                                                              Method::pressure_refined, 0);
    return est;
}

/// Pressure-data classical estimate c e^{+2 A_f(x)}.
inline ImpedanceEstimate pressure_classical(const DeltaTrain& f, double c, std::span<const double> grid) {
    ImpedanceEstimate est = detail::classical_from_accumulation(accumulate(to_pressure(f), grid), c,
                                                                Method::pressure_classical);
    return est;
}
inline ImpedanceEstimate pressure_classical(const SampledTrace& f, double c, std::span<const double> grid) {
    ImpedanceEstimate est = detail::classical_from_accumulation(accumulate(negated(f), grid), c,
                                                                Method::pressure_classical);
    return est;
}

/// Energy lag sigma(x) = |(zeta_minus - zeta(x)) / (zeta_minus + zeta(x)) - A(x)|
/// where g is the impulse response of the profile.  Vanishes identically left
/// of the slab and tends to zero far beyond it.
inline Curve energy_lag(const ImpedanceProfile& profile, const DeltaTrain& g, std::span<const double> grid) {
    detail::require_increasing(grid, "energy_lag");
    const AccumulationCurve acc = accumulate(g, grid);
    Curve out;
    out.x = acc.x;
    out.value.resize(acc.value.size());
    const double zm = profile.zeta_minus();
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        const double z = profile(out.x[i]);
        out.value[i] = std::abs((zm - z) / (zm + z) - acc.value[i]);
    }
    return out;
}

/// The two smooth approximations to the impulse response, side by side:
/// the single-scattering reflectivity R(t) = -z'(t/2) / (4 z(t/2)) and the
/// refined counterpart -zeta_minus z'(t/2) / (zeta_minus + z(t/2))^2.
struct GreensApproximations {
    std::vector<double> t;
    std::vector<double> single_scattering;
    std::vector<double> refined;
    std::vector<std::uint8_t> jump_flag;
};

inline GreensApproximations greens_approximations(const ImpedanceProfile& profile, std::span<const double> grid_t,
                                                  double fd_step = 0.0, double jump_threshold = 0.0) {
    GreensApproximations out;
    out.t.assign(grid_t.begin(), grid_t.end());
    out.single_scattering.resize(grid_t.size());
    out.refined.resize(grid_t.size());
    out.jump_flag.resize(grid_t.size());
    const double h = fd_step != 0.0 ? fd_step : profile.slab_width() * 1e-4;
    if (jump_threshold == 0.0)
        jump_threshold = 1e3 * std::max(profile.zeta_minus(), profile.zeta_plus()) / profile.slab_width();
    const double zm = profile.zeta_minus();
    for (std::size_t i = 0; i < grid_t.size(); ++i) {
        const double x = 0.5 * grid_t[i];
        const double z = profile(x);
        const double dz = (profile(x + h) - profile(x - h)) / (2.0 * h);
        out.single_scattering[i] = -dz / (4.0 * z);
        out.refined[i] = -zm * dz / ((zm + z) * (zm + z));
        out.jump_flag[i] = std::abs(dz) > jump_threshold ? 1 : 0;
    }
    return out;
}

}  // namespace imped1d
