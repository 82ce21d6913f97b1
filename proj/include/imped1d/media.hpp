#pragma once

// Impedance media: regulated impedance profiles of one-way travel time,
// their step-function discretization, and interface reflectivities.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imped1d/numerics.hpp"

namespace imped1d {

/// Acoustic impedance as a function of one-way travel time.  The function is
/// constant outside the slab [x_minus, x_plus]; the evaluator is only ever
/// consulted inside it.  Positivity over the slab is checked where the profile
/// is sampled (discretization), not at construction.
class ImpedanceProfile {
public:
    ImpedanceProfile(std::function<double(double)> evaluator, double x_minus, double x_plus,
                     double zeta_minus, double zeta_plus)
        : eval_(std::move(evaluator)),
          x_minus_(x_minus),
          x_plus_(x_plus),
          zeta_minus_(zeta_minus),
          zeta_plus_(zeta_plus) {
        if (!(0.0 < x_minus_ && x_minus_ < x_plus_))
            throw std::invalid_argument("ImpedanceProfile: need 0 < x_minus < x_plus");
        if (!(zeta_minus_ > 0.0) || !(zeta_plus_ > 0.0))
            throw std::invalid_argument("ImpedanceProfile: end impedances must be positive");
        if (!eval_) throw std::invalid_argument("ImpedanceProfile: empty evaluator");
    }

    /// Constant medium helper (degenerate slab of no consequence).
    static ImpedanceProfile constant(double value, double x_minus = 1.0, double x_plus = 2.0) {
        return {[value](double) { return value; }, x_minus, x_plus, value, value};
    }

    double operator()(double x) const {
        if (x < x_minus_) return zeta_minus_;
        if (x >= x_plus_) return zeta_plus_;
        return eval_(x);
    }

    double x_minus() const { return x_minus_; }
    double x_plus() const { return x_plus_; }
    double zeta_minus() const { return zeta_minus_; }
    double zeta_plus() const { return zeta_plus_; }
    double slab_width() const { return x_plus_ - x_minus_; }

private:
    std::function<double(double)> eval_;
    double x_minus_;
    double x_plus_;
    double zeta_minus_;
    double zeta_plus_;
};

/// Step impedance medium: jump positions x_1 < ... < x_n (one-way travel time,
/// all positive) and the n+1 constant piece values.  Derived quantities are the
/// two-way inter-interface times tau_j = 2(x_j - x_{j-1}) (x_0 = 0) and the
/// interface reflectivities r_j = (z_{j-1} - z_j) / (z_{j-1} + z_j).
class LayerStack {
public:
    LayerStack() : values_{1.0} {}

    LayerStack(std::vector<double> interfaces, std::vector<double> values)
        : interfaces_(std::move(interfaces)), values_(std::move(values)) {
        if (values_.size() != interfaces_.size() + 1)
            throw std::invalid_argument("LayerStack: need one value per piece (n+1 values)");
        for (double v : values_)
            if (!(v > 0.0)) throw std::invalid_argument("LayerStack: impedance values must be positive");
        double prev = 0.0;
        for (double x : interfaces_) {
            if (!(x > prev)) throw std::invalid_argument("LayerStack: interfaces must be positive and strictly increasing");
            prev = x;
        }
        derive();
    }

    /// Rebuild piece values from two-way times, reflectivities and the
    /// impedance above the stack: z_j = z_{j-1} (1 - r_j) / (1 + r_j).
    static LayerStack from_times_and_reflectivities(std::span<const double> two_way_times,
                                                    std::span<const double> reflectivities,
                                                    double zeta_minus) {
        if (two_way_times.size() != reflectivities.size())
            throw std::invalid_argument("LayerStack: tau and r must have equal length");
        if (!(zeta_minus > 0.0)) throw std::invalid_argument("LayerStack: zeta_minus must be positive");
        std::vector<double> xs(two_way_times.size());
        std::vector<double> vals(two_way_times.size() + 1);
        vals[0] = zeta_minus;
        double x = 0.0;
        for (std::size_t j = 0; j < two_way_times.size(); ++j) {
            if (!(two_way_times[j] > 0.0)) throw std::invalid_argument("LayerStack: tau_j must be positive");
            const double r = reflectivities[j];
            if (!(std::abs(r) < 1.0)) throw std::invalid_argument("LayerStack: |r_j| must be < 1");
            x += 0.5 * two_way_times[j];
            xs[j] = x;
            vals[j + 1] = vals[j] * (1.0 - r) / (1.0 + r);
        }
        return LayerStack(std::move(xs), std::move(vals));
    }

    std::size_t size() const { return interfaces_.size(); }
    bool empty() const { return interfaces_.empty(); }

    const std::vector<double>& interfaces() const { return interfaces_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& two_way_times() const { return taus_; }
    const std::vector<double>& reflectivities() const { return refl_; }

    double zeta_minus() const { return values_.front(); }
    double zeta_plus() const { return values_.back(); }
    double last_interface() const { return interfaces_.empty() ? 0.0 : interfaces_.back(); }

private:
    void derive() {
        taus_.resize(interfaces_.size());
        refl_.resize(interfaces_.size());
        double prev = 0.0;
        for (std::size_t j = 0; j < interfaces_.size(); ++j) {
            taus_[j] = 2.0 * (interfaces_[j] - prev);
            prev = interfaces_[j];
            refl_[j] = (values_[j] - values_[j + 1]) / (values_[j] + values_[j + 1]);
        }
    }

    std::vector<double> interfaces_;
    std::vector<double> values_;
    std::vector<double> taus_;
    std::vector<double> refl_;
};

/// Step-function approximation of a profile on the evenly spaced partition of
/// [x_minus, x_plus] with spacing <= max_spacing: jumps at partition-cell
/// midpoints, piece values sampled at partition points.  Zero-height jumps are
/// dropped.
inline LayerStack discretize(const ImpedanceProfile& profile, double max_spacing) {
    if (!(max_spacing > 0.0)) throw std::invalid_argument("discretize: spacing must be positive");
    const double a = profile.x_minus();
    const double b = profile.x_plus();
    const auto n_cells = static_cast<std::size_t>(std::ceil((b - a) / max_spacing - 1e-12));
    const std::size_t cells = std::max<std::size_t>(1, n_cells);
    const double dx = (b - a) / static_cast<double>(cells);

    std::vector<double> piece_values(cells + 1);
    piece_values.front() = profile.zeta_minus();
    piece_values.back() = profile.zeta_plus();
    for (std::size_t j = 1; j < cells; ++j) {
        const double x = a + dx * static_cast<double>(j);
        const double z = profile(x);
        if (!(z > 0.0))
            throw std::runtime_error("discretize: sampled impedance is not positive at x=" + std::to_string(x));
        piece_values[j] = z;
    }

    std::vector<double> interfaces;
    std::vector<double> values;
    interfaces.reserve(cells);
    values.reserve(cells + 1);
    values.push_back(piece_values.front());
    for (std::size_t j = 0; j < cells; ++j) {
        if (piece_values[j + 1] == values.back()) continue;  // zero-height jump
        interfaces.push_back(a + dx * (static_cast<double>(j) + 0.5));
        values.push_back(piece_values[j + 1]);
    }
    return LayerStack(std::move(interfaces), std::move(values));
}

struct ReflectivitySample {
    double value = 0.0;
    bool jump_suspected = false;  // |finite difference| exceeded the threshold
};

/// Reflectivity function R(t) = -z'(t/2) / (4 z(t/2)), with z' approximated by
/// a symmetric finite difference of step h.  The default h matches a tenth of
/// the default slab discretization (slab width / 1000); callers holding an
/// active discretization Delta should pass Delta / 10.  The sample is flagged
/// when the finite difference exceeds jump_threshold (default: a slope one
/// thousand times steeper than impedance-range over slab-width).
inline ReflectivitySample reflectivity_function(const ImpedanceProfile& profile, double t, double h = 0.0,
                                                double jump_threshold = 0.0) {
    if (h == 0.0) h = profile.slab_width() * 1e-4;
    if (!(h > 0.0)) throw std::invalid_argument("reflectivity_function: step must be positive");
    if (jump_threshold == 0.0)
        jump_threshold = 1e3 * std::max(profile.zeta_minus(), profile.zeta_plus()) / profile.slab_width();
    const double x = 0.5 * t;
    const double z = profile(x);
    if (!(z > 0.0)) throw std::runtime_error("reflectivity_function: impedance not positive at evaluation point");
    const double dz = (profile(x + h) - profile(x - h)) / (2.0 * h);
    ReflectivitySample out;
    out.value = -dz / (4.0 * z);
    out.jump_suspected = std::abs(dz) > jump_threshold;
    return out;
}

/// Profile x -> a * profile(b x): slab endpoints divided by b, end impedances
/// scaled by a.  Reflectivities are invariant; two-way times scale by 1/b.
inline ImpedanceProfile scale_dilate(const ImpedanceProfile& profile, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("scale_dilate: a and b must be positive");
    return {[profile, a, b](double x) { return a * profile(b * x); },
            profile.x_minus() / b, profile.x_plus() / b,
            a * profile.zeta_minus(), a * profile.zeta_plus()};
}

}  // namespace imped1d
