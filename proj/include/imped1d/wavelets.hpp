#pragma once

// Source waveforms: sampled compactly supported wavelets, moment computation,
// and the virtual-wavelet construction used when the source has zero mean.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "imped1d/numerics.hpp"

namespace imped1d {

/// Uniformly sampled source waveform.  The ideal impulse is represented
/// symbolically (is_delta) and never sampled, so convolution with it can stay
/// exact.  Moments 0..4 are cached at construction.
class Wavelet {
public:
    Wavelet(std::vector<double> samples, double start, double dt)
        : samples_(std::move(samples)), start_(start), dt_(dt) {
        if (!(dt_ > 0.0)) throw std::invalid_argument("Wavelet: dt must be positive");
        if (samples_.size() < 2) throw std::invalid_argument("Wavelet: need at least two samples");
        cache_moments();
    }

    static Wavelet delta() { return Wavelet(DeltaTag{}); }

    bool is_delta() const { return is_delta_; }
    const std::vector<double>& samples() const { return samples_; }
    double start() const { return start_; }
    double dt() const { return dt_; }
    double support_lo() const { return is_delta_ ? 0.0 : start_; }
    double support_hi() const {
        return is_delta_ ? 0.0 : start_ + dt_ * static_cast<double>(samples_.size() - 1);
    }
    double support_width() const { return support_hi() - support_lo(); }

    /// Linear interpolation between samples; zero outside the window.
    double operator()(double t) const {
        if (is_delta_) throw std::logic_error("Wavelet: delta wavelet cannot be point-evaluated");
        return interp_uniform(samples_, start_, dt_, t);
    }

    double l1_norm() const { return l1_; }

    /// integral of s^k W(s) ds by the composite trapezoid rule on the sample
    /// grid; for the delta wavelet the moments of a unit impulse at the origin.
    double moment(std::size_t k) const {
        if (is_delta_) return k == 0 ? 1.0 : 0.0;
        if (k < cached_.size()) return cached_[k];
        return compute_moment(k);
    }

private:
    struct DeltaTag {};
    explicit Wavelet(DeltaTag) : is_delta_(true) {
        cached_.fill(0.0);
        cached_[0] = 1.0;
        l1_ = 1.0;
    }

    double compute_moment(std::size_t k) const {
        std::vector<double> integrand(samples_.size());
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            const double s = start_ + dt_ * static_cast<double>(i);
            integrand[i] = std::pow(s, static_cast<double>(k)) * samples_[i];
        }
        return trapezoid(integrand, dt_);
    }

    void cache_moments() {
        for (std::size_t k = 0; k < cached_.size(); ++k) cached_[k] = compute_moment(k);
        std::vector<double> a(samples_.size());
        for (std::size_t i = 0; i < samples_.size(); ++i) a[i] = std::abs(samples_[i]);
        l1_ = trapezoid(a, dt_);
    }

    std::vector<double> samples_;
    double start_ = 0.0;
    double dt_ = 1.0;
    bool is_delta_ = false;
    std::array<double, 5> cached_{};
    double l1_ = 0.0;
};

inline double moment(const Wavelet& w, std::size_t k) { return w.moment(k); }

struct FirstMoment {
    std::size_t index = 0;
    double value = 0.0;
};

/// Smallest k <= 4 whose moment is nonzero in the scale-invariant sense
/// |m_k| > tol * ||W||_1 * width^k, together with that moment's value.
inline FirstMoment first_nonzero_moment(const Wavelet& w, double tol = 1e-9) {
    if (w.is_delta()) return {0, 1.0};
    const double width = w.support_width();
    double scale = tol * w.l1_norm();
    for (std::size_t k = 0; k <= 4; ++k) {
        const double m = w.moment(k);
        if (std::abs(m) > scale) return {k, m};
        scale *= width;
    }
    throw std::runtime_error("first_nonzero_moment: moments 0..4 all vanish; wavelet is unusable");
}

/// Virtual wavelet V(x) = -int_{-inf}^{x} (s-x)^{k-1}/(k-1)! W(s) ds, i.e.
/// (-1)^k times the k-fold antiderivative of W.  For a wavelet whose first
/// k-1 moments vanish, V is again compactly supported and integrates to
/// moment(W, k) / k!.
inline Wavelet virtual_wavelet(const Wavelet& w, std::size_t k) {
    if (k == 0)
        throw std::invalid_argument(
            "virtual_wavelet: k = 0 means the wavelet is not zero-mean; use the unmodified transform");
    if (w.is_delta())
        throw std::invalid_argument("virtual_wavelet: the impulse wavelet has nonzero mean");
    std::vector<double> v = w.samples();
    for (std::size_t pass = 0; pass < k; ++pass) v = cumulative_trapezoid(v, w.dt());
    if (k % 2 == 1)
        for (double& x : v) x = -x;
    return Wavelet(std::move(v), w.start(), w.dt());
}

inline Wavelet reversed(const Wavelet& w) {
    if (w.is_delta()) return w;
    std::vector<double> rev(w.samples().rbegin(), w.samples().rend());
    return Wavelet(std::move(rev), -w.support_hi(), w.dt());
}

/// W_b(x) = b * W(b x): samples scaled by b, positions by 1/b.  Leaves the
/// impulse unchanged.
inline Wavelet dilated(const Wavelet& w, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("dilated: b must be positive");
    if (w.is_delta()) return w;
    std::vector<double> s = w.samples();
    for (double& x : s) x *= b;
    return Wavelet(std::move(s), w.start() / b, w.dt() / b);
}

struct WaveletParams {
    double center = 0.0;
    double width = 0.05;      // Gaussian sigma
    double amplitude = 1.0;   // scales the unit-area bump (or its derivatives)
    double dt = 0.0;          // 0: width / 128
};

namespace detail {

inline std::vector<double> trim_tiny_tails(std::vector<double> s, double& start, double dt, double rel = 1e-12) {
    double peak = 0.0;
    for (double v : s) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return s;
    const double cut = rel * peak;
    std::size_t lo = 0;
    std::size_t hi = s.size();
    while (lo + 2 < hi && std::abs(s[lo]) < cut && std::abs(s[lo + 1]) < cut) ++lo;
    while (hi > lo + 2 && std::abs(s[hi - 1]) < cut && std::abs(s[hi - 2]) < cut) --hi;
    start += dt * static_cast<double>(lo);
    return {s.begin() + static_cast<std::ptrdiff_t>(lo), s.begin() + static_cast<std::ptrdiff_t>(hi)};
}

}  // namespace detail

/// Built-in waveforms: delta, gaussian, dgaussian, d2gaussian.  `amplitude`
/// multiplies the unit-area Gaussian g (so the gaussian has area = amplitude,
/// dgaussian has first moment = -amplitude, d2gaussian has second moment
/// = 2 * amplitude).  Samples with |W| < 1e-12 * max|W| are trimmed.
inline Wavelet builtin_wavelet(const std::string& name, const WaveletParams& params = {}) {
    if (name == "delta") {
        if (params.center != 0.0)
            throw std::invalid_argument("builtin_wavelet: the delta wavelet is centered at 0");
        return Wavelet::delta();
    }
    const double sigma = params.width;
    if (!(sigma > 0.0)) throw std::invalid_argument("builtin_wavelet: width must be positive");
    double dt = params.dt != 0.0 ? params.dt : sigma / 128.0;
    if (!(dt > 0.0)) throw std::invalid_argument("builtin_wavelet: dt must be positive");

    int order = -1;
    double reach = 0.0;
    if (name == "gaussian") {
        order = 0;
        reach = 8.0;
    } else if (name == "dgaussian") {
        order = 1;
        reach = 8.5;
    } else if (name == "d2gaussian") {
        order = 2;
        reach = 9.0;
    } else {
        throw std::invalid_argument("builtin_wavelet: unknown name '" + name + "'");
    }

    const double norm = params.amplitude / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const auto half = static_cast<std::size_t>(std::ceil(reach * sigma / dt));
    double start = params.center - dt * static_cast<double>(half);
    std::vector<double> s(2 * half + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double u = (start + dt * static_cast<double>(i) - params.center) / sigma;
        const double g = norm * std::exp(-0.5 * u * u);
        switch (order) {
            case 0: s[i] = g; break;
            case 1: s[i] = -u / sigma * g; break;
            default: s[i] = (u * u - 1.0) / (sigma * sigma) * g; break;
        }
    }
    s = detail::trim_tiny_tails(std::move(s), start, dt);
    return Wavelet(std::move(s), start, dt);
}

}  // namespace imped1d
