#pragma once

// Exact forward modeling of plane-wave reflection data for step media: the
// reflection Green's function as a finite delta train, convolution with a
// source wavelet, noise injection, pressure conversion and antiderivatives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "imped1d/media.hpp"
#include "imped1d/numerics.hpp"
#include "imped1d/wavelets.hpp"

namespace imped1d {

/// Finite sorted train of impulses (t_i, a_i) with t_i > 0 and a_i != 0;
/// the exact impulse response of a step medium.
class DeltaTrain {
public:
    struct Event {
        double time = 0.0;
        double amplitude = 0.0;
    };

    DeltaTrain() = default;

    /// Normalizing constructor: sorts, merges arrivals closer than
    /// `time_merge_tol`, and removes merged amplitudes below
    /// `prune_tol * max|a|`.
    DeltaTrain(std::vector<Event> events, double time_merge_tol = 1e-10, double prune_tol = 1e-14) {
        std::sort(events.begin(), events.end(),
                  [](const Event& a, const Event& b) { return a.time < b.time; });
        std::vector<Event> merged;
        merged.reserve(events.size());
        for (const Event& e : events) {
            if (!merged.empty() && e.time - merged.back().time <= time_merge_tol)
                merged.back().amplitude += e.amplitude;
            else
                merged.push_back(e);
        }
        double peak = 0.0;
        for (const Event& e : merged) peak = std::max(peak, std::abs(e.amplitude));
        const double cut = prune_tol * peak;
        for (const Event& e : merged) {
            if (std::abs(e.amplitude) <= cut) continue;
            if (!(e.time > 0.0)) throw std::invalid_argument("DeltaTrain: event times must be positive");
            events_.push_back(e);
        }
    }

    /// Trusts the caller to supply a strictly increasing, merged, pruned list.
    static DeltaTrain from_sorted(std::vector<Event> events) {
        DeltaTrain t;
        double prev = 0.0;
        for (const Event& e : events) {
            if (!(e.time > prev)) throw std::invalid_argument("DeltaTrain: events must be strictly increasing in time");
            prev = e.time;
        }
        t.events_ = std::move(events);
        return t;
    }

    const std::vector<Event>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    double first_time() const { return events_.empty() ? 0.0 : events_.front().time; }
    double last_time() const { return events_.empty() ? 0.0 : events_.back().time; }

    double amplitude_sum() const {
        double s = 0.0;
        for (const Event& e : events_) s += e.amplitude;
        return s;
    }

    double max_abs_amplitude() const {
        double m = 0.0;
        for (const Event& e : events_) m = std::max(m, std::abs(e.amplitude));
        return m;
    }

private:
    std::vector<Event> events_;
};

/// Uniformly sampled real time series.
struct SampledTrace {
    double start = 0.0;
    double dt = 0.0;
    std::vector<double> samples;

    SampledTrace() = default;
    SampledTrace(double start_, double dt_, std::vector<double> samples_)
        : start(start_), dt(dt_), samples(std::move(samples_)) {
        if (!(dt > 0.0)) throw std::invalid_argument("SampledTrace: dt must be positive");
    }

    std::size_t size() const { return samples.size(); }
    double time_at(std::size_t i) const { return start + dt * static_cast<double>(i); }
    double end_time() const { return samples.empty() ? start : time_at(samples.size() - 1); }
    double value_at(double t) const { return interp_uniform(samples, start, dt, t); }
};

/// Total reflection of a reflectivity sequence: tanh(sum_j artanh r_j), which
/// telescopes to (zeta_minus - zeta_plus) / (zeta_minus + zeta_plus).
inline double total_reflection(std::span<const double> reflectivities) {
    double s = 0.0;
    for (double r : reflectivities) {
        if (!(std::abs(r) < 1.0)) throw std::invalid_argument("total_reflection: |r| must be < 1");
        s += std::atanh(r);
    }
    return std::tanh(s);
}

struct GreensOptions {
    enum class Strategy { automatic, lattice, event_queue };
    Strategy strategy = Strategy::automatic;
    double prune_tol = 1e-14;        // relative to the running max |amplitude|
    double time_merge_tol = 1e-10;   // coincident-arrival merge window (seconds)
    double lattice_rel_tol = 1e-9;   // commensurability tolerance for gap ratios
    std::size_t max_lattice_cells = 4'000'000;
    double max_lattice_ops = 4e9;    // cells * steps budget before falling back
    std::size_t max_queue_events = 50'000'000;
};

namespace detail {

// Common one-way cell width dividing every inter-interface gap, or 0 when the
// gaps are incommensurate / the resulting lattice would be too large.
inline double lattice_base(std::span<const double> gaps, double span_scale, const GreensOptions& opt) {
    if (gaps.empty()) return 0.0;
    const double tol = opt.lattice_rel_tol * span_scale;
    double g = gaps[0];
    for (double d : gaps) {
        g = approx_gcd(g, d, tol);
        if (g <= tol) return 0.0;
    }
    for (double d : gaps) {
        const double m = std::round(d / g);
        if (m < 1.0 || std::abs(d - m * g) > tol) return 0.0;
    }
    return g;
}

// Two-phase lattice update over equal one-way cells spanning [x_1, x_n].
// Scattering at a boundary with reflectivity rho: a down-going wave reflects
// with rho and transmits with 1 + rho; an up-going wave reflects with -rho and
// transmits with 1 - rho.
inline DeltaTrain greens_lattice(std::span<const double> xs, std::span<const double> r, double t_max,
                                 double base, const GreensOptions& opt) {
    const double x1 = xs.front();
    const auto cells = static_cast<std::size_t>(std::llround((xs.back() - x1) / base));
    const double h = (xs.back() - x1) / static_cast<double>(cells);

    std::vector<double> rho(cells + 1, 0.0);
    for (std::size_t j = 0; j < xs.size(); ++j)
        rho[static_cast<std::size_t>(std::llround((xs[j] - x1) / h))] = r[j];

    std::vector<DeltaTrain::Event> events;
    events.push_back({2.0 * x1, r[0]});
    double run_max = std::abs(r[0]);

    std::vector<double> down(cells + 2, 0.0), up(cells + 2, 0.0);
    std::vector<double> ndown(cells + 2, 0.0), nup(cells + 2, 0.0);
    down[1] = 1.0 + rho[0];

    const auto max_steps = static_cast<long long>(std::floor((t_max - 2.0 * x1) / h + 1e-9));
    for (long long step = 1; step <= max_steps; ++step) {
        const double exit_amp = (1.0 - rho[0]) * up[1];
        ndown[1] = -rho[0] * up[1];
        for (std::size_t i = 1; i < cells; ++i) {
            ndown[i + 1] = (1.0 + rho[i]) * down[i] - rho[i] * up[i + 1];
            nup[i] = rho[i] * down[i] + (1.0 - rho[i]) * up[i + 1];
        }
        nup[cells] = rho[cells] * down[cells];

        double state_max = 0.0;
        for (std::size_t i = 1; i <= cells; ++i)
            state_max = std::max(state_max, std::max(std::abs(ndown[i]), std::abs(nup[i])));

        if (exit_amp != 0.0 && std::abs(exit_amp) > opt.prune_tol * run_max) {
            events.push_back({2.0 * x1 + h * static_cast<double>(step), exit_amp});
            run_max = std::max(run_max, std::abs(exit_amp));
        }
        down.swap(ndown);
        up.swap(nup);
        if (state_max <= opt.prune_tol * run_max && std::abs(exit_amp) <= opt.prune_tol * run_max) break;
    }

    // final relative prune (the running max may have grown after early events)
    const double cut = opt.prune_tol * run_max;
    std::vector<DeltaTrain::Event> kept;
    kept.reserve(events.size());
    for (const auto& e : events)
        if (std::abs(e.amplitude) > cut) kept.push_back(e);
    return DeltaTrain::from_sorted(std::move(kept));
}

// Event-driven scattering simulation for incommensurate layer times: a
// priority queue of wavefront arrivals keyed by (time, interface, direction),
// with coincident arrivals merged before scattering and amplitude pruning
// relative to the running maximum.
inline DeltaTrain greens_queue(std::span<const double> xs, std::span<const double> r, double t_max,
                               const GreensOptions& opt) {
    const auto n = xs.size();
    double min_gap = xs[0];
    for (std::size_t j = 0; j + 1 < n; ++j) min_gap = std::min(min_gap, xs[j + 1] - xs[j]);
    const double merge_tol = std::min(opt.time_merge_tol, 0.25 * min_gap);
    struct Front {
        double t;
        std::uint32_t iface;
        std::int8_t dir;  // +1 arriving from above (moving down), -1 from below (moving up)
        double amp;
    };
    struct Later {
        bool operator()(const Front& a, const Front& b) const {
            if (a.t != b.t) return a.t > b.t;
            if (a.iface != b.iface) return a.iface > b.iface;
            return a.dir > b.dir;
        }
    };
    std::priority_queue<Front, std::vector<Front>, Later> queue;
    std::vector<DeltaTrain::Event> records;
    double run_max = 0.0;
    std::size_t processed = 0;

    auto record = [&](double t, double amp) {
        if (t > t_max || amp == 0.0) return;
        records.push_back({t, amp});
        run_max = std::max(run_max, std::abs(amp));
    };
    auto push = [&](double t, std::uint32_t iface, std::int8_t dir, double amp) {
        if (amp == 0.0) return;
        if (t + xs[iface] > t_max) return;  // nothing it spawns can return in time
        queue.push({t, iface, dir, amp});
    };

    push(xs[0], 0, +1, 1.0);

    std::vector<Front> batch;
    while (!queue.empty()) {
        if (++processed > opt.max_queue_events)
            throw std::runtime_error("greens_function: event budget exceeded (raise max_queue_events or lower t_max)");
        batch.clear();
        batch.push_back(queue.top());
        queue.pop();
        const double t0 = batch.front().t;
        while (!queue.empty() && queue.top().t - t0 <= merge_tol) {
            batch.push_back(queue.top());
            queue.pop();
        }
        // merge per (interface, direction) before scattering
        std::sort(batch.begin(), batch.end(), [](const Front& a, const Front& b) {
            if (a.iface != b.iface) return a.iface < b.iface;
            return a.dir < b.dir;
        });
        for (std::size_t i = 0; i < batch.size();) {
            const std::uint32_t j = batch[i].iface;
            const std::int8_t dir = batch[i].dir;
            double amp = 0.0;
            while (i < batch.size() && batch[i].iface == j && batch[i].dir == dir) amp += batch[i++].amp;
            if (std::abs(amp) <= opt.prune_tol * run_max) continue;
            const double rj = r[j];
            if (dir > 0) {  // incident from above
                if (j == 0)
                    record(t0 + xs[0], amp * rj);
                else
                    push(t0 + (xs[j] - xs[j - 1]), j - 1, -1, amp * rj);
                if (j + 1 < n) push(t0 + (xs[j + 1] - xs[j]), j + 1, +1, amp * (1.0 + rj));
            } else {  // incident from below
                if (j == 0)
                    record(t0 + xs[0], amp * (1.0 - rj));
                else
                    push(t0 + (xs[j] - xs[j - 1]), j - 1, -1, amp * (1.0 - rj));
                if (j + 1 < n) push(t0 + (xs[j + 1] - xs[j]), j + 1, +1, amp * -rj);
            }
        }
    }
    return DeltaTrain(std::move(records), merge_tol, opt.prune_tol);
}

}  // namespace detail

/// Reflection Green's function of a step medium, as seen by a receiver at
/// x = 0, truncated at t_max.  Uses the uniform-cell lattice update when the
/// inter-interface gaps share a common base, otherwise an event-queue
/// simulation.  Both realize the same scattering rules and are deterministic.
inline DeltaTrain greens_function(const LayerStack& stack, double t_max, const GreensOptions& opt = {}) {
    if (stack.empty()) return {};
    const auto& xs = stack.interfaces();
    const auto& r = stack.reflectivities();
    for (double rj : r)
        if (!(std::abs(rj) < 1.0)) throw std::invalid_argument("greens_function: |r_j| must be < 1");
    if (t_max < 2.0 * xs.back())
        throw std::invalid_argument("greens_function: t_max misses the primary from the deepest interface");
    if (stack.size() == 1) return DeltaTrain::from_sorted({{2.0 * xs[0], r[0]}});

    std::vector<double> gaps(stack.size() - 1);
    for (std::size_t j = 0; j + 1 < stack.size(); ++j) gaps[j] = xs[j + 1] - xs[j];

    bool use_lattice = false;
    double base = 0.0;
    if (opt.strategy != GreensOptions::Strategy::event_queue) {
        base = detail::lattice_base(gaps, xs.back(), opt);
        if (base > 0.0) {
            const double cells = (xs.back() - xs.front()) / base;
            const double steps = (t_max - 2.0 * xs.front()) / base;
            use_lattice = cells <= static_cast<double>(opt.max_lattice_cells) &&
                          cells * steps <= opt.max_lattice_ops;
        }
        if (opt.strategy == GreensOptions::Strategy::lattice && !use_lattice)
            throw std::invalid_argument("greens_function: layer times have no usable common base for the lattice");
    }
    if (use_lattice) return detail::greens_lattice(xs, r, t_max, base, opt);
    return detail::greens_queue(xs, r, t_max, opt);
}

/// Negates every amplitude: the pressure-equation Green's function of the same
/// medium.  An involution.
inline DeltaTrain to_pressure(const DeltaTrain& g) {
    std::vector<DeltaTrain::Event> ev = g.events();
    for (auto& e : ev) e.amplitude = -e.amplitude;
    return DeltaTrain::from_sorted(std::move(ev));
}

inline SampledTrace negated(const SampledTrace& trace) {
    SampledTrace out = trace;
    for (double& v : out.samples) v = -v;
    return out;
}

/// Reflection data D(t) = sum_i a_i W(t_i - t), i.e. the reversed wavelet
/// convolved with the train, sampled on [start, t_max] with spacing dt.  The
/// wavelet is linearly interpolated at off-grid shifts.  Refuses the symbolic
/// impulse: convolution with it is the identity, so use the train directly.
inline SampledTrace convolve(const DeltaTrain& g, const Wavelet& w, double start, double dt, double t_max) {
    if (!(dt > 0.0)) throw std::invalid_argument("convolve: dt must be positive");
    if (w.is_delta())
        throw std::invalid_argument("convolve: impulse wavelet; use the delta train itself as data");
    const auto count = static_cast<std::size_t>(std::floor((t_max - start) / dt)) + 1;
    std::vector<double> out(count, 0.0);
    const double w_lo = w.support_lo();
    const double w_hi = w.support_hi();
    for (const auto& e : g.events()) {
        // W(t_i - t) != 0 for t in [t_i - w_hi, t_i - w_lo]
        const double lo = e.time - w_hi;
        const double hi = e.time - w_lo;
        auto first = static_cast<long long>(std::ceil((lo - start) / dt));
        auto last = static_cast<long long>(std::floor((hi - start) / dt));
        first = std::max<long long>(first, 0);
        last = std::min<long long>(last, static_cast<long long>(count) - 1);
        for (long long k = first; k <= last; ++k) {
            const double t = start + dt * static_cast<double>(k);
            out[static_cast<std::size_t>(k)] += e.amplitude * w(e.time - t);
        }
    }
    return {start, dt, std::move(out)};
}

/// Adds i.i.d. zero-mean Gaussian noise with standard deviation
/// level * max|trace| (peak-relative convention).  Deterministic per seed;
/// level = 0 returns the input unchanged.
inline SampledTrace add_noise(const SampledTrace& trace, double level, std::uint64_t seed) {
    if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
    if (level == 0.0 || trace.samples.empty()) return trace;
    double peak = 0.0;
    for (double v : trace.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return trace;
    SampledTrace out = trace;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, level * peak);
    for (double& v : out.samples) v += gauss(rng);
    return out;
}

/// k-fold antiderivative of a sampled trace by repeated cumulative trapezoid
/// integration (the trace is taken to vanish before its first sample).
inline SampledTrace antiderivative(const SampledTrace& trace, std::size_t k) {
    if (k == 0) throw std::invalid_argument("antiderivative: k must be >= 1 (k = 0 is the trace itself)");
    std::vector<double> v = trace.samples;
    for (std::size_t pass = 0; pass < k; ++pass) v = cumulative_trapezoid(v, trace.dt);
    return {trace.start, trace.dt, std::move(v)};
}

/// k-fold antiderivative of a delta train, evaluated exactly:
/// sum_{t_i <= t} a_i (t - t_i)^{k-1} / (k-1)!, sampled onto a uniform grid.
inline SampledTrace antiderivative(const DeltaTrain& g, std::size_t k, double start, double dt, double t_max) {
    if (k == 0) throw std::invalid_argument("antiderivative: k must be >= 1 (k = 0 is the train itself)");
    if (!(dt > 0.0)) throw std::invalid_argument("antiderivative: dt must be positive");
    double factorial = 1.0;
    for (std::size_t i = 2; i < k; ++i) factorial *= static_cast<double>(i);
    const auto count = static_cast<std::size_t>(std::floor((t_max - start) / dt)) + 1;
    std::vector<double> out(count, 0.0);
    for (const auto& e : g.events()) {
        auto first = static_cast<long long>(std::ceil((e.time - start) / dt - 1e-12));
        first = std::max<long long>(first, 0);
        for (long long i = first; i < static_cast<long long>(count); ++i) {
            const double t = start + dt * static_cast<double>(i);
            if (t < e.time) continue;
            const double u = t - e.time;
            out[static_cast<std::size_t>(i)] +=
                e.amplitude * (k == 1 ? 1.0 : std::pow(u, static_cast<double>(k - 1)) / factorial);
        }
    }
    return {start, dt, std::move(out)};
}

}  // namespace imped1d
