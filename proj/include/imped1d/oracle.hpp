#pragma once

// Brute-force validation of the forward model: depth-first enumeration of
// every bounce path in a small layered medium, and train-to-train comparison.
// Deliberately simple and independent of the lattice/queue recursion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "imped1d/forward.hpp"
#include "imped1d/media.hpp"

namespace imped1d {

/// All rays with at most `max_bounces` reflections arriving by `t_max`,
/// coincident arrivals merged.  Guarded to small media: n <= 6 interfaces and
/// max_bounces <= 14.
inline DeltaTrain enumerate_rays(const LayerStack& stack, int max_bounces, double t_max) {
    if (stack.size() > 6) throw std::invalid_argument("enumerate_rays: combinatorial guard, n <= 6");
    if (max_bounces > 14) throw std::invalid_argument("enumerate_rays: combinatorial guard, max_bounces <= 14");
    if (max_bounces < 1) throw std::invalid_argument("enumerate_rays: need at least one reflection");
    if (stack.empty()) return {};

    const auto& xs = stack.interfaces();
    const auto& r = stack.reflectivities();
    const auto n = stack.size();
    std::vector<DeltaTrain::Event> arrivals;

    // state: wavefront at interface j at time t with `bounces` reflections so
    // far; dir +1 means incident from above (moving down), -1 from below.
    struct Walker {
        const std::vector<double>& xs;
        const std::vector<double>& r;
        std::size_t n;
        int max_bounces;
        double t_max;
        std::vector<DeltaTrain::Event>& out;

        void visit(std::size_t j, int dir, double t, double amp, int bounces) {
            if (t + xs[j] > t_max) return;  // no continuation can return in time
            if (dir > 0) {
                // reflect upward (costs a bounce)
                if (bounces < max_bounces) {
                    const double a = amp * r[j];
                    if (j == 0)
                        record(t + xs[0], a);
                    else
                        visit(j - 1, -1, t + (xs[j] - xs[j - 1]), a, bounces + 1);
                }
                // transmit downward
                if (j + 1 < n) visit(j + 1, +1, t + (xs[j + 1] - xs[j]), amp * (1.0 + r[j]), bounces);
            } else {
                // transmit upward
                const double a = amp * (1.0 - r[j]);
                if (j == 0)
                    record(t + xs[0], a);
                else
                    visit(j - 1, -1, t + (xs[j] - xs[j - 1]), a, bounces);
                // reflect downward (costs a bounce)
                if (bounces < max_bounces && j + 1 < n)
                    visit(j + 1, +1, t + (xs[j + 1] - xs[j]), amp * -r[j], bounces + 1);
            }
        }

        void record(double t, double amp) {
            if (t <= t_max && amp != 0.0) out.push_back({t, amp});
        }
    };

    Walker walker{xs, r, n, max_bounces, t_max, arrivals};
    walker.visit(0, +1, xs[0], 1.0, 0);
    return DeltaTrain(std::move(arrivals), 1e-10, 0.0);
}

/// Result of matching two delta trains event-by-event.
struct TrainComparison {
    std::size_t matched = 0;
    std::size_t unmatched_significant = 0;   // unmatched events above amp_tol
    std::size_t unmatched_below_tol = 0;     // unmatched events at or below amp_tol
    double max_abs_amp_diff = 0.0;           // over matched pairs
    double max_rel_amp_diff = 0.0;           // over matched pairs with |b| > amp_tol
    double max_time_diff = 0.0;              // over matched pairs
    double sum_diff = 0.0;                   // difference of total amplitude sums

    bool clean() const { return unmatched_significant == 0; }
};

/// Matches events of `a` against `b` by time within time_tol (two-pointer over
/// the sorted trains).  Events with |amplitude| <= amp_tol never count as
/// significant mismatches.
inline TrainComparison compare(const DeltaTrain& a, const DeltaTrain& b, double time_tol, double amp_tol) {
    TrainComparison rep;
    const auto& ea = a.events();
    const auto& eb = b.events();
    std::size_t i = 0, j = 0;
    auto note_unmatched = [&](double amp) {
        if (std::abs(amp) > amp_tol)
            ++rep.unmatched_significant;
        else
            ++rep.unmatched_below_tol;
    };
    while (i < ea.size() && j < eb.size()) {
        const double dt = ea[i].time - eb[j].time;
        if (std::abs(dt) <= time_tol) {
            ++rep.matched;
            const double diff = std::abs(ea[i].amplitude - eb[j].amplitude);
            rep.max_abs_amp_diff = std::max(rep.max_abs_amp_diff, diff);
            if (std::abs(eb[j].amplitude) > amp_tol)
                rep.max_rel_amp_diff = std::max(rep.max_rel_amp_diff, diff / std::abs(eb[j].amplitude));
            rep.max_time_diff = std::max(rep.max_time_diff, std::abs(dt));
            ++i;
            ++j;
        } else if (dt < 0.0) {
            note_unmatched(ea[i++].amplitude);
        } else {
            note_unmatched(eb[j++].amplitude);
        }
    }
    while (i < ea.size()) note_unmatched(ea[i++].amplitude);
    while (j < eb.size()) note_unmatched(eb[j++].amplitude);
    rep.sum_diff = a.amplitude_sum() - b.amplitude_sum();
    return rep;
}

/// Horizon below which an enumeration with `max_bounces` reflections is
/// complete: every ray arriving earlier has at most that many reflections.
inline double bounce_complete_horizon(const LayerStack& stack, int max_bounces) {
    if (stack.size() < 2) return stack.empty() ? 0.0 : 2.0 * stack.interfaces()[0] + 1.0;
    const auto& xs = stack.interfaces();
    double min_gap = xs[1] - xs[0];
    for (std::size_t j = 1; j + 1 < stack.size(); ++j) min_gap = std::min(min_gap, xs[j + 1] - xs[j]);
    return 2.0 * xs[0] + static_cast<double>(max_bounces - 1) * min_gap;
}

/// Keep only events strictly before `horizon`.
inline DeltaTrain truncated(const DeltaTrain& g, double horizon) {
    std::vector<DeltaTrain::Event> kept;
    for (const auto& e : g.events()) {
        if (e.time >= horizon) break;
        kept.push_back(e);
    }
    return DeltaTrain::from_sorted(std::move(kept));
}

}  // namespace imped1d
