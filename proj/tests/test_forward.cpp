#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "imped1d/forward.hpp"
#include "imped1d/numerics.hpp"
#include "test_support.hpp"

using namespace imped1d;
using testgen::random_stack;

namespace {

LayerStack single_interface() { return LayerStack({1.0}, {1.0, 3.0}); }

// r1 = r2 = 0.5, tau1 = tau2 = 2
LayerStack two_interface_geometric() { return LayerStack({1.0, 2.0}, {9.0, 3.0, 1.0}); }

}  // namespace

TEST_CASE("delta train normalization") {
    DeltaTrain t({{2.0, 0.5}, {1.0, -0.25}, {2.0, 0.25}, {1.5, 1e-16}});
    REQUIRE(t.size() == 2);
    CHECK(t.events()[0].time == 1.0);
    CHECK(t.events()[0].amplitude == -0.25);
    CHECK(t.events()[1].time == 2.0);
    CHECK(t.events()[1].amplitude == 0.75);  // merged
    CHECK_THROWS_AS(DeltaTrain({{-1.0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(DeltaTrain::from_sorted({{2.0, 0.5}, {1.0, 0.5}}), std::invalid_argument);
}

TEST_CASE("total reflection") {
    CHECK(total_reflection(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(total_reflection(std::vector<double>{0.37, -0.37}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(total_reflection(std::vector<double>{}) == 0.0);
    CHECK_THROWS_AS(total_reflection(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("greens function: single interface") {
    const DeltaTrain g = greens_function(single_interface(), 10.0);
    REQUIRE(g.size() == 1);
    CHECK(g.events()[0].time == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g.events()[0].amplitude == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("greens function: two-interface multiple series") {
    // events (2, 0.5), (4, 0.375), then m-th multiple (1-r1^2) r2 (-r1 r2)^(m-1)
    for (auto strategy : {GreensOptions::Strategy::lattice, GreensOptions::Strategy::event_queue}) {
        GreensOptions opt;
        opt.strategy = strategy;
        const DeltaTrain g = greens_function(two_interface_geometric(), 20.0, opt);
        REQUIRE(g.size() >= 5);
        CHECK(g.events()[0].time == doctest::Approx(2.0));
        CHECK(g.events()[0].amplitude == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(g.events()[1].time == doctest::Approx(4.0));
        CHECK(g.events()[1].amplitude == doctest::Approx(0.375).epsilon(1e-14));
        CHECK(g.events()[2].amplitude == doctest::Approx(-0.09375).epsilon(1e-14));
        CHECK(g.events()[3].amplitude == doctest::Approx(0.0234375).epsilon(1e-14));
        for (std::size_t m = 1; m + 1 < g.size(); ++m) {
            const double want = 0.75 * 0.5 * std::pow(-0.25, static_cast<double>(m - 1));
            CHECK(g.events()[m].time == doctest::Approx(2.0 + 2.0 * static_cast<double>(m)));
            CHECK(g.events()[m].amplitude == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("greens function: guards") {
    CHECK(greens_function(LayerStack{}, 5.0).empty());
    CHECK_THROWS_AS(greens_function(single_interface(), 1.5), std::invalid_argument);
}

TEST_CASE("greens function: lattice and queue agree on commensurate stacks") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const LayerStack stack = random_stack(rng, 6, true);
        if (stack.empty()) continue;
        // off-lattice horizon so neither path faces a borderline last event
        const double t_max = 6.0 * stack.last_interface() + 0.0137;
        GreensOptions lat, que;
        lat.strategy = GreensOptions::Strategy::lattice;
        que.strategy = GreensOptions::Strategy::event_queue;
        const DeltaTrain a = greens_function(stack, t_max, lat);
        const DeltaTrain b = greens_function(stack, t_max, que);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.events()[i].time == doctest::Approx(b.events()[i].time).epsilon(1e-12));
            CHECK(a.events()[i].amplitude ==
                  doctest::Approx(b.events()[i].amplitude).epsilon(1e-11));
        }
    }
}

TEST_CASE("greens function: amplitude sum approaches the total reflection") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const LayerStack stack = random_stack(rng, 50, true);
        const double t_max = stack.empty() ? 1.0 : 40.0 * stack.last_interface();
        const DeltaTrain g = greens_function(stack, t_max);
        const double want = total_reflection(stack.reflectivities());
        CHECK(std::abs(g.amplitude_sum() - want) < 1e-8);
    }
}

TEST_CASE("greens function: causality and first arrival") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const LayerStack stack = random_stack(rng, 5, false);
        if (stack.empty()) continue;
        const DeltaTrain g = greens_function(stack, 8.0 * stack.last_interface());
        REQUIRE(!g.empty());
        const double x1 = stack.interfaces().front();
        CHECK(g.events().front().time == doctest::Approx(2.0 * x1).epsilon(1e-13));
        CHECK(g.events().front().amplitude ==
              doctest::Approx(stack.reflectivities().front()).epsilon(1e-13));
        for (const auto& e : g.events()) CHECK(e.time >= 2.0 * x1 - 1e-12);
    }
}

TEST_CASE("greens function: dilation maps times only") {
    std::mt19937_64 rng(17);
    const LayerStack stack = random_stack(rng, 6, true);
    REQUIRE(!stack.empty());
    const double b = 3.0;
    std::vector<double> xs2;
    for (double x : stack.interfaces()) xs2.push_back(x / b);
    const LayerStack scaled(xs2, stack.values());
    const double t_max = 10.0 * stack.last_interface();
    const DeltaTrain g1 = greens_function(stack, t_max);
    const DeltaTrain g2 = greens_function(scaled, t_max / b);
    REQUIRE(g1.size() == g2.size());
    for (std::size_t i = 0; i < g1.size(); ++i) {
        CHECK(g2.events()[i].time == doctest::Approx(g1.events()[i].time / b).epsilon(1e-12));
        CHECK(g2.events()[i].amplitude == doctest::Approx(g1.events()[i].amplitude).epsilon(1e-12));
    }
}

TEST_CASE("convolve") {
    SUBCASE("empty train gives a zero trace") {
        const SampledTrace d = convolve(DeltaTrain{}, builtin_wavelet("gaussian", {.width = 0.05}), 0.0, 0.01, 1.0);
        for (double v : d.samples) CHECK(v == 0.0);
    }
    SUBCASE("single event with a unit-area bump integrates to the amplitude") {
        const DeltaTrain g = DeltaTrain::from_sorted({{2.0, -0.5}});
        const Wavelet w = builtin_wavelet("gaussian", {.center = 0.0, .width = 0.05});
        const SampledTrace d = convolve(g, w, 0.0, 0.001, 4.0);
        CHECK(trapezoid(d.samples, d.dt) == doctest::Approx(-0.5).epsilon(1e-8));
    }
    SUBCASE("non-overlapping copies peak in proportion to the amplitudes") {
        const DeltaTrain g = DeltaTrain::from_sorted({{1.0, 0.2}, {3.0, -0.6}});
        const Wavelet w = builtin_wavelet("gaussian", {.center = 0.0, .width = 0.03});
        const SampledTrace d = convolve(g, w, 0.0, 0.001, 4.0);
        double peak_lo = 0.0, peak_hi = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double t = d.time_at(i);
            if (t < 2.0)
                peak_lo = std::max(peak_lo, std::abs(d.samples[i]));
            else
                peak_hi = std::max(peak_hi, std::abs(d.samples[i]));
        }
        CHECK(peak_hi / peak_lo == doctest::Approx(3.0).epsilon(1e-9));
    }
    SUBCASE("Fubini: trace integral = wavelet area times amplitude sum") {
        std::mt19937_64 rng(33);
        const LayerStack stack = random_stack(rng, 4, false);
        if (!stack.empty()) {
            const DeltaTrain g = greens_function(stack, 8.0 * stack.last_interface());
            const Wavelet w = builtin_wavelet("gaussian", {.center = 0.0, .width = 0.04, .amplitude = 1.7});
            const double t_hi = g.last_time() + w.support_hi() + 0.5;
            const double t_lo = -w.support_hi() - 0.5;
            const SampledTrace d = convolve(g, w, t_lo, 0.001, t_hi);
            CHECK(trapezoid(d.samples, d.dt) ==
                  doctest::Approx(moment(w, 0) * g.amplitude_sum()).epsilon(1e-6));
        }
    }
    SUBCASE("impulse wavelet is refused") {
        CHECK_THROWS_AS(convolve(DeltaTrain::from_sorted({{1.0, 1.0}}), Wavelet::delta(), 0.0, 0.01, 2.0),
                        std::invalid_argument);
    }
}

TEST_CASE("add_noise") {
    std::vector<double> s(20000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.01 * static_cast<double>(i));
    const SampledTrace clean{0.0, 0.001, s};

    SUBCASE("level zero is the identity") {
        const SampledTrace out = add_noise(clean, 0.0, 99);
        CHECK(out.samples == clean.samples);
    }
    SUBCASE("deterministic per seed") {
        const SampledTrace a = add_noise(clean, 0.1, 42);
        const SampledTrace b = add_noise(clean, 0.1, 42);
        const SampledTrace c = add_noise(clean, 0.1, 43);
        CHECK(a.samples == b.samples);
        CHECK(a.samples != c.samples);
    }
    SUBCASE("sample standard deviation matches the requested level") {
        const SampledTrace noisy = add_noise(clean, 0.1, 7);
        double sum2 = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double d = noisy.samples[i] - clean.samples[i];
            sum2 += d * d;
        }
        const double sd = std::sqrt(sum2 / static_cast<double>(s.size()));
        CHECK(sd == doctest::Approx(0.1).epsilon(0.05));  // peak amplitude is 1
    }
    SUBCASE("negative level is rejected") { CHECK_THROWS_AS(add_noise(clean, -0.1, 1), std::invalid_argument); }
}

TEST_CASE("to_pressure negates amplitudes and is an involution") {
    const DeltaTrain g = DeltaTrain::from_sorted({{2.0, -0.5}, {3.0, 0.125}});
    const DeltaTrain p = to_pressure(g);
    CHECK(p.events()[0].amplitude == 0.5);
    CHECK(p.events()[1].amplitude == -0.125);
    const DeltaTrain back = to_pressure(p);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(back.events()[i].time == g.events()[i].time);
        CHECK(back.events()[i].amplitude == g.events()[i].amplitude);
    }
    CHECK(to_pressure(DeltaTrain{}).empty());
}

TEST_CASE("antiderivative of a delta train") {
    const DeltaTrain g = DeltaTrain::from_sorted({{2.0, 1.0}});
    SUBCASE("k = 1 is a unit step") {
        const SampledTrace s = antiderivative(g, 1, 0.0, 0.25, 4.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double t = s.time_at(i);
            CHECK(s.samples[i] == (t >= 2.0 ? 1.0 : 0.0));
        }
    }
    SUBCASE("k = 2 is a ramp") {
        const SampledTrace s = antiderivative(g, 2, 0.0, 0.25, 4.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double t = s.time_at(i);
            CHECK(s.samples[i] == doctest::Approx(std::max(0.0, t - 2.0)).epsilon(1e-14));
        }
    }
    SUBCASE("k = 0 is rejected") {
        CHECK_THROWS_AS(antiderivative(g, 0, 0.0, 0.25, 4.0), std::invalid_argument);
        CHECK_THROWS_AS(antiderivative(SampledTrace{0.0, 0.1, {1.0, 2.0}}, 0), std::invalid_argument);
    }
}

TEST_CASE("antiderivative of a trace differentiates back") {
    // zero-mean data: derivative of the 1-fold antiderivative recovers the trace to O(dt^2)
    const Wavelet w = builtin_wavelet("dgaussian", {.center = 0.0, .width = 0.05});
    const DeltaTrain g = DeltaTrain::from_sorted({{1.0, 0.4}, {1.7, -0.3}});
    const SampledTrace d = convolve(g, w, 0.0, 0.002, 3.0);
    const SampledTrace anti = antiderivative(d, 1);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < anti.size(); ++i) {
        const double deriv = (anti.samples[i + 1] - anti.samples[i - 1]) / (2.0 * anti.dt);
        worst = std::max(worst, std::abs(deriv - d.samples[i]));
    }
    double peak = 0.0;
    for (double v : d.samples) peak = std::max(peak, std::abs(v));
    CHECK(worst < 1e-3 * peak);

    SUBCASE("all-zero trace stays zero for any k") {
        const SampledTrace z{0.0, 0.1, std::vector<double>(32, 0.0)};
        for (std::size_t k : {1, 2, 3}) {
            const SampledTrace a = antiderivative(z, k);
            for (double v : a.samples) CHECK(v == 0.0);
        }
    }
}
