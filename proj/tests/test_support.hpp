#pragma once

// Shared random-medium generators for the property tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "imped1d/media.hpp"

namespace testgen {

// Step media with interfaces on a 0.02 grid (commensurate layer times) or at
// arbitrary positions.  Impedance follows a clamped log random walk over
// [0.2, 5]: wild independent draws form high-contrast cavities whose
// reverberation outlives any fixed multiple of the slab time, which would make
// truncated-sum checks meaningless.
inline imped1d::LayerStack random_stack(std::mt19937_64& rng, std::size_t max_n, bool on_grid,
                                        double walk_step = 0.45) {
    const std::size_t n = rng() % (max_n + 1);
    std::uniform_real_distribution<double> walk(-walk_step, walk_step);
    std::uniform_real_distribution<double> z0(std::log(0.2), std::log(5.0));
    std::vector<double> xs, vals;
    double x = 0.0;
    if (on_grid) {
        std::uniform_int_distribution<int> steps(1, 3);
        x = 0.02 * static_cast<double>(5 + static_cast<int>(rng() % 11));
        for (std::size_t j = 0; j < n; ++j) {
            xs.push_back(x);
            x += 0.02 * steps(rng);
        }
    } else {
        std::uniform_real_distribution<double> gap(0.05, 0.5);
        x = gap(rng);
        for (std::size_t j = 0; j < n; ++j) {
            xs.push_back(x);
            x += gap(rng);
        }
    }
    double lz = z0(rng);
    for (std::size_t j = 0; j <= n; ++j) {
        vals.push_back(std::exp(lz));
        lz = std::clamp(lz + walk(rng), std::log(0.2), std::log(5.0));
    }
    return imped1d::LayerStack(xs, vals);
}

}  // namespace testgen
