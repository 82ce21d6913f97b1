#pragma once

// Experiment runner behind the CLI: JSON config parsing and validation, the
// built-in profile suite, and the simulate / invert / compare / verify /
// reproduce-figures drivers.  Everything is driven by a resolved Experiment so
// runs are reproducible bit for bit from (config, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "imped1d/forward.hpp"
#include "imped1d/io.hpp"
#include "imped1d/media.hpp"
#include "imped1d/oracle.hpp"
#include "imped1d/svg.hpp"
#include "imped1d/transforms.hpp"
#include "imped1d/wavelets.hpp"

namespace imped1d {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration; the CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A failed verification; the CLI maps this to exit code 2.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResolvedProfile {
    std::string name;
    ImpedanceProfile profile;
    std::optional<LayerStack> exact_stack;  // set when the profile is a step medium
};

// ---------------------------------------------------------------------------
// built-in profile suite
// ---------------------------------------------------------------------------

namespace detail {

inline ImpedanceProfile step_profile(std::vector<double> interfaces, std::vector<double> values,
                                     double x_minus, double x_plus) {
    auto eval = [interfaces, values](double x) {
        std::size_t j = 0;
        while (j < interfaces.size() && x >= interfaces[j]) ++j;
        return values[j];
    };
    return {eval, x_minus, x_plus, values.front(), values.back()};
}

}  // namespace detail

/// P1: blocky three-layer medium with a thin high-contrast bed on top and an
/// overall far-side contrast of 5.2 (in excess of 4:1).
inline ResolvedProfile profile_P1() {
    std::vector<double> xs{0.4, 0.42, 0.8, 1.2};
    std::vector<double> vals{1.0, 2.0, 5.1, 5.15, 5.2};
    LayerStack stack(xs, vals);
    return {"P1", detail::step_profile(xs, vals, 0.4, 1.2), stack};
}

/// P2: smooth ramp up to about 3 and back down early in the slab, ending near
/// the starting impedance.
inline ResolvedProfile profile_P2() {
    auto eval = [](double x) {
        const double u = (x - 0.5) / 0.3;
        if (u >= 1.0) return 1.06;
        const double s = std::sin(std::numbers::pi * u);
        return 1.0 + 2.0 * s * s + 0.06 * u;
    };
    return {"P2", ImpedanceProfile(eval, 0.5, 1.4, 1.0, 1.06), std::nullopt};
}

/// P3: low-contrast oscillatory stack of 24 thin layers with a slight trend.
inline ResolvedProfile profile_P3() {
    std::vector<double> xs(24);
    std::vector<double> vals(25);
    for (std::size_t j = 0; j < 24; ++j) xs[j] = 0.4 + 0.025 * static_cast<double>(j);
    for (std::size_t j = 0; j < 25; ++j) {
        const double u = static_cast<double>(j) / 24.0;
        vals[j] = 1.0 + 0.08 * std::sin(6.0 * std::numbers::pi * u) + 0.05 * u;
    }
    LayerStack stack(xs, vals);
    return {"P3", detail::step_profile(xs, vals, 0.4, 1.2), stack};
}

/// P4: mixed smooth-plus-blocky medium with far-side contrast 3: a smooth rise
/// to 2, a short plateau, then a sharp jump to 3.  Sits deeper than the other
/// profiles, which leaves room for wide source wavelets.
inline ResolvedProfile profile_P4() {
    auto eval = [](double x) {
        if (x < 1.2) {
            const double s = std::sin(0.5 * std::numbers::pi * (x - 1.0) / 0.2);
            return 1.0 + s * s;
        }
        if (x < 1.25) return 2.0;
        return 3.0;
    };
    return {"P4", ImpedanceProfile(eval, 1.0, 1.7, 1.0, 3.0), std::nullopt};
}

inline const std::vector<std::string>& builtin_profile_names() {
    static const std::vector<std::string> names{"P1", "P2", "P3", "P4"};
    return names;
}

inline ResolvedProfile builtin_profile(const std::string& name) {
    if (name == "P1") return profile_P1();
    if (name == "P2") return profile_P2();
    if (name == "P3") return profile_P3();
    if (name == "P4") return profile_P4();
    throw ConfigError("unknown builtin profile '" + name + "' (choose one of P1, P2, P3, P4)");
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    nlohmann::json profile = "P4";          // builtin name or spec object
    double delta = 0.0;                     // step discretization; 0 = slab width / 1000
    nlohmann::json wavelet = "delta";       // builtin name, spec object, or {"csv": path}
    double noise_level = 0.0;
    std::uint64_t seed = 1;
    double t_max = 0.0;                     // 0 = auto
    double dt = 0.0;                        // 0 = auto from the wavelet
    double trace_start = 0.0;               // only meaningful for sampled sources; 0 = auto
    std::vector<std::string> methods{"refined", "classical"};
    double grid_x_max = 0.0;                // 0 = auto
    std::size_t grid_points = 1200;
    std::string out_dir = "out";
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("profile")) cfg.profile = j.at("profile");
        if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
        if (j.contains("wavelet")) cfg.wavelet = j.at("wavelet");
        if (j.contains("noise")) {
            const auto& n = j.at("noise");
            if (n.contains("level")) cfg.noise_level = n.at("level").get<double>();
            if (n.contains("seed")) cfg.seed = n.at("seed").get<std::uint64_t>();
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("recording")) {
            const auto& r = j.at("recording");
            if (r.contains("t_max")) cfg.t_max = r.at("t_max").get<double>();
            if (r.contains("dt")) cfg.dt = r.at("dt").get<double>();
            if (r.contains("start")) cfg.trace_start = r.at("start").get<double>();
        }
        if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            if (g.contains("x_max")) cfg.grid_x_max = g.at("x_max").get<double>();
            if (g.contains("points")) cfg.grid_points = g.at("points").get<std::size_t>();
        }
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return config_from_json(j);
}

namespace detail {

inline ResolvedProfile resolve_profile(const nlohmann::json& spec) {
    if (spec.is_string()) return builtin_profile(spec.get<std::string>());
    if (!spec.is_object()) throw ConfigError("profile: expected a builtin name or an object");
    try {
        if (spec.contains("family")) {
            const std::string family = spec.at("family").get<std::string>();
            if (family == "constant") {
                const double value = spec.at("value").get<double>();
                return {"constant", ImpedanceProfile::constant(value, spec.value("x_minus", 1.0),
                                                               spec.value("x_plus", 2.0)),
                        LayerStack({}, {value})};
            }
            const double a = spec.at("x_minus").get<double>();
            const double b = spec.at("x_plus").get<double>();
            if (family == "ramp") {
                const double z0 = spec.at("zeta_minus").get<double>();
                const double z1 = spec.at("zeta_plus").get<double>();
                if (spec.contains("peak")) {
                    const double peak = spec.at("peak").get<double>();
                    auto eval = [=](double x) {
                        const double u = (x - a) / (b - a);
                        const double s = std::sin(std::numbers::pi * u);
                        return z0 + (z1 - z0) * u + (peak - z0) * s * s;
                    };
                    return {"ramp", ImpedanceProfile(eval, a, b, z0, z1), std::nullopt};
                }
                auto eval = [=](double x) { return z0 + (z1 - z0) * (x - a) / (b - a); };
                return {"ramp", ImpedanceProfile(eval, a, b, z0, z1), std::nullopt};
            }
            if (family == "gaussian-bump") {
                const double base = spec.at("base").get<double>();
                const double amp = spec.at("amplitude").get<double>();
                const double center = spec.value("center", 0.5 * (a + b));
                const double width = spec.value("width", (b - a) / 8.0);
                auto eval = [=](double x) {
                    const double u = (x - center) / width;
                    return base + amp * std::exp(-0.5 * u * u);
                };
                return {"gaussian-bump", ImpedanceProfile(eval, a, b, base, base), std::nullopt};
            }
            if (family == "oscillatory") {
                const double base = spec.at("base").get<double>();
                const double amp = spec.at("amplitude").get<double>();
                const double cycles = spec.value("cycles", 3.0);
                const double drift = spec.value("drift", 0.0);
                auto eval = [=](double x) {
                    const double u = (x - a) / (b - a);
                    return base + drift * u + amp * std::sin(2.0 * std::numbers::pi * cycles * u);
                };
                return {"oscillatory", ImpedanceProfile(eval, a, b, base, base + drift), std::nullopt};
            }
            if (family == "blocky") {
                const auto xs = spec.at("interfaces").get<std::vector<double>>();
                const auto vals = spec.at("values").get<std::vector<double>>();
                LayerStack stack(xs, vals);
                const double xm = spec.value("x_minus", xs.front());
                const double xp = spec.value("x_plus", xs.back() * (1.0 + 1e-9) + 1e-12);
                return {"blocky", step_profile(xs, vals, xm, xp), stack};
            }
            throw ConfigError("profile: unknown family '" + family + "'");
        }
        if (spec.contains("step_table")) {
            const auto& t = spec.at("step_table");
            const auto xs = t.at("x").get<std::vector<double>>();
            const auto vals = t.at("zeta").get<std::vector<double>>();
            LayerStack stack(xs, vals);
            const double xm = spec.value("x_minus", xs.front());
            const double xp = spec.value("x_plus", xs.back() * (1.0 + 1e-9) + 1e-12);
            return {"step-table", step_profile(xs, vals, xm, xp), stack};
        }
        if (spec.contains("linear_table")) {
            const auto& t = spec.at("linear_table");
            const auto xs = t.at("x").get<std::vector<double>>();
            const auto vals = t.at("zeta").get<std::vector<double>>();
            if (xs.size() != vals.size() || xs.size() < 2)
                throw ConfigError("linear_table: need matching x and zeta arrays with >= 2 entries");
            auto eval = [xs, vals](double x) {
                auto it = std::upper_bound(xs.begin(), xs.end(), x);
                if (it == xs.begin()) return vals.front();
                if (it == xs.end()) return vals.back();
                const auto i = static_cast<std::size_t>(it - xs.begin());
                const double f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                return vals[i - 1] + f * (vals[i] - vals[i - 1]);
            };
            return {"linear-table", ImpedanceProfile(eval, xs.front(), xs.back(), vals.front(), vals.back()),
                    std::nullopt};
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("profile spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("profile spec: ") + e.what());
    }
    throw ConfigError("profile: expected 'family', 'step_table' or 'linear_table'");
}

inline Wavelet resolve_wavelet(const nlohmann::json& spec, std::string& name_out) {
    try {
        if (spec.is_string()) {
            name_out = spec.get<std::string>();
            if (name_out == "delta") return Wavelet::delta();
            // default width keeps the support well left of the built-in slabs
            return builtin_wavelet(name_out, {.center = 0.0, .width = 0.045});
        }
        if (spec.is_object()) {
            if (spec.contains("csv")) {
                name_out = "csv:" + spec.at("csv").get<std::string>();
                return read_wavelet_csv(spec.at("csv").get<std::string>());
            }
            name_out = spec.at("name").get<std::string>();
            WaveletParams p;
            p.center = spec.value("center", 0.0);
            p.width = spec.value("width", 0.05);
            p.amplitude = spec.value("amplitude", 1.0);
            p.dt = spec.value("dt", 0.0);
            return builtin_wavelet(name_out, p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("wavelet spec: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("wavelet spec: ") + e.what());
    }
    throw ConfigError("wavelet: expected a builtin name or an object");
}

/// Full width of |W| at half its maximum, from the samples.
inline double main_lobe_width(const Wavelet& w) {
    const auto& s = w.samples();
    double peak = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i]) > peak) {
            peak = std::abs(s[i]);
            at = i;
        }
    if (peak == 0.0) return w.support_width();
    std::size_t lo = at, hi = at;
    while (lo > 0 && std::abs(s[lo]) > 0.5 * peak) --lo;
    while (hi + 1 < s.size() && std::abs(s[hi]) > 0.5 * peak) ++hi;
    return w.dt() * static_cast<double>(hi - lo);
}

}  // namespace detail

/// A config resolved against the profile/wavelet registries with every
/// defaulted quantity filled in; the unit all drivers run on.
struct Experiment {
    ExperimentConfig config;
    ResolvedProfile prof;
    LayerStack stack;            // exact step medium, or the delta-discretization
    Wavelet wavelet;
    std::string wavelet_name;
    double delta = 0.0;
    double t_max = 0.0;
    double dt = 0.0;
    double trace_start = 0.0;
    double grid_x_max = 0.0;
    std::vector<double> grid;    // estimate grid (one-way travel time)

    double support_reach() const {
        return wavelet.is_delta() ? 0.0 : std::max(std::abs(wavelet.support_lo()), std::abs(wavelet.support_hi()));
    }
    /// Far-side evaluation point: past the slab, the wavelet and a quarter-slab margin.
    double far_eval_point() const {
        const double xp = prof.profile.x_plus();
        return xp + support_reach() + 0.25 * prof.profile.slab_width();
    }
};

inline Experiment resolve(const ExperimentConfig& cfg) {
    Experiment e{cfg, detail::resolve_profile(cfg.profile), LayerStack{}, Wavelet::delta(), "", 0, 0, 0, 0, 0, {}};
    e.wavelet = detail::resolve_wavelet(cfg.wavelet, e.wavelet_name);

    const ImpedanceProfile& p = e.prof.profile;
    e.delta = cfg.delta > 0.0 ? cfg.delta : p.slab_width() / 1000.0;
    e.stack = e.prof.exact_stack ? *e.prof.exact_stack : discretize(p, e.delta);

    if (!e.wavelet.is_delta() && e.wavelet.support_hi() >= p.x_minus())
        throw ConfigError("wavelet support must lie left of the slab: support ends at " +
                          format_double(e.wavelet.support_hi()) + " but the slab starts at " +
                          format_double(p.x_minus()));

    e.grid_x_max = cfg.grid_x_max > 0.0 ? cfg.grid_x_max : 1.05 * e.far_eval_point();
    e.t_max = cfg.t_max > 0.0 ? cfg.t_max : 2.0 * e.grid_x_max + e.support_reach() + 0.1;
    if (e.t_max <= 2.0 * p.x_plus())
        throw ConfigError("recording too short: t_max = " + format_double(e.t_max) +
                          " but the slab needs t_max > " + format_double(2.0 * p.x_plus()));

    if (!e.wavelet.is_delta()) {
        const double lobe = detail::main_lobe_width(e.wavelet);
        e.dt = cfg.dt > 0.0 ? cfg.dt : lobe / 16.0;
        if (e.dt > lobe / 8.0)
            throw ConfigError("dt = " + format_double(e.dt) + " undersamples the wavelet (main lobe " +
                              format_double(lobe) + " needs dt <= " + format_double(lobe / 8.0) + ")");
        const double first_arrival = e.stack.empty() ? e.t_max : 2.0 * e.stack.interfaces().front();
        e.trace_start = cfg.trace_start != 0.0
                            ? cfg.trace_start
                            : std::min(0.0, first_arrival - e.wavelet.support_hi() - 2.0 * e.dt);
    } else {
        if (cfg.noise_level > 0.0)
            throw ConfigError("noise requires a sampled source wavelet; the ideal impulse has no trace to perturb");
        e.dt = cfg.dt;
        e.trace_start = cfg.trace_start;
    }

    if (cfg.grid_points < 2) throw ConfigError("grid: need at least 2 points");
    e.grid.resize(cfg.grid_points);
    for (std::size_t i = 0; i < cfg.grid_points; ++i)
        e.grid[i] = e.grid_x_max * static_cast<double>(i + 1) / static_cast<double>(cfg.grid_points);

    const std::vector<std::string> known{"refined", "classical", "modified", "pressure-refined",
                                         "pressure-classical"};
    for (const auto& m : cfg.methods)
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw ConfigError("unknown method '" + m + "'");
    if (cfg.noise_level < 0.0) throw ConfigError("noise level must be >= 0");
    return e;
}

/// Canonical config echo used for hashing and metadata (out_dir excluded so a
/// rerun into a different directory stays byte-identical).
inline nlohmann::json canonical_config(const Experiment& e) {
    nlohmann::json j;
    j["profile"] = e.config.profile;
    j["profile_name"] = e.prof.name;
    j["delta"] = e.delta;
    j["wavelet"] = e.config.wavelet;
    j["wavelet_name"] = e.wavelet_name;
    j["noise"] = {{"level", e.config.noise_level}, {"seed", e.config.seed}};
    j["recording"] = {{"t_max", e.t_max}, {"dt", e.dt}, {"start", e.trace_start}};
    j["methods"] = e.config.methods;
    j["grid"] = {{"x_max", e.grid_x_max}, {"points", e.config.grid_points}};
    return j;
}

// ---------------------------------------------------------------------------
// drivers
// ---------------------------------------------------------------------------

struct SimulationArtifacts {
    DeltaTrain greens;
    std::optional<SampledTrace> clean;
    std::optional<SampledTrace> noisy;
};

inline SimulationArtifacts run_forward(const Experiment& e) {
    SimulationArtifacts art;
    art.greens = greens_function(e.stack, e.t_max);
    if (!e.wavelet.is_delta()) {
        art.clean = convolve(art.greens, e.wavelet, e.trace_start, e.dt, e.t_max);
        if (e.config.noise_level > 0.0)
            art.noisy = add_noise(*art.clean, e.config.noise_level, e.config.seed);
    }
    return art;
}

inline nlohmann::json base_metadata(const Experiment& e) {
    const nlohmann::json cfg = canonical_config(e);
    nlohmann::json meta;
    meta["tool"] = "imped1d";
    meta["version"] = kVersion;
    meta["config"] = cfg;
    meta["config_hash"] = fnv1a_hex(cfg.dump());
    meta["noise_convention"] = "std dev = level * max|clean trace| (peak-relative), i.i.d. Gaussian, mt19937_64";
    meta["stack"] = {{"interfaces", e.stack.size()},
                     {"zeta_minus", e.stack.zeta_minus()},
                     {"zeta_plus", e.stack.zeta_plus()}};
    return meta;
}

/// Writes profile, Green's function, data traces and metadata into out_dir.
inline SimulationArtifacts simulate(const Experiment& e, const std::filesystem::path& out_dir) {
    SimulationArtifacts art = run_forward(e);
    std::filesystem::create_directories(out_dir);
    write_profile_csv(out_dir / "profile.csv", e.prof.profile, e.grid);
    write_delta_train_csv(out_dir / "greens.csv", art.greens);
    nlohmann::json meta = base_metadata(e);
    meta["files"] = nlohmann::json::array({"profile.csv", "greens.csv"});
    auto trace_sidecar = [&](const SampledTrace& t, double level) {
        nlohmann::json side;
        side["dt"] = t.dt;
        side["start"] = t.start;
        side["samples"] = t.size();
        side["noise_level"] = level;
        side["seed"] = e.config.seed;
        side["config_hash"] = meta["config_hash"];
        side["version"] = kVersion;
        return side;
    };
    if (art.clean) {
        write_trace_csv(out_dir / "data_clean.csv", *art.clean);
        write_json(out_dir / "data_clean.csv.meta.json", trace_sidecar(*art.clean, 0.0));
        meta["files"].push_back("data_clean.csv");
    }
    if (art.noisy) {
        write_trace_csv(out_dir / "data_noisy.csv", *art.noisy);
        write_json(out_dir / "data_noisy.csv.meta.json", trace_sidecar(*art.noisy, e.config.noise_level));
        meta["files"].push_back("data_noisy.csv");
    }
    write_json(out_dir / "metadata.json", meta);
    return art;
}

struct InversionResult {
    std::vector<ImpedanceEstimate> estimates;
    std::vector<std::string> executed;  // method tag per estimate
    std::vector<std::string> notices;
};

/// Runs every requested method against the simulated data (the noisy trace
/// when noise is enabled).  A `refined` request with a zero-mean source is
/// redirected to the modified transform with a notice.
inline InversionResult run_inversion(const Experiment& e, const SimulationArtifacts& art) {
    InversionResult out;
    const double c = e.stack.zeta_minus();
    const SampledTrace* data = art.noisy ? &*art.noisy : (art.clean ? &*art.clean : nullptr);
    const bool impulse = e.wavelet.is_delta();
    const FirstMoment fm = impulse ? FirstMoment{0, 1.0} : first_nonzero_moment(e.wavelet);

    auto push = [&](ImpedanceEstimate est, const std::string& tag) {
        out.estimates.push_back(std::move(est));
        out.executed.push_back(tag);
    };

    for (const std::string& m : e.config.methods) {
        if (m == "refined") {
            if (impulse) {
                push(refined_transform(art.greens, 1.0, c, e.grid), "refined");
            } else if (fm.index == 0) {
                push(refined_transform(*data, fm.value, c, e.grid), "refined");
            } else {
                out.notices.push_back("refined: source wavelet is zero-mean; running the modified transform (k=" +
                                      std::to_string(fm.index) + ") instead");
                push(modified_transform(*data, e.wavelet, c, e.grid), "modified");
            }
        } else if (m == "classical") {
            if (impulse)
                push(classical_estimate(art.greens, c, e.grid), "classical");
            else
                push(classical_estimate(*data, c, e.grid), "classical");
        } else if (m == "modified") {
            if (impulse || fm.index == 0)
                throw ConfigError("modified: source wavelet has nonzero mean; request 'refined' instead");
            push(modified_transform(*data, e.wavelet, c, e.grid), "modified");
        } else if (m == "pressure-refined") {
            if (impulse) {
                push(pressure_refined(to_pressure(art.greens), 1.0, c, e.grid), "pressure-refined");
            } else if (fm.index == 0) {
                push(pressure_refined(negated(*data), fm.value, c, e.grid), "pressure-refined");
            } else {
                out.notices.push_back(
                    "pressure-refined: zero-mean source; running the modified transform on the velocity-equivalent data");
                push(modified_transform(*data, e.wavelet, c, e.grid), "modified");
            }
        } else if (m == "pressure-classical") {
            if (impulse)
                push(pressure_classical(to_pressure(art.greens), c, e.grid), "pressure-classical");
            else
                push(pressure_classical(negated(*data), c, e.grid), "pressure-classical");
        }
    }
    return out;
}

/// Writes per-method estimate CSVs plus an overlay plot of the true profile
/// and the recovered curves.
inline InversionResult invert(const Experiment& e, const std::filesystem::path& out_dir) {
    SimulationArtifacts art = run_forward(e);
    InversionResult inv = run_inversion(e, art);
    std::filesystem::create_directories(out_dir);

    nlohmann::json meta = base_metadata(e);
    meta["files"] = nlohmann::json::array();
    for (std::size_t i = 0; i < inv.estimates.size(); ++i) {
        const std::string file = "estimate_" + inv.executed[i] + ".csv";
        write_estimate_csv(out_dir / file, inv.estimates[i]);
        nlohmann::json side = base_metadata(e);
        side["method"] = method_name(inv.estimates[i].method);
        side["params"] = {{"weight", inv.estimates[i].params.weight},
                          {"c", inv.estimates[i].params.c},
                          {"k", inv.estimates[i].params.moment_index}};
        write_json(out_dir / (file + ".meta.json"), side);
        meta["files"].push_back(file);
    }
    meta["notices"] = inv.notices;
    write_json(out_dir / "inversion.json", meta);

    SvgPlot plot("Impedance recovery: " + e.prof.name + " (" + e.wavelet_name + " source)",
                 "one-way travel time", "impedance");
    std::vector<double> truth(e.grid.size());
    for (std::size_t i = 0; i < e.grid.size(); ++i) truth[i] = e.prof.profile(e.grid[i]);
    plot.add_series("true profile", e.grid, truth, "#000000", 1.8);
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t i = 0; i < inv.estimates.size(); ++i)
        plot.add_series(inv.executed[i], inv.estimates[i].x, inv.estimates[i].value, colors[i % 5], 1.4,
                        inv.executed[i].find("classical") != std::string::npos);
    plot.write(out_dir / "overlay.svg");
    return inv;
}

struct DataInversionOptions {
    std::vector<std::string> methods{"refined", "classical"};
    double c = 1.0;              // impedance above the slab
    std::vector<double> grid;    // empty: derived from the data
};

namespace detail {

inline void write_data_inversion(const InversionResult& inv, const std::filesystem::path& out_dir,
                                 const std::string& source_name) {
    std::filesystem::create_directories(out_dir);
    SvgPlot plot("Impedance recovery from " + source_name, "one-way travel time", "impedance");
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    for (std::size_t i = 0; i < inv.estimates.size(); ++i) {
        write_estimate_csv(out_dir / ("estimate_" + inv.executed[i] + ".csv"), inv.estimates[i]);
        plot.add_series(inv.executed[i], inv.estimates[i].x, inv.estimates[i].value, colors[i % 5], 1.4,
                        inv.executed[i].find("classical") != std::string::npos);
    }
    plot.write(out_dir / "overlay.svg");
}

}  // namespace detail

/// Inversion straight from an impulse-response file (no config, no profile).
inline InversionResult invert_train_data(const DeltaTrain& g, const DataInversionOptions& opt) {
    InversionResult out;
    std::vector<double> grid = opt.grid.empty() ? default_estimate_grid(g) : opt.grid;
    for (const std::string& m : opt.methods) {
        if (m == "refined") {
            out.estimates.push_back(refined_transform(g, 1.0, opt.c, grid));
        } else if (m == "classical") {
            out.estimates.push_back(classical_estimate(g, opt.c, grid));
        } else if (m == "pressure-refined") {
            out.estimates.push_back(pressure_refined(g, 1.0, opt.c, grid));
        } else if (m == "pressure-classical") {
            out.estimates.push_back(pressure_classical(g, opt.c, grid));
        } else {
            throw ConfigError("invert from an impulse response supports refined, classical and the pressure "
                              "variants; got '" + m + "'");
        }
        out.executed.push_back(m);
    }
    return out;
}

/// Inversion straight from a recorded trace.  Without a wavelet the trace is
/// treated as deconvolved data (unit source area); with a zero-mean wavelet a
/// `refined` request is redirected to the modified transform.
inline InversionResult invert_trace_data(const SampledTrace& d, const Wavelet* wavelet,
                                         const DataInversionOptions& opt) {
    InversionResult out;
    std::vector<double> grid = opt.grid.empty() ? default_estimate_grid(d) : opt.grid;
    const FirstMoment fm = wavelet ? first_nonzero_moment(*wavelet) : FirstMoment{0, 1.0};
    for (const std::string& m : opt.methods) {
        if (m == "refined") {
            if (fm.index == 0) {
                out.estimates.push_back(refined_transform(d, fm.value, opt.c, grid));
                out.executed.push_back("refined");
            } else {
                out.notices.push_back("refined: source wavelet is zero-mean; running the modified transform");
                out.estimates.push_back(modified_transform(d, *wavelet, opt.c, grid));
                out.executed.push_back("modified");
            }
        } else if (m == "classical") {
            out.estimates.push_back(classical_estimate(d, opt.c, grid));
            out.executed.push_back("classical");
        } else if (m == "modified") {
            if (!wavelet || fm.index == 0)
                throw ConfigError("modified: needs a zero-mean source wavelet (pass one with --wavelet)");
            out.estimates.push_back(modified_transform(d, *wavelet, opt.c, grid));
            out.executed.push_back("modified");
        } else if (m == "pressure-refined") {
            out.estimates.push_back(pressure_refined(d, fm.index == 0 ? fm.value : 1.0, opt.c, grid));
            out.executed.push_back("pressure-refined");
        } else if (m == "pressure-classical") {
            out.estimates.push_back(pressure_classical(d, opt.c, grid));
            out.executed.push_back("pressure-classical");
        } else {
            throw ConfigError("unknown method '" + m + "'");
        }
    }
    return out;
}

/// Error metrics of each inversion method against the true profile.
inline nlohmann::json compare_report(const Experiment& e, const InversionResult& inv) {
    nlohmann::json report;
    report["profile"] = e.prof.name;
    report["far_eval_point"] = e.far_eval_point();
    nlohmann::json per = nlohmann::json::array();
    const double X = e.far_eval_point();
    const double zp = e.prof.profile.zeta_plus();
    for (std::size_t i = 0; i < inv.estimates.size(); ++i) {
        const auto& est = inv.estimates[i];
        std::vector<double> rel;
        double far_value = est.value.back();
        for (std::size_t k = 0; k < est.x.size(); ++k) {
            const double truth = e.prof.profile(est.x[k]);
            if (est.x[k] <= e.prof.profile.x_plus()) rel.push_back(std::abs(est.value[k] - truth) / truth);
            if (est.x[k] >= X && (k == 0 || est.x[k - 1] < X)) far_value = est.value[k];
        }
        nlohmann::json m;
        m["method"] = inv.executed[i];
        m["median_rel_error_interior"] = rel.empty() ? 0.0 : median_of(rel);
        m["max_rel_error_interior"] = rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end());
        m["far_side_value"] = far_value;
        m["far_side_rel_error"] = std::abs(far_value - zp) / zp;
        per.push_back(m);
    }
    report["methods"] = per;
    return report;
}

/// Writes compare.json for an experiment (simulate + invert + error metrics).
inline nlohmann::json compare(const Experiment& e, const std::filesystem::path& out_dir) {
    SimulationArtifacts art = run_forward(e);
    InversionResult inv = run_inversion(e, art);
    nlohmann::json report = compare_report(e, inv);
    std::filesystem::create_directories(out_dir);
    write_json(out_dir / "compare.json", report);
    return report;
}

/// Forward-model self-checks: the amplitude-sum identity always, plus an
/// event-by-event match against the ray-enumeration oracle when the medium is
/// small enough to enumerate.  Returns the report; `pass` is the verdict.
inline nlohmann::json verify(const Experiment& e, double sum_tol = 1e-8) {
    nlohmann::json report;
    report["profile"] = e.prof.name;
    bool pass = true;

    const double t_max = e.stack.empty() ? 1.0 : 40.0 * e.stack.last_interface();
    const DeltaTrain g = greens_function(e.stack, t_max);
    const double closed_form = total_reflection(e.stack.reflectivities());
    const double err = std::abs(g.amplitude_sum() - closed_form);
    report["sum_identity"] = {{"events", g.size()},
                              {"truncated_sum", g.amplitude_sum()},
                              {"closed_form", closed_form},
                              {"abs_error", err},
                              {"tolerance", sum_tol},
                              {"pass", err <= sum_tol}};
    pass = pass && err <= sum_tol;

    if (!e.stack.empty() && e.stack.size() <= 6) {
        const int bounces = 12;
        // cut strictly between lattice times so sub-ulp drift cannot straddle it
        const double horizon = bounce_complete_horizon(e.stack, bounces) - 1.3e-7;
        const double t_run = std::max(horizon, 2.0 * e.stack.last_interface()) + 1.0;
        const DeltaTrain numeric = truncated(greens_function(e.stack, t_run), horizon);
        const DeltaTrain rays = truncated(enumerate_rays(e.stack, bounces, t_run), horizon);
        const double amp_tol = 1e-13 * std::max(rays.max_abs_amplitude(), 1e-300);
        const TrainComparison cmp = compare(numeric, rays, 1e-9, amp_tol);
        const bool ok = cmp.clean() && cmp.max_rel_amp_diff < 1e-12;
        report["oracle"] = {{"bounce_order", bounces},
                            {"horizon", horizon},
                            {"matched_events", cmp.matched},
                            {"unmatched_significant", cmp.unmatched_significant},
                            {"unmatched_below_tol", cmp.unmatched_below_tol},
                            {"max_rel_amp_diff", cmp.max_rel_amp_diff},
                            {"pass", ok}};
        pass = pass && ok;
    } else {
        report["oracle"] = {{"skipped", "medium has more than 6 interfaces"}};
    }
    report["pass"] = pass;
    return report;
}

/// The desk-scale figure suite: for each built-in profile, inversion overlays
/// for an impulse source, a Gaussian source, a zero-mean source, and the two
/// noisy variants.
inline void reproduce_figures(const std::filesystem::path& out_root, std::uint64_t seed = 1) {
    struct Fig {
        const char* tag;
        nlohmann::json wavelet;
        double noise;
        std::vector<std::string> methods;
    };
    const std::vector<Fig> figs{
        {"impulse", "delta", 0.0, {"refined", "classical"}},
        {"gaussian", nlohmann::json{{"name", "gaussian"}, {"width", 0.05}}, 0.0, {"refined", "classical"}},
        {"zero-mean", nlohmann::json{{"name", "dgaussian"}, {"width", 0.045}}, 0.0, {"modified"}},
        {"noisy-gaussian", nlohmann::json{{"name", "gaussian"}, {"width", 0.05}}, 0.10, {"refined"}},
        {"noisy-zero-mean", nlohmann::json{{"name", "dgaussian"}, {"width", 0.045}}, 0.05, {"modified"}},
    };
    for (const auto& name : builtin_profile_names()) {
        for (const auto& fig : figs) {
            ExperimentConfig cfg;
            cfg.profile = name;
            cfg.wavelet = fig.wavelet;
            cfg.noise_level = fig.noise;
            cfg.seed = seed;
            cfg.methods = fig.methods;
            const Experiment e = resolve(cfg);
            simulate(e, out_root / name / fig.tag);
            invert(e, out_root / name / fig.tag);
        }
    }
}

}  // namespace imped1d
