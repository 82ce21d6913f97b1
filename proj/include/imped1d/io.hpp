#pragma once

// CSV and JSON serialization.  CSV columns are fixed: delta trains as
// (t, amplitude), traces as (t, value), estimates as (x, zeta_estimate,
// valid_flag).  Doubles are written with %.17g so files round-trip exactly.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "imped1d/forward.hpp"
#include "imped1d/media.hpp"
#include "imped1d/transforms.hpp"
#include "imped1d/wavelets.hpp"

namespace imped1d {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

inline std::vector<std::array<double, 2>> read_two_column_csv(const std::filesystem::path& path,
                                                              const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    std::string line;
    std::vector<std::array<double, 2>> rows;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (!line.empty() && !(line[0] == '-' || line[0] == '+' || (line[0] >= '0' && line[0] <= '9'))) {
                if (!expected_header.empty() && line != expected_header)
                    throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
                continue;  // header row
            }
        }
        const char* p = line.c_str();
        char* end = nullptr;
        const double a = std::strtod(p, &end);
        if (end == p || *end != ',') throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        p = end + 1;
        const double b = std::strtod(p, &end);
        if (end == p) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        rows.push_back({a, b});
    }
    return rows;
}

}  // namespace detail

inline void write_delta_train_csv(const std::filesystem::path& path, const DeltaTrain& g) {
    auto out = detail::open_out(path);
    out << "t,amplitude\n";
    for (const auto& e : g.events()) out << format_double(e.time) << ',' << format_double(e.amplitude) << '\n';
}

inline DeltaTrain read_delta_train_csv(const std::filesystem::path& path) {
    std::vector<DeltaTrain::Event> events;
    for (const auto& row : detail::read_two_column_csv(path, "t,amplitude")) events.push_back({row[0], row[1]});
    return DeltaTrain(std::move(events), 0.0, 0.0);
}

inline void write_trace_csv(const std::filesystem::path& path, const SampledTrace& trace) {
    auto out = detail::open_out(path);
    out << "t,value\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out << format_double(trace.time_at(i)) << ',' << format_double(trace.samples[i]) << '\n';
}

inline SampledTrace read_trace_csv(const std::filesystem::path& path) {
    const auto rows = detail::read_two_column_csv(path, "t,value");
    if (rows.size() < 2) throw std::runtime_error(path.string() + ": need at least two samples");
    const double start = rows[0][0];
    const double dt = rows[1][0] - rows[0][0];
    if (!(dt > 0.0)) throw std::runtime_error(path.string() + ": times must increase uniformly");
    std::vector<double> samples(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double expect = start + dt * static_cast<double>(i);
        if (std::abs(rows[i][0] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
            throw std::runtime_error(path.string() + ": non-uniform sampling near t=" + format_double(rows[i][0]));
        samples[i] = rows[i][1];
    }
    return {start, dt, std::move(samples)};
}

inline void write_estimate_csv(const std::filesystem::path& path, const ImpedanceEstimate& est) {
    auto out = detail::open_out(path);
    out << "x,zeta_estimate,valid_flag\n";
    for (std::size_t i = 0; i < est.x.size(); ++i)
        out << format_double(est.x[i]) << ',' << format_double(est.value[i]) << ','
            << static_cast<int>(est.valid[i]) << '\n';
}

inline void write_curve_csv(const std::filesystem::path& path, const Curve& curve, const std::string& x_name,
                            const std::string& y_name) {
    auto out = detail::open_out(path);
    out << x_name << ',' << y_name << '\n';
    for (std::size_t i = 0; i < curve.x.size(); ++i)
        out << format_double(curve.x[i]) << ',' << format_double(curve.value[i]) << '\n';
}

inline void write_profile_csv(const std::filesystem::path& path, const ImpedanceProfile& profile,
                              std::span<const double> grid) {
    auto out = detail::open_out(path);
    out << "x,zeta\n";
    for (double x : grid) out << format_double(x) << ',' << format_double(profile(x)) << '\n';
}

/// Loads a wavelet from a two-column (t, value) CSV sampled on a uniform grid.
inline Wavelet read_wavelet_csv(const std::filesystem::path& path) {
    const SampledTrace t = read_trace_csv(path);
    return Wavelet(t.samples, t.start, t.dt);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
}

/// FNV-1a over the canonical dump; stable across runs for identical configs.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace imped1d
