// imped1d: exact 1-D plane-wave reflection modeling for layered acoustic media
// and impedance recovery from the recorded data.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imped1d/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string profile;
    std::string wavelet;
    std::string out;
    double noise = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<std::string> methods;
};

void attach_common(CLI::App* cmd, CommonOpts& o, bool with_methods = true) {
    cmd->add_option("--config", o.config_path, "JSON experiment config (see README for the schema)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--profile", o.profile, "builtin profile name (P1, P2, P3, P4)");
    cmd->add_option("--wavelet", o.wavelet, "builtin wavelet name (delta, gaussian, dgaussian, d2gaussian)");
    cmd->add_option("--noise", o.noise, "noise level as a fraction of the trace peak");
    cmd->add_option("--seed", o.seed, "noise seed")->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--out", o.out, "output directory");
    if (with_methods)
        cmd->add_option("--method", o.methods,
                        "inversion method (repeatable): refined, classical, modified, pressure-refined, "
                        "pressure-classical");
}

imped1d::ExperimentConfig build_config(const CommonOpts& o) {
    imped1d::ExperimentConfig cfg =
        o.config_path.empty() ? imped1d::ExperimentConfig{} : imped1d::load_config(o.config_path);
    if (!o.profile.empty()) cfg.profile = o.profile;
    if (!o.wavelet.empty()) cfg.wavelet = o.wavelet;
    if (o.noise >= 0.0) cfg.noise_level = o.noise;
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.methods.empty()) cfg.methods = o.methods;
    if (!o.out.empty()) cfg.out_dir = o.out;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact 1-D reflection modeling and acoustic impedance recovery for layered media"};
    app.require_subcommand(1);

    CommonOpts sim_o, inv_o, cmp_o, ver_o;
    std::string fig_out = "figures";
    std::uint64_t fig_seed = 1;

    CLI::App* sim = app.add_subcommand("simulate", "forward-model a profile and write the data files");
    attach_common(sim, sim_o, false);
    CLI::App* inv = app.add_subcommand("invert", "recover impedance from simulated data; writes CSVs and an SVG overlay");
    attach_common(inv, inv_o);
    std::string data_train, data_trace;
    double zeta_minus = 1.0, grid_x_max = 0.0;
    inv->add_option("--data-train", data_train, "invert an impulse-response CSV (t,amplitude) directly")
        ->check(CLI::ExistingFile);
    inv->add_option("--data-trace", data_trace, "invert a recorded-trace CSV (t,value) directly")
        ->check(CLI::ExistingFile);
    inv->add_option("--zeta-minus", zeta_minus, "impedance above the slab for --data-* inputs (default 1)");
    inv->add_option("--x-max", grid_x_max, "estimate grid end for --data-* inputs (default from the data)");
    CLI::App* cmp = app.add_subcommand("compare", "error metrics of each method against the true profile");
    attach_common(cmp, cmp_o);
    CLI::App* ver = app.add_subcommand("verify", "check the forward model against the ray oracle and the sum identity");
    attach_common(ver, ver_o, false);
    CLI::App* fig = app.add_subcommand("reproduce-figures", "run the full built-in figure suite");
    fig->add_option("--out", fig_out, "output root directory");
    fig->add_option("--seed", fig_seed, "noise seed for the noisy figures");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            const auto cfg = build_config(sim_o);
            const auto e = imped1d::resolve(cfg);
            imped1d::simulate(e, cfg.out_dir);
            std::cout << "wrote " << cfg.out_dir << "\n";
        } else if (inv->parsed()) {
            if (!data_train.empty() || !data_trace.empty()) {
                imped1d::DataInversionOptions opt;
                opt.c = zeta_minus;
                if (!inv_o.methods.empty()) opt.methods = inv_o.methods;
                if (grid_x_max > 0.0) {
                    opt.grid.resize(1200);
                    for (std::size_t i = 0; i < opt.grid.size(); ++i)
                        opt.grid[i] = grid_x_max * static_cast<double>(i + 1) / 1200.0;
                }
                const std::string out = inv_o.out.empty() ? "out" : inv_o.out;
                imped1d::InversionResult result;
                if (!data_train.empty()) {
                    result = imped1d::invert_train_data(imped1d::read_delta_train_csv(data_train), opt);
                    imped1d::detail::write_data_inversion(result, out, data_train);
                } else {
                    const imped1d::SampledTrace d = imped1d::read_trace_csv(data_trace);
                    std::optional<imped1d::Wavelet> w;
                    if (!inv_o.wavelet.empty()) {
                        std::string wname;
                        w = imped1d::detail::resolve_wavelet(inv_o.wavelet, wname);
                    }
                    result = imped1d::invert_trace_data(d, w ? &*w : nullptr, opt);
                    imped1d::detail::write_data_inversion(result, out, data_trace);
                }
                for (const auto& n : result.notices) std::cerr << "notice: " << n << "\n";
                std::cout << "wrote " << out << "\n";
            } else {
                const auto cfg = build_config(inv_o);
                const auto e = imped1d::resolve(cfg);
                const auto result = imped1d::invert(e, cfg.out_dir);
                for (const auto& n : result.notices) std::cerr << "notice: " << n << "\n";
                std::cout << "wrote " << cfg.out_dir << "\n";
            }
        } else if (cmp->parsed()) {
            const auto cfg = build_config(cmp_o);
            const auto e = imped1d::resolve(cfg);
            const auto report = imped1d::compare(e, cfg.out_dir);
            std::cout << report.dump(2) << "\n";
        } else if (ver->parsed()) {
            const auto cfg = build_config(ver_o);
            const auto e = imped1d::resolve(cfg);
            const auto report = imped1d::verify(e);
            if (!ver_o.out.empty()) imped1d::write_json(std::filesystem::path(ver_o.out) / "verify.json", report);
            std::cout << report.dump(2) << "\n";
            if (!report.at("pass").get<bool>()) {
                std::cerr << "verification FAILED\n";
                return 2;
            }
        } else if (fig->parsed()) {
            imped1d::reproduce_figures(fig_out, fig_seed);
            std::cout << "wrote " << fig_out << "\n";
        }
    } catch (const imped1d::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const imped1d::VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
