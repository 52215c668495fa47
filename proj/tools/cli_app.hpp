#pragma once

// Flag parsing for the bpsk executable; kept in a header so tests can drive it in-process.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpsk/commands.hpp"

namespace bpsk::cli {

namespace app_detail {

struct SweepFlags {
    std::string preset;
    std::optional<double> alpha_sq_min, alpha_sq_max;
    std::optional<int> points;
    std::optional<std::string> scale, receivers;
    std::optional<double> eta, nu, tau, xi;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "defaults: fig3 (ideal detector) or fig4 (practical detector)")
            ->check(CLI::IsMember({"fig3", "fig4"}));
        cmd->add_option("--alpha-sq-min", alpha_sq_min, "smallest mean photon number (default 0.01)");
        cmd->add_option("--alpha-sq-max", alpha_sq_max, "largest mean photon number (default 10)");
        cmd->add_option("--points", points, "grid size (default 60)");
        cmd->add_option("--scale", scale, "grid spacing: log or linear (default log)")->check(CLI::IsMember({"log", "linear"}));
        cmd->add_option("--receivers", receivers, "comma-separated receiver tags");
        cmd->add_option("--eta", eta, "detector efficiency");
        cmd->add_option("--nu", nu, "dark counts per pulse");
        cmd->add_option("--tau", tau, "displacement beamsplitter transmittance");
        cmd->add_option("--xi", xi, "signal/LO mode overlap");
        cmd->add_option("--out", out, "output CSV path (default stdout)");
    }

    SweepSpec build(const SweepSpec& fallback) const {
        SweepSpec s = preset == "fig3" ? fig3_spec() : preset == "fig4" ? fig4_spec() : fallback;
        if (alpha_sq_min) s.alpha_sq_min = *alpha_sq_min;
        if (alpha_sq_max) s.alpha_sq_max = *alpha_sq_max;
        if (points) s.points = *points;
        if (scale) s.scale = *scale == "linear" ? Scale::linear : Scale::log;
        if (receivers) s.receivers = parse_receiver_list(*receivers);
        if (eta) s.detector.eta = *eta;
        if (nu) s.detector.nu = *nu;
        if (tau) s.detector.tau = *tau;
        if (xi) s.detector.xi = *xi;
        s.output_path = out;
        return s;
    }
};

} // namespace app_detail

/// Parse `argv` and run the selected subcommand. Flag errors map to exit code 4.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Binary coherent-state receiver calculator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    app_detail::SweepFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "error probability of each receiver over an alpha^2 grid (CSV)");
    sweep_flags.attach(sweep);

    double params_alpha_sq = 0.0;
    double params_eta = 1.0;
    auto* params = app.add_subcommand("params", "optimal receiver parameters at one alpha^2");
    params->add_option("--alpha-sq", params_alpha_sq, "mean photon number")->required();
    params->add_option("--eta", params_eta, "detector efficiency (default 1)");

    VerifySpec verify_spec;
    std::string r_grid, phi_grid;
    auto* verify = app.add_subcommand("verify-gaussian", "Bayes error over a grid of single-mode Gaussian measurements");
    verify->add_option("--alpha-sq", verify_spec.alpha_sq, "mean photon number (default 0.25)");
    verify->add_option("--r-grid", r_grid, "squeezing grid, start:stop:count or list (default 0:8:9)");
    verify->add_option("--phi-grid", phi_grid, "phase grid, start:stop:count or list (default 0:pi:7)");
    verify->add_option("--out", verify_spec.output_path, "landscape CSV path (default stdout)");

    app_detail::SweepFlags mc_flags;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100'000;
    auto* mc = app.add_subcommand("montecarlo", "click-level simulation of displacement receivers (CSV)");
    mc_flags.attach(mc);
    mc->add_option("--seed", seed, "master seed (default 1)");
    mc->add_option("--trials", trials, "trials per grid point and receiver (default 100000)");

    std::vector<std::string> plot_inputs;
    std::string plot_out;
    auto* plot = app.add_subcommand("plot", "log-log SVG chart of result CSV files");
    plot->add_option("csv", plot_inputs, "input CSV files")->required();
    plot->add_option("--out", plot_out, "output SVG path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (*sweep) return cmd_sweep(sweep_flags.build(fig3_spec()), out, err);
        if (*params) return cmd_params(params_alpha_sq, params_eta, out, err);
        if (*verify) {
            if (!r_grid.empty()) verify_spec.r_grid = parse_grid(r_grid);
            if (!phi_grid.empty()) verify_spec.phi_grid = parse_grid(phi_grid);
            return cmd_verify_gaussian(verify_spec, out, err);
        }
        if (*mc) {
            SweepSpec fallback = fig4_spec();
            fallback.receivers = {receivers::ReceiverTag::kennedy, receivers::ReceiverTag::kennedy_raw,
                                  receivers::ReceiverTag::type2_imperfect};
            MonteCarloSpec spec{mc_flags.build(fallback), seed, trials};
            if (mc_flags.preset == "fig4" && !mc_flags.receivers) spec.sweep.receivers = fallback.receivers;
            return cmd_montecarlo(spec, out, err);
        }
        if (*plot) return cmd_plot(plot_inputs, plot_out, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

} // namespace bpsk::cli
