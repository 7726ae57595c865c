// clipcs: Monte Carlo BER harness for clipped OFDM/OFDMA with compressed-sensing
// clipping-noise cancellation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "clipcs/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitValidation = 2;

struct ExperimentFlags {
    std::string config_file;
    std::vector<std::pair<std::string, std::string>> overrides;
};

// Registers one --<field> flag per config field; values are applied through
// the same parser the config file uses so flags and file share semantics.
void add_experiment_flags(CLI::App* app, ExperimentFlags& flags) {
    app->add_option("--config", flags.config_file, "key = value file with ExperimentConfig fields");
    static const char* kFields[][2] = {
        {"n_subcarriers", "number of subcarriers N (power of two)"},
        {"modulation", "qpsk | 16qam"},
        {"oversample_L", "oversampling factor L"},
        {"clip_mode", "none | nyquist_clip | clip_and_filter | k_peak_reduction[(K)]"},
        {"k_peaks", "K for k_peak_reduction"},
        {"cr_db", "clipping ratio in dB"},
        {"delta", "reliable-region margin, 0 <= delta < 1"},
        {"cancel", "run CS cancellation (false = plain decision baseline)"},
        {"omp_max_iterations", "OMP iteration cap (0 = ceil(0.125 N))"},
        {"omp_stop_threshold", "OMP component floor (negative = 0.05 A)"},
        {"full_observation_shortcut", "use largest IDFT components when M = N"},
        {"ofdma_U", "interleaved OFDMA with 2^U users (or 'none')"},
        {"ofdma_user", "user index in OFDMA mode"},
        {"ebno_grid_db", "comma-separated Eb/N0 grid in dB"},
        {"min_bits", "minimum simulated bits per point"},
        {"max_bits", "maximum simulated bits per point"},
        {"target_errors", "stop a point after this many bit errors (once min_bits reached)"},
        {"master_seed", "master RNG seed"},
        {"batch_frames", "frames per scheduling batch"},
    };
    for (const auto& f : kFields) {
        const std::string name = f[0];
        app->add_option_function<std::string>(
            "--" + name, [&flags, name](const std::string& v) { flags.overrides.emplace_back(name, v); }, f[1]);
    }
}

clipcs::ExperimentConfig resolve_config(const ExperimentFlags& flags) {
    clipcs::ExperimentConfig cfg;
    if (!flags.config_file.empty()) {
        cfg = clipcs::load_config_file(flags.config_file, cfg);
    }
    std::vector<std::string> errors;
    for (const auto& [k, v] : flags.overrides) {
        try {
            clipcs::set_config_field(cfg, k, v);
        } catch (const clipcs::ConfigError& e) {
            errors.insert(errors.end(), e.problems.begin(), e.problems.end());
        } catch (const std::invalid_argument& e) {
            errors.emplace_back(e.what());
        }
    }
    if (!errors.empty()) {
        throw clipcs::ConfigError(std::move(errors));
    }
    if (auto problems = cfg.problems(); !problems.empty()) {
        throw clipcs::ConfigError(std::move(problems));
    }
    return cfg;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw clipcs::ConfigError({"cannot write output file '" + path + "'"});
    }
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clipping-noise cancellation by compressed sensing: BER harness"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker count (default: CLIPCS_THREADS or hardware)");

    ExperimentFlags ber_flags;
    std::string ber_out;
    auto* ber = app.add_subcommand("ber", "simulate BER over an Eb/N0 grid");
    add_experiment_flags(ber, ber_flags);
    ber->add_option("-o,--output", ber_out, "CSV output path (default stdout)");

    ExperimentFlags sweep_flags;
    std::string sweep_out;
    std::vector<double> delta_grid = {0.0, 0.2, 0.4, 0.6, 0.8};
    auto* sweep = app.add_subcommand("sweep-delta", "BER and mean M versus delta");
    add_experiment_flags(sweep, sweep_flags);
    sweep->add_option("--delta-grid", delta_grid, "delta values")->delimiter(',');
    sweep->add_option("-o,--output", sweep_out, "CSV output path (default stdout)");

    std::size_t an_n = 64;
    std::string an_mod = "qpsk";
    double an_cr = 0.0;
    std::vector<double> an_delta = {0.0, 0.2, 0.4, 0.6, 0.8};
    std::vector<double> an_ebno = {0, 2, 4, 6, 8, 10};
    std::string an_out;
    auto* analytic = app.add_subcommand("analytic", "tabulate reliable-region probabilities and E[M]");
    analytic->add_option("--n_subcarriers", an_n, "N");
    analytic->add_option("--modulation", an_mod, "qpsk | 16qam");
    analytic->add_option("--cr_db", an_cr, "clipping ratio in dB");
    analytic->add_option("--delta-grid", an_delta, "delta values")->delimiter(',');
    analytic->add_option("--ebno_grid_db", an_ebno, "Eb/N0 values in dB")->delimiter(',');
    analytic->add_option("-o,--output", an_out, "CSV output path (default stdout)");

    auto* validate = app.add_subcommand("validate", "run the invariant suite");

    CLI11_PARSE(app, argc, argv);
    if (threads == 0) {
        threads = clipcs::default_thread_count();
    }

    try {
        if (*ber) {
            const auto cfg = resolve_config(ber_flags);
            emit(clipcs::ber_csv(clipcs::run_ber(cfg, threads)), ber_out);
        } else if (*sweep) {
            const auto cfg = resolve_config(sweep_flags);
            emit(clipcs::delta_sweep_csv(clipcs::run_delta_sweep(cfg, delta_grid, threads)), sweep_out);
        } else if (*analytic) {
            const auto c = clipcs::Constellation::from_name(an_mod);
            for (double d : an_delta) {
                if (!(d >= 0.0 && d < 1.0)) {
                    throw clipcs::ConfigError({"delta values must lie in [0, 1)"});
                }
            }
            emit(clipcs::analytic_csv(clipcs::run_analytic(an_n, c, an_cr, an_delta, an_ebno)), an_out);
        } else if (*validate) {
            const auto report = clipcs::validate(threads);
            for (const auto& check : report.checks) {
                std::printf("[%s] %s (%s)\n", check.passed ? "PASS" : "FAIL", check.name.c_str(), check.detail.c_str());
            }
            return report.all_passed() ? kExitOk : kExitValidation;
        }
    } catch (const clipcs::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
