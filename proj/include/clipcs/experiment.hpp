#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clipcs/signal_core.hpp"

namespace clipcs {

enum class ClipMode { None, NyquistClip, ClipAndFilter, KPeakReduction };

std::string to_string(ClipMode m);
ClipMode clip_mode_from_string(std::string_view s);

struct OfdmaLayout {
    int U = 2;
    std::size_t user = 0;
};

struct ExperimentConfig {
    std::size_t n_subcarriers = 64;
    std::string modulation = "qpsk";
    int oversample_L = 1;
    ClipMode clip_mode = ClipMode::NyquistClip;
    std::size_t k_peaks = 4;
    double cr_db = 0.0;
    double delta = 0.4;
    bool cancel = true;
    // 0 selects ceil(0.125 * N) over the reconstructed dimension.
    std::size_t omp_max_iterations = 0;
    // Negative selects 0.05 * A, A = sqrt(E_s) * 10^(cr_db/20).
    double omp_stop_threshold = -1.0;
    // With M = N use the largest IDFT components instead of running OMP.
    bool full_observation_shortcut = true;
    std::optional<OfdmaLayout> ofdma;
    std::vector<double> ebno_grid_db = {0, 2, 4, 6, 8, 10};
    std::uint64_t min_bits = 0;
    std::uint64_t max_bits = 1'000'000;
    std::uint64_t target_errors = 100;
    std::uint64_t master_seed = 1;
    std::size_t batch_frames = 512;

    /// Violated constraints, empty when the configuration is usable.
    std::vector<std::string> problems() const;
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> problems);
    std::vector<std::string> problems;
};

/// Sets one field by its config-file name. Throws ConfigError on an unknown
/// key or malformed value.
void set_config_field(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key = value" lines; '#' starts a comment.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

struct BerRecord {
    double ebno_db = 0.0;
    std::uint64_t bits_simulated = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double mean_M = 0.0;
    double mean_omp_iterations = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t empty_selection_frames = 0;
};

/// Worker count: CLIPCS_THREADS if set, else hardware concurrency.
unsigned default_thread_count();

/// Runs the configured pipeline at every Eb/N0 point. Each frame draws from
/// its own generator seeded by (master_seed, grid point, frame index), so the
/// result does not depend on `threads`.
std::vector<BerRecord> run_ber(const ExperimentConfig& cfg, unsigned threads = 0);

struct DeltaSweepRow {
    double delta = 0.0;
    BerRecord record;
};

std::vector<DeltaSweepRow> run_delta_sweep(const ExperimentConfig& cfg, const std::vector<double>& delta_grid,
                                           unsigned threads = 0);

struct AnalyticRow {
    int V = 2;
    double delta = 0.0;
    double cr_db = 0.0;
    double ebno_db = 0.0;
    double N0 = 0.0;
    double N0_eff = 0.0;
    double p_in_rr_pam = 0.0;
    double p_in_rr = 0.0;
    double p_correct_in_rr = 0.0;
    double p_error_given_rr = 0.0;
    double expected_m = 0.0;
};

std::vector<AnalyticRow> run_analytic(std::size_t N, const Constellation& c, double cr_db,
                                      const std::vector<double>& delta_grid, const std::vector<double>& ebno_grid_db);

std::string format_g6(double v);
std::string ber_csv(const std::vector<BerRecord>& records);
std::string delta_sweep_csv(const std::vector<DeltaSweepRow>& rows);
std::string analytic_csv(const std::vector<AnalyticRow>& rows);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

/// Invariant suite: factorization identities (plus a perturbed-twiddle
/// negative control), round trips, exact sparsity, noiseless OMP recovery,
/// analytic vs. Monte Carlo reliable-region size, and seeded determinism.
ValidationReport validate(unsigned threads = 0);

}  // namespace clipcs
