#pragma once

/**
 * @file experiment.hpp
 * @brief Experiment configuration and the simulate / spectrum / montecarlo runs.
 *
 * Configuration is flat `key = value` text; every key is also a command-line
 * flag of the same name. Harmonic amplitudes are given relative to v1.
 */

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qharm/estimators.hpp"
#include "qharm/signal_model.hpp"

namespace qharm {

struct SnrSweep {
    double start_db{40.0};
    double stop_db{40.0};
    double step_db{5.0};

    [[nodiscard]] std::vector<double> values() const;
};

struct ExperimentConfig {
    double fundamental_hz{50.0};
    double sample_rate_hz{20000.0};
    double phase_rad{0.0};  // set to π/7 by defaults()
    double v1{1.0};
    std::vector<Harmonic> relative_harmonics;  // order → amplitude / v1; order 1 is implied
    SnrSweep snr;
    std::uint64_t seed{1};
    std::size_t k{80};
    std::size_t m{32};
    std::optional<std::size_t> m0;  // empty: M minus the model's signal dimension
    std::size_t trials{300};
    FrequencyGrid grid;
    bool full_grid{false};  // grid = full: (-fs/2, fs/2] at grid.step_hz
    std::vector<Model> models{Model::complex, Model::quaternion};
    std::optional<std::vector<Estimator>> estimators;  // empty: subcommand default
    std::filesystem::path output_dir{"results"};
    std::optional<double> threshold_db;     // empty: per-estimator default
    std::optional<double> pairing_tol_hz;   // empty: two grid steps
    double match_window_hz{10.0};
    std::optional<double> loading_factor;   // loading = factor · trace(R)/M; empty: 1e-10
    std::optional<std::size_t> count;       // simulate only; empty: M + K - 1

    /// Reference setup: 50 Hz, 20 kHz, φ = π/7, K = 80, M = 32,
    /// 6 % second and third harmonics, SNR 40 dB.
    static ExperimentConfig defaults();

    /// Throws std::invalid_argument naming the offending key.
    void validate() const;

    [[nodiscard]] std::size_t samples_per_trial() const { return m + k - 1; }
    [[nodiscard]] ThreePhaseConfig signal(double snr_db, std::uint64_t trial_seed) const;
    [[nodiscard]] std::size_t m0_for(Model model) const;
    [[nodiscard]] double threshold_for(Estimator e) const;
    [[nodiscard]] FrequencyGrid effective_grid() const;
    [[nodiscard]] double pairing_tolerance() const { return pairing_tol_hz.value_or(2.0 * grid.step_hz); }
    [[nodiscard]] std::vector<Estimator> estimators_or(std::vector<Estimator> fallback) const {
        return estimators.value_or(std::move(fallback));
    }
};

/// Per-trial seed: master ⊕ trial index.
[[nodiscard]] inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) { return master ^ trial; }

/// Applies one key. Throws std::invalid_argument for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);
/// Reads `key = value` lines; '#' starts a comment; [section] headers are ignored.
void apply_config_text(ExperimentConfig& config, std::istream& is, const std::string& source_name);
[[nodiscard]] std::vector<std::string> setting_keys();

/// Human-readable dump of every key, in config-file syntax.
void describe(std::ostream& os, const ExperimentConfig& config);

struct EstimatorResult {
    Spectrum spectrum;
    std::vector<Peak> peaks;
    HarmonicReport report;
};

struct TrialResult {
    Model model{Model::quaternion};
    std::vector<EstimatorResult> estimates;  // in the requested estimator order
};

/// One noisy realization analysed by every requested model and estimator.
[[nodiscard]] std::vector<TrialResult> analyze_trial(const ExperimentConfig& config,
                                                     const std::vector<Estimator>& estimators, double snr_db,
                                                     std::uint64_t seed);

struct SpectrumRunSummary {
    std::vector<TrialResult> results;
    std::vector<std::filesystem::path> written;
};

/// Writes spectrum_<model>_<estimator>.csv, report_<model>_<estimator>.csv and
/// summary.txt into output_dir, and echoes the summary to `log`.
SpectrumRunSummary run_spectrum(const ExperimentConfig& config, std::ostream& log);

struct MonteCarloRow {
    double snr_db{0.0};
    Model model{Model::quaternion};
    Estimator estimator{Estimator::mvdr};
    int harmonic{1};
    double mean_abs_error_hz{0.0};  // NaN when every trial missed
    double miss_rate{0.0};
};

/// Computes the error table without touching the filesystem.
[[nodiscard]] std::vector<MonteCarloRow> montecarlo_table(const ExperimentConfig& config, unsigned threads = 0);

/// Runs montecarlo_table and writes montecarlo.csv plus summary.txt.
std::vector<MonteCarloRow> run_montecarlo(const ExperimentConfig& config, std::ostream& log);

void write_montecarlo_csv(std::ostream& os, const std::vector<MonteCarloRow>& rows);

/// Writes three_phase.csv, complex.csv and quaternion.csv for one realization.
std::vector<std::filesystem::path> run_simulate(const ExperimentConfig& config, std::ostream& log);

}  // namespace qharm
