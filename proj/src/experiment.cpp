#include "qharm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qharm {
namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, sep)) {
        out.push_back(trim(part));
    }
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw std::invalid_argument("bad value '" + value + "' for '" + key + "': expected " + expected);
}

double parse_plain(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            bad_value(key, text, "a number");
        }
        return v;
    } catch (const std::logic_error&) {
        bad_value(key, text, "a number");
    }
}

// Accepts plain numbers, "inf", and multiples/fractions of pi such as "pi/7" or "2*pi".
double parse_real(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    if (text == "inf" || text == "+inf") {
        return std::numeric_limits<double>::infinity();
    }
    const auto pi_at = text.find("pi");
    if (pi_at == std::string::npos) {
        return parse_plain(key, text);
    }
    double value = std::numbers::pi;
    const std::string head = trim(text.substr(0, pi_at));
    const std::string tail = trim(text.substr(pi_at + 2));
    if (!head.empty()) {
        if (head.back() != '*') {
            bad_value(key, raw, "a number or an expression like 2*pi/7");
        }
        value *= parse_plain(key, trim(head.substr(0, head.size() - 1)));
    }
    if (!tail.empty()) {
        if (tail.front() != '/') {
            bad_value(key, raw, "a number or an expression like 2*pi/7");
        }
        value /= parse_plain(key, trim(tail.substr(1)));
    }
    return value;
}

std::size_t parse_count(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        bad_value(key, raw, "a non-negative integer");
    }
    return static_cast<std::size_t>(std::stoull(text));
}

FrequencyGrid parse_grid(const std::string& key, const std::string& raw) {
    const auto parts = split(raw, ':');
    if (parts.size() != 3) {
        bad_value(key, raw, "start:stop:step");
    }
    return {parse_real(key, parts[0]), parse_real(key, parts[1]), parse_real(key, parts[2])};
}

SnrSweep parse_snr(const std::string& key, const std::string& raw) {
    const auto parts = split(raw, ':');
    if (parts.size() == 1) {
        const double v = parse_real(key, parts[0]);
        return {v, v, 5.0};
    }
    if (parts.size() != 3) {
        bad_value(key, raw, "a dB value or start:stop:step");
    }
    return {parse_real(key, parts[0]), parse_real(key, parts[1]), parse_real(key, parts[2])};
}

std::vector<Model> parse_models(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    if (text == "both") {
        return {Model::complex, Model::quaternion};
    }
    if (text == "complex") {
        return {Model::complex};
    }
    if (text == "quaternion") {
        return {Model::quaternion};
    }
    bad_value(key, raw, "complex, quaternion or both");
}

std::vector<Estimator> parse_estimators(const std::string& key, const std::string& raw) {
    if (trim(raw) == "all") {
        return {Estimator::ft, Estimator::mvdr, Estimator::music};
    }
    std::vector<Estimator> out;
    for (const auto& name : split(raw, ',')) {
        if (name == "ft") {
            out.push_back(Estimator::ft);
        } else if (name == "mvdr") {
            out.push_back(Estimator::mvdr);
        } else if (name == "music") {
            out.push_back(Estimator::music);
        } else {
            bad_value(key, raw, "ft, mvdr, music, a comma list of them, or all");
        }
    }
    if (out.empty()) {
        bad_value(key, raw, "at least one estimator");
    }
    return out;
}

std::vector<Harmonic> parse_harmonics(const std::string& key, const std::string& raw) {
    std::vector<Harmonic> out;
    if (trim(raw).empty()) {
        return out;
    }
    for (const auto& item : split(raw, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) {
            bad_value(key, raw, "order:relative_amplitude pairs, e.g. 2:0.06,3:0.06");
        }
        out.push_back({static_cast<int>(parse_count(key, parts[0])), parse_real(key, parts[1])});
    }
    return out;
}

std::string format_grid(const FrequencyGrid& g) {
    return fmt17(g.start_hz) + ":" + fmt17(g.stop_hz) + ":" + fmt17(g.step_hz);
}

std::string format_models(const std::vector<Model>& models) {
    if (models.size() == 2) {
        return "both";
    }
    return std::string(to_string(models.front()));
}

std::string format_estimators(const std::vector<Estimator>& es) {
    std::string out;
    for (const auto e : es) {
        out += (out.empty() ? "" : ",") + std::string(to_string(e));
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    return os;
}

void finish_output(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) {
        throw std::runtime_error("error while writing '" + path.string() + "'");
    }
}

void prepare_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

using SettingFn = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, SettingFn>>& settings() {
    static const std::vector<std::pair<std::string, SettingFn>> table = {
        {"fundamental_hz", [](auto& c, auto& k, auto& v) { c.fundamental_hz = parse_real(k, v); }},
        {"sample_rate_hz", [](auto& c, auto& k, auto& v) { c.sample_rate_hz = parse_real(k, v); }},
        {"phase_rad", [](auto& c, auto& k, auto& v) { c.phase_rad = parse_real(k, v); }},
        {"v1", [](auto& c, auto& k, auto& v) { c.v1 = parse_real(k, v); }},
        {"harmonics", [](auto& c, auto& k, auto& v) { c.relative_harmonics = parse_harmonics(k, v); }},
        {"snr", [](auto& c, auto& k, auto& v) { c.snr = parse_snr(k, v); }},
        {"seed",
         [](auto& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(parse_count(k, v)); }},
        {"k", [](auto& c, auto& k, auto& v) { c.k = parse_count(k, v); }},
        {"m", [](auto& c, auto& k, auto& v) { c.m = parse_count(k, v); }},
        {"m0",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.m0.reset();
             } else {
                 c.m0 = parse_count(k, v);
             }
         }},
        {"trials", [](auto& c, auto& k, auto& v) { c.trials = parse_count(k, v); }},
        {"grid",
         [](auto& c, auto& k, auto& v) {
             c.full_grid = trim(v) == "full";
             if (!c.full_grid) {
                 c.grid = parse_grid(k, v);
             }
         }},
        {"model", [](auto& c, auto& k, auto& v) { c.models = parse_models(k, v); }},
        {"estimator",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.estimators.reset();
             } else {
                 c.estimators = parse_estimators(k, v);
             }
         }},
        {"out", [](auto& c, auto&, auto& v) { c.output_dir = trim(v); }},
        {"threshold_db",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.threshold_db.reset();
             } else {
                 c.threshold_db = parse_real(k, v);
             }
         }},
        {"pairing_tol_hz",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.pairing_tol_hz.reset();
             } else {
                 c.pairing_tol_hz = parse_real(k, v);
             }
         }},
        {"match_window_hz", [](auto& c, auto& k, auto& v) { c.match_window_hz = parse_real(k, v); }},
        {"loading_factor",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.loading_factor.reset();
             } else {
                 c.loading_factor = parse_real(k, v);
             }
         }},
        {"count",
         [](auto& c, auto& k, auto& v) {
             if (trim(v) == "auto") {
                 c.count.reset();
             } else {
                 c.count = parse_count(k, v);
             }
         }},
    };
    return table;
}

int signal_dimension(const ExperimentConfig& config, Model model) {
    int dim = 1;  // fundamental
    for (const auto& h : config.relative_harmonics) {
        if (h.order == 1 || h.amplitude <= 0.0) {
            continue;
        }
        switch (sequence_of(h.order)) {
            case SequenceKind::positive:
            case SequenceKind::negative:
                dim += 1;
                break;
            case SequenceKind::zero:
                dim += model == Model::quaternion ? 2 : 0;
                break;
        }
    }
    return dim;
}

}  // namespace

std::vector<double> SnrSweep::values() const {
    if (start_db == stop_db) {
        return {start_db};
    }
    if (!(step_db > 0.0) || !(stop_db > start_db)) {
        throw std::invalid_argument("snr sweep must satisfy start < stop and step > 0");
    }
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(start_db + step_db * static_cast<double>(i));
    }
    return out;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.phase_rad = std::numbers::pi / 7.0;
    c.relative_harmonics = {{2, 0.06}, {3, 0.06}};
    return c;
}

ThreePhaseConfig ExperimentConfig::signal(double snr_db, std::uint64_t trial_seed) const {
    ThreePhaseConfig s;
    s.fundamental_hz = fundamental_hz;
    s.sample_rate_hz = sample_rate_hz;
    s.phase_rad = phase_rad;
    s.harmonics = {{1, v1}};
    for (const auto& h : relative_harmonics) {
        if (h.order == 1) {
            s.harmonics.front().amplitude = h.amplitude * v1;
        } else {
            s.harmonics.push_back({h.order, h.amplitude * v1});
        }
    }
    s.noise_sigma = snr_to_sigma(snr_db, v1);
    s.seed = trial_seed;
    return s;
}

FrequencyGrid ExperimentConfig::effective_grid() const {
    if (!full_grid) {
        return grid;
    }
    const double half = sample_rate_hz / 2.0;
    return {-half + grid.step_hz, half, grid.step_hz};
}

std::size_t ExperimentConfig::m0_for(Model model) const {
    if (m0) {
        return *m0;
    }
    const auto dim = static_cast<std::size_t>(signal_dimension(*this, model));
    return dim < m ? m - dim : 0;
}

double ExperimentConfig::threshold_for(Estimator e) const {
    if (threshold_db) {
        return *threshold_db;
    }
    switch (e) {
        case Estimator::ft:
            return 10.0;
        case Estimator::mvdr:
            return 30.0;
        case Estimator::music:
            return 40.0;
    }
    return 30.0;
}

void ExperimentConfig::validate() const {
    signal(snr.start_db, seed).validate();
    if (!(v1 > 0.0)) {
        throw std::invalid_argument("v1 must be positive");
    }
    (void)snr.values();
    if (k < 1) {
        throw std::invalid_argument("k must be >= 1");
    }
    if (m < 1) {
        throw std::invalid_argument("m must be >= 1");
    }
    for (const auto model : models) {
        const std::size_t m0_model = m0_for(model);
        if (m0_model < 1 || m0_model > m) {
            throw std::invalid_argument("m0 for the " + std::string(to_string(model)) + " model must lie in [1, m=" +
                                        std::to_string(m) + "], got " + std::to_string(m0_model));
        }
    }
    if (trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    effective_grid().validate();
    if (models.empty()) {
        throw std::invalid_argument("model list is empty");
    }
    if (!(match_window_hz > 0.0)) {
        throw std::invalid_argument("match_window_hz must be positive");
    }
    if (pairing_tol_hz && !(*pairing_tol_hz >= 0.0)) {
        throw std::invalid_argument("pairing_tol_hz must be >= 0");
    }
    if (loading_factor && !(*loading_factor >= 0.0)) {
        throw std::invalid_argument("loading_factor must be >= 0");
    }
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
    for (const auto& [name, fn] : settings()) {
        if (name == key) {
            fn(config, key, value);
            return;
        }
    }
    throw std::invalid_argument("unknown setting '" + key + "'");
}

void apply_config_text(ExperimentConfig& config, std::istream& is, const std::string& source_name) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty() || line.front() == '[') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        try {
            apply_setting(config, trim(line.substr(0, eq)), value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::vector<std::string> setting_keys() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : settings()) {
        out.push_back(name);
    }
    return out;
}

void describe(std::ostream& os, const ExperimentConfig& c) {
    std::string harmonics;
    for (const auto& h : c.relative_harmonics) {
        harmonics += (harmonics.empty() ? "" : ",") + std::to_string(h.order) + ":" + fmt17(h.amplitude);
    }
    os << "fundamental_hz = " << fmt17(c.fundamental_hz) << '\n'
       << "sample_rate_hz = " << fmt17(c.sample_rate_hz) << '\n'
       << "phase_rad = " << fmt17(c.phase_rad) << '\n'
       << "v1 = " << fmt17(c.v1) << '\n'
       << "harmonics = " << harmonics << '\n'
       << "snr = " << fmt17(c.snr.start_db);
    if (c.snr.stop_db != c.snr.start_db) {
        os << ':' << fmt17(c.snr.stop_db) << ':' << fmt17(c.snr.step_db);
    }
    os << '\n'
       << "seed = " << c.seed << '\n'
       << "k = " << c.k << '\n'
       << "m = " << c.m << '\n'
       << "m0 = " << (c.m0 ? std::to_string(*c.m0) : "auto") << '\n'
       << "trials = " << c.trials << '\n'
       << "grid = " << (c.full_grid ? std::string("full") : format_grid(c.grid)) << '\n'
       << "model = " << format_models(c.models) << '\n'
       << "estimator = " << (c.estimators ? format_estimators(*c.estimators) : "auto") << '\n'
       << "threshold_db = " << (c.threshold_db ? fmt17(*c.threshold_db) : "auto") << '\n'
       << "pairing_tol_hz = " << fmt17(c.pairing_tolerance()) << '\n'
       << "match_window_hz = " << fmt17(c.match_window_hz) << '\n'
       << "loading_factor = " << fmt17(c.loading_factor.value_or(1e-10)) << '\n';
}

std::vector<TrialResult> analyze_trial(const ExperimentConfig& config, const std::vector<Estimator>& estimators,
                                       double snr_db, std::uint64_t seed) {
    const ThreePhaseConfig sig = config.signal(snr_db, seed);
    const std::size_t n = config.samples_per_trial();
    const auto frames = gen_three_phase(sig, 0, n);
    const auto grid = config.effective_grid().points();

    std::vector<TrialResult> out;
    for (const Model model : config.models) {
        const QuaternionSeries qs = quaternion_signal(frames, sig.sample_rate_hz);
        const ComplexSeries cs = complex_signal(frames, sig.sample_rate_hz);
        CovarianceEstimate cov =
            model == Model::quaternion ? build_covariance(qs, config.m, config.k, n - 1)
                                       : build_covariance(cs, config.m, config.k, n - 1);
        if (config.loading_factor) {
            cov.loading = *config.loading_factor / 1e-10 * default_loading(cov.r);
        }
        TrialResult trial{model, {}};
        for (const Estimator e : estimators) {
            EstimatorResult r;
            switch (e) {
                case Estimator::ft:
                    r.spectrum = model == Model::quaternion ? fourier_spectrum(qs, grid) : fourier_spectrum(cs, grid);
                    break;
                case Estimator::mvdr:
                    r.spectrum = mvdr_spectrum(cov, grid);
                    break;
                case Estimator::music:
                    r.spectrum = music_spectrum(cov, config.m0_for(model), grid);
                    break;
            }
            r.peaks = find_peaks(r.spectrum, config.threshold_for(e));
            r.report = classify_peaks(r.peaks, config.pairing_tolerance());
            trial.estimates.push_back(std::move(r));
        }
        out.push_back(std::move(trial));
    }
    return out;
}

SpectrumRunSummary run_spectrum(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    const auto estimators = config.estimators_or({Estimator::ft, Estimator::mvdr, Estimator::music});
    const double snr_db = config.snr.start_db;
    prepare_output_dir(config.output_dir);

    SpectrumRunSummary summary;
    summary.results = analyze_trial(config, estimators, snr_db, config.seed);

    std::ostringstream text;
    text << "# spectrum run\n"
         << "# reference setup: 50 Hz fundamental, 20 kHz sampling, phase pi/7, K = 80, M = 32,\n"
         << "#   second and third harmonics at 6 % of V1, SNR 40 dB\n"
         << "# effective configuration:\n";
    describe(text, config);
    text << "# samples generated: M + K - 1 = " << config.samples_per_trial() << " (n = 0 .. "
         << config.samples_per_trial() - 1 << ")\n";
    for (const auto& trial : summary.results) {
        for (std::size_t i = 0; i < estimators.size(); ++i) {
            const auto& r = trial.estimates[i];
            const std::string stem = std::string(to_string(trial.model)) + "_" + std::string(to_string(estimators[i]));
            const auto spec_path = config.output_dir / ("spectrum_" + stem + ".csv");
            const auto report_path = config.output_dir / ("report_" + stem + ".csv");
            {
                auto os = open_output(spec_path);
                write_spectrum_csv(os, r.spectrum);
                finish_output(os, spec_path);
            }
            {
                auto os = open_output(report_path);
                write_report_csv(os, r.report);
                finish_output(os, report_path);
            }
            summary.written.push_back(spec_path);
            summary.written.push_back(report_path);

            text << "\n[" << to_string(trial.model) << " " << to_string(estimators[i]) << "] threshold "
                 << fmt17(config.threshold_for(estimators[i])) << " dB";
            if (estimators[i] != Estimator::ft) {
                text << ", max vector residue " << r.spectrum.max_vector_residue;
            }
            if (estimators[i] == Estimator::music) {
                text << ", M0 = " << config.m0_for(trial.model);
            }
            text << '\n';
            if (r.report.detections.empty()) {
                text << "  (no detections)\n";
            }
            for (const auto& d : r.report.detections) {
                char line[160];
                std::snprintf(line, sizeof line, "  %10.3f Hz  %-29s %8.2f dB", d.frequency_hz,
                              std::string(to_string(d.sequence)).c_str(), 10.0 * std::log10(d.peak_value));
                text << line;
                if (d.mirror_frequency_hz) {
                    std::snprintf(line, sizeof line, "  mirror %.3f Hz", *d.mirror_frequency_hz);
                    text << line;
                }
                text << '\n';
            }
        }
    }

    const auto summary_path = config.output_dir / "summary.txt";
    auto os = open_output(summary_path);
    os << text.str();
    finish_output(os, summary_path);
    summary.written.push_back(summary_path);
    log << text.str();
    return summary;
}

std::vector<MonteCarloRow> montecarlo_table(const ExperimentConfig& config, unsigned threads) {
    config.validate();
    const auto estimators = config.estimators_or({Estimator::mvdr, Estimator::music});
    const auto snrs = config.snr.values();
    const auto truth = true_harmonics(config.signal(snrs.front(), config.seed));
    std::vector<int> orders;
    for (const auto& h : config.signal(snrs.front(), config.seed).harmonics) {
        if (h.amplitude > 0.0) {
            orders.push_back(h.order);
        }
    }

    const std::size_t per_trial = config.models.size() * estimators.size() * truth.size();
    const std::size_t tasks = snrs.size() * config.trials;
    // errors[task][(model, estimator, harmonic)]
    std::vector<std::vector<std::optional<double>>> errors(tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks; t = next++) {
            try {
                const double snr_db = snrs[t / config.trials];
                const auto trial = t % config.trials;
                const auto results = analyze_trial(config, estimators, snr_db, trial_seed(config.seed, trial));
                std::vector<std::optional<double>> row;
                row.reserve(per_trial);
                for (const auto& r : results) {
                    for (const auto& e : r.estimates) {
                        for (const auto& err : estimate_frequency_error(e.report, truth, config.match_window_hz)) {
                            row.push_back(err.abs_error_hz);
                        }
                    }
                }
                errors[t] = std::move(row);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = tasks;
            }
        }
    };
    const unsigned n_threads = std::max(1u, threads != 0 ? threads : std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    std::vector<MonteCarloRow> rows;
    for (std::size_t s = 0; s < snrs.size(); ++s) {
        std::size_t slot = 0;
        for (const Model model : config.models) {
            for (const Estimator e : estimators) {
                for (std::size_t h = 0; h < truth.size(); ++h, ++slot) {
                    double sum = 0.0;
                    std::size_t hits = 0;
                    for (std::size_t trial = 0; trial < config.trials; ++trial) {
                        const auto& err = errors[s * config.trials + trial][slot];
                        if (err) {
                            sum += *err;
                            ++hits;
                        }
                    }
                    rows.push_back({snrs[s], model, e, orders[h],
                                    hits > 0 ? sum / static_cast<double>(hits) : std::nan(""),
                                    static_cast<double>(config.trials - hits) / static_cast<double>(config.trials)});
                }
            }
        }
    }
    return rows;
}

void write_montecarlo_csv(std::ostream& os, const std::vector<MonteCarloRow>& rows) {
    os << "snr_db,model,estimator,harmonic,mean_abs_error_hz,miss_rate\n";
    for (const auto& r : rows) {
        os << fmt17(r.snr_db) << ',' << to_string(r.model) << ',' << to_string(r.estimator) << ',' << r.harmonic << ','
           << (std::isnan(r.mean_abs_error_hz) ? std::string("nan") : fmt17(r.mean_abs_error_hz)) << ','
           << fmt17(r.miss_rate) << '\n';
    }
}

std::vector<MonteCarloRow> run_montecarlo(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    prepare_output_dir(config.output_dir);
    const auto rows = montecarlo_table(config);

    const auto csv_path = config.output_dir / "montecarlo.csv";
    {
        auto os = open_output(csv_path);
        write_montecarlo_csv(os, rows);
        finish_output(os, csv_path);
    }

    std::ostringstream text;
    text << "# monte carlo run, " << config.trials << " trials per SNR, per-trial seed = seed xor trial\n"
         << "# effective configuration:\n";
    describe(text, config);
    text << "# samples per trial: M + K - 1 = " << config.samples_per_trial() << '\n'
         << "#\n#  snr_db  model       estimator  h   mean_abs_error_hz  miss_rate\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "  %6.1f  %-10s  %-9s  %d   %17.6g  %9.3f\n", r.snr_db,
                      std::string(to_string(r.model)).c_str(), std::string(to_string(r.estimator)).c_str(),
                      r.harmonic, r.mean_abs_error_hz, r.miss_rate);
        text << line;
    }
    const auto summary_path = config.output_dir / "summary.txt";
    auto os = open_output(summary_path);
    os << text.str();
    finish_output(os, summary_path);
    log << text.str();
    return rows;
}

std::vector<std::filesystem::path> run_simulate(const ExperimentConfig& config, std::ostream& log) {
    config.validate();
    prepare_output_dir(config.output_dir);
    const ThreePhaseConfig sig = config.signal(config.snr.start_db, config.seed);
    const std::size_t count = config.count.value_or(config.samples_per_trial());
    const auto frames = gen_three_phase(sig, 0, count);

    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = config.output_dir / name;
        auto os = open_output(path);
        body(os);
        finish_output(os, path);
        written.push_back(path);
    };
    emit("three_phase.csv", [&](std::ostream& os) { write_frames_csv(os, frames, 0); });
    emit("complex.csv", [&](std::ostream& os) { write_complex_csv(os, complex_signal(frames, sig.sample_rate_hz), 0); });
    emit("quaternion.csv",
         [&](std::ostream& os) { write_quaternion_csv(os, quaternion_signal(frames, sig.sample_rate_hz), 0); });

    log << "# simulate: " << count << " samples, noise sigma " << sig.noise_sigma << " per phase\n";
    for (const auto& p : written) {
        log << "wrote " << p.string() << '\n';
    }
    return written;
}

}  // namespace qharm
