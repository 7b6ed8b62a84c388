#include "qharm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qharm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr double kFlatRippleDb = 1e-9;

double to_db(double v) { return 10.0 * std::log10(std::max(v, std::numeric_limits<double>::min())); }

std::vector<Quaternion> embed(const std::vector<std::complex<double>>& samples) {
    std::vector<Quaternion> out;
    out.reserve(samples.size());
    for (const auto& c : samples) {
        out.emplace_back(c.real(), c.imag(), 0.0, 0.0);
    }
    return out;
}

CovarianceEstimate covariance_from(std::span<const Quaternion> v, Model model, std::size_t m, std::size_t k,
                                   std::size_t end_index, double sample_rate_hz) {
    if (m == 0 || k == 0) {
        throw std::invalid_argument("build_covariance: M and K must be >= 1");
    }
    if (end_index >= v.size()) {
        throw std::invalid_argument("build_covariance: end_index " + std::to_string(end_index) +
                                    " is past the series end (" + std::to_string(v.size()) + " samples)");
    }
    if (end_index + 2 < m + k) {
        throw std::invalid_argument("build_covariance: need at least M + K - 1 = " + std::to_string(m + k - 1) +
                                    " samples up to end_index, have " + std::to_string(end_index + 1));
    }
    // Snapshot entry (row, col) = v(end - col - row).
    auto snap = [&](std::size_t row, std::size_t col) -> const Quaternion& { return v[end_index - col - row]; };

    QMatrix r(m, m);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            Quaternion acc;
            for (std::size_t c = 0; c < k; ++c) {
                acc += snap(a, c) * qconj(snap(b, c));
            }
            acc *= inv_k;
            if (a == b) {
                acc = Quaternion{acc.w};
            }
            r(a, b) = acc;
            r(b, a) = qconj(acc);
        }
    }
    CovarianceEstimate out;
    out.loading = default_loading(r);
    out.r = std::move(r);
    out.model = model;
    out.m = m;
    out.k = k;
    out.sample_rate_hz = sample_rate_hz;
    return out;
}

struct FormResult {
    double value;
    double residue;
};

// s^H y, with the vector part measured against |s||y|.
FormResult quadratic_form(const QMatrix& s, const QMatrix& y) {
    Quaternion acc;
    double s2 = 0.0;
    double y2 = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i) {
        acc += qconj(s(i, 0)) * y(i, 0);
        s2 += qnorm2(s(i, 0));
        y2 += qnorm2(y(i, 0));
    }
    const double scale = std::sqrt(s2 * y2);
    return {acc.w, scale > 0.0 ? acc.vector_norm() / scale : 0.0};
}

void check_grid(std::span<const double> grid_hz) {
    for (std::size_t i = 1; i < grid_hz.size(); ++i) {
        if (!(grid_hz[i] > grid_hz[i - 1])) {
            throw std::invalid_argument("spectrum grid must be strictly increasing");
        }
    }
}

template <typename Form>
Spectrum evaluate(const CovarianceEstimate& cov, Estimator estimator, std::span<const double> grid_hz, Form&& form) {
    check_grid(grid_hz);
    Spectrum spec;
    spec.estimator = estimator;
    spec.model = cov.model;
    spec.grid_hz.assign(grid_hz.begin(), grid_hz.end());
    spec.values.reserve(grid_hz.size());
    const double ts = 1.0 / cov.sample_rate_hz;
    for (const double f : grid_hz) {
        const QMatrix s = sweep_vector(cov.model, kTwoPi * f, cov.m, ts);
        const FormResult q = form(s);
        if (q.residue > kRealnessTolerance) {
            std::ostringstream msg;
            msg << to_string(estimator) << " (" << to_string(cov.model) << "): quadratic form at " << f
                << " Hz has relative vector residue " << q.residue;
            throw RealnessError(msg.str());
        }
        spec.max_vector_residue = std::max(spec.max_vector_residue, q.residue);
        spec.values.push_back(1.0 / std::max(q.value, kDenominatorFloor));
    }
    return spec;
}

Spectrum fourier_from(std::span<const Quaternion> v, Model model, double sample_rate_hz,
                      std::span<const double> grid_hz) {
    if (v.empty()) {
        throw std::invalid_argument("fourier_spectrum: series is empty");
    }
    check_grid(grid_hz);
    const FrequencyAxis axis = axis_for(model);
    const double ts = 1.0 / sample_rate_hz;
    Spectrum spec;
    spec.estimator = Estimator::ft;
    spec.model = model;
    spec.grid_hz.assign(grid_hz.begin(), grid_hz.end());
    spec.values.reserve(grid_hz.size());
    for (const double f : grid_hz) {
        const double omega_ts = kTwoPi * f * ts;
        Quaternion acc;
        for (std::size_t n = 0; n < v.size(); ++n) {
            // Kernel on the left so a·exp(-mu h θ) with a ⟂ mu lands at +h, like MVDR/MUSIC.
            acc += qexp_axis(axis, -omega_ts * static_cast<double>(n)) * v[n];
        }
        spec.values.push_back(qnorm(acc) / static_cast<double>(v.size()));
    }
    return spec;
}

}  // namespace

std::string_view to_string(Model m) { return m == Model::complex ? "complex" : "quaternion"; }

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::ft:
            return "ft";
        case Estimator::mvdr:
            return "mvdr";
        case Estimator::music:
            return "music";
    }
    return "?";
}

std::string_view to_string(SequenceClass c) {
    return c == SequenceClass::zero ? "zero_sequence" : "positive_or_negative_sequence";
}

FrequencyAxis axis_for(Model m) {
    return m == Model::complex ? FrequencyAxis::complex_plane() : FrequencyAxis::three_phase();
}

double default_loading(const QMatrix& r) {
    double trace = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i) {
        trace += r(i, i).w;
    }
    return r.rows() == 0 ? 0.0 : 1e-10 * trace / static_cast<double>(r.rows());
}

CovarianceEstimate build_covariance(const QuaternionSeries& series, std::size_t m, std::size_t k,
                                    std::size_t end_index) {
    return covariance_from(series.samples, Model::quaternion, m, k, end_index, series.sample_rate_hz);
}

CovarianceEstimate build_covariance(const ComplexSeries& series, std::size_t m, std::size_t k,
                                    std::size_t end_index) {
    const auto v = embed(series.samples);
    return covariance_from(v, Model::complex, m, k, end_index, series.sample_rate_hz);
}

std::vector<std::complex<double>> sweep_complex(double omega_rad_s, std::size_t m, double ts) {
    std::vector<std::complex<double>> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = std::polar(1.0, -omega_rad_s * ts * static_cast<double>(i));
    }
    return out;
}

QMatrix sweep_quaternion(double omega_rad_s, std::size_t m, double ts) {
    return sweep_vector(Model::quaternion, omega_rad_s, m, ts);
}

QMatrix sweep_vector(Model model, double omega_rad_s, std::size_t m, double ts) {
    const FrequencyAxis axis = axis_for(model);
    QMatrix s(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        s(i, 0) = qexp_axis(axis, -omega_rad_s * ts * static_cast<double>(i));
    }
    return s;
}

std::vector<double> FrequencyGrid::points() const {
    validate();
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop_hz - start_hz) / step_hz + 1e-6)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(start_hz + step_hz * static_cast<double>(i));
    }
    return out;
}

void FrequencyGrid::validate() const {
    if (!std::isfinite(start_hz) || !std::isfinite(stop_hz) || !(step_hz > 0.0) || !(stop_hz > start_hz)) {
        throw std::invalid_argument("grid must satisfy start < stop and step > 0");
    }
}

Spectrum mvdr_spectrum(const CovarianceEstimate& cov, std::span<const double> grid_hz) {
    QMatrix loaded = cov.r;
    for (std::size_t i = 0; i < loaded.rows(); ++i) {
        loaded(i, i).w += cov.loading;
    }
    const HermitianSolver solver(loaded);
    return evaluate(cov, Estimator::mvdr, grid_hz, [&](const QMatrix& s) { return quadratic_form(s, solver.solve(s)); });
}

Spectrum music_spectrum(const CovarianceEstimate& cov, std::size_t m0, std::span<const double> grid_hz) {
    const EigenDecomposition eig = qeig_hermitian(cov.r);
    const QMatrix un = noise_subspace(eig, m0);
    const QMatrix un_h = hermitian_transpose(un);
    // |s^H U_N|² evaluated as s^H (U_N (U_N^H s)).
    return evaluate(cov, Estimator::music, grid_hz,
                    [&](const QMatrix& s) { return quadratic_form(s, qmatmul(un, qmatmul(un_h, s))); });
}

Spectrum fourier_spectrum(const QuaternionSeries& series, std::span<const double> grid_hz) {
    return fourier_from(series.samples, Model::quaternion, series.sample_rate_hz, grid_hz);
}

Spectrum fourier_spectrum(const ComplexSeries& series, std::span<const double> grid_hz) {
    const auto v = embed(series.samples);
    return fourier_from(v, Model::complex, series.sample_rate_hz, grid_hz);
}

std::vector<Peak> find_peaks(const Spectrum& spec, double threshold_db) {
    const auto& f = spec.grid_hz;
    const std::size_t n = spec.values.size();
    std::vector<Peak> peaks;
    if (n < 3) {
        return peaks;
    }
    std::vector<double> db(n);
    std::transform(spec.values.begin(), spec.values.end(), db.begin(), to_db);
    const double floor_db = *std::max_element(db.begin(), db.end()) - threshold_db;
    const double step = (f.back() - f.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // Rounding-level ripple on a flat spectrum is not a peak.
        if (!(db[i] > db[i - 1] + kFlatRippleDb && db[i] > db[i + 1] + kFlatRippleDb) || !(db[i] > floor_db)) {
            continue;
        }
        const double a = db[i - 1];
        const double b = db[i];
        const double c = db[i + 1];
        const double denom = a - 2.0 * b + c;  // < 0 at a strict maximum
        const double offset = 0.5 * (a - c) / denom;
        const double vertex_db = b - 0.25 * (a - c) * offset;
        peaks.push_back({f[i] + offset * step, std::pow(10.0, vertex_db / 10.0)});
    }
    return peaks;
}

HarmonicReport classify_peaks(std::span<const Peak> peaks, double pairing_tol_hz) {
    std::vector<std::size_t> order(peaks.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return peaks[a].value > peaks[b].value; });

    std::vector<bool> used(peaks.size(), false);
    HarmonicReport report;
    for (const std::size_t i : order) {
        if (used[i]) {
            continue;
        }
        used[i] = true;
        const Peak& p = peaks[i];
        std::optional<std::size_t> partner;
        double best = pairing_tol_hz;
        for (std::size_t j = 0; j < peaks.size(); ++j) {
            if (used[j] || p.frequency_hz * peaks[j].frequency_hz >= 0.0) {
                continue;
            }
            const double gap = std::fabs(p.frequency_hz + peaks[j].frequency_hz);
            if (gap <= best) {
                best = gap;
                partner = j;
            }
        }
        if (!partner) {
            report.detections.push_back({p.frequency_hz, SequenceClass::positive_or_negative, p.value, std::nullopt});
            continue;
        }
        used[*partner] = true;
        const Peak& q = peaks[*partner];
        const double mirror = std::min(p.frequency_hz, q.frequency_hz);
        report.detections.push_back({0.5 * (std::fabs(p.frequency_hz) + std::fabs(q.frequency_hz)),
                                     SequenceClass::zero, std::max(p.value, q.value), mirror});
    }
    std::sort(report.detections.begin(), report.detections.end(),
              [](const Detection& a, const Detection& b) { return a.frequency_hz < b.frequency_hz; });
    return report;
}

std::vector<TrueHarmonic> true_harmonics(const ThreePhaseConfig& config) {
    std::vector<TrueHarmonic> out;
    for (const auto& h : config.harmonics) {
        if (h.amplitude <= 0.0) {
            continue;
        }
        const double f = h.order * config.fundamental_hz;
        switch (sequence_of(h.order)) {
            case SequenceKind::positive:
                out.push_back({f, SequenceClass::positive_or_negative});
                break;
            case SequenceKind::negative:
                out.push_back({-f, SequenceClass::positive_or_negative});
                break;
            case SequenceKind::zero:
                out.push_back({f, SequenceClass::zero});
                break;
        }
    }
    return out;
}

std::vector<HarmonicError> estimate_frequency_error(const HarmonicReport& report, std::span<const TrueHarmonic> truth,
                                                    double match_window_hz) {
    std::vector<HarmonicError> out;
    out.reserve(truth.size());
    for (const auto& t : truth) {
        const double target = t.sequence == SequenceClass::zero ? std::fabs(t.frequency_hz) : t.frequency_hz;
        HarmonicError err{t.frequency_hz, std::nullopt};
        for (const auto& d : report.detections) {
            if (d.sequence != t.sequence) {
                continue;
            }
            const double e = std::fabs(d.frequency_hz - target);
            if (e <= match_window_hz && (!err.abs_error_hz || e < *err.abs_error_hz)) {
                err.abs_error_hz = e;
            }
        }
        out.push_back(err);
    }
    return out;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spec) {
    os << "freq_hz,value_db\n";
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        os << fmt17(spec.grid_hz[i]) << ',' << fmt17(to_db(spec.values[i])) << '\n';
    }
}

void write_report_csv(std::ostream& os, const HarmonicReport& report) {
    os << "freq_hz,class,peak_db,mirror_hz\n";
    for (const auto& d : report.detections) {
        os << fmt17(d.frequency_hz) << ',' << to_string(d.sequence) << ',' << fmt17(to_db(d.peak_value)) << ',';
        if (d.mirror_frequency_hz) {
            os << fmt17(*d.mirror_frequency_hz);
        }
        os << '\n';
    }
}

}  // namespace qharm
