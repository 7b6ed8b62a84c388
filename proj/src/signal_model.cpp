#include "qharm/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qharm {
namespace {

constexpr double kTwoPiOver3 = 2.0 * std::numbers::pi / 3.0;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Angle h(ΩnTs + φ) for harmonic order h at sample n.
double harmonic_angle(const ThreePhaseConfig& config, int order, std::int64_t n) {
    const double omega = 2.0 * std::numbers::pi * config.fundamental_hz;
    return order * (omega * static_cast<double>(n) * config.sample_period() + config.phase_rad);
}

std::vector<std::vector<double>> read_csv_rows(std::istream& is, std::size_t columns, const std::string& header) {
    std::string line;
    if (!std::getline(is, line)) {
        throw std::runtime_error("CSV: missing header, expected '" + header + "'");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw std::runtime_error("CSV: unexpected header '" + line + "', expected '" + header + "'");
    }
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        std::vector<double> row;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw std::runtime_error("CSV: bad number '" + cell + "' on line " + std::to_string(line_no));
            }
        }
        if (row.size() != columns) {
            throw std::runtime_error("CSV: expected " + std::to_string(columns) + " fields on line " +
                                     std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void ThreePhaseConfig::validate() const {
    if (!(fundamental_hz > 0.0) || !std::isfinite(fundamental_hz)) {
        throw std::invalid_argument("fundamental_hz must be a positive finite number");
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw std::invalid_argument("sample_rate_hz must be a positive finite number");
    }
    if (!std::isfinite(phase_rad)) {
        throw std::invalid_argument("phase_rad must be finite");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw std::invalid_argument("noise_sigma must be finite and >= 0");
    }
    std::set<int> seen;
    bool has_fundamental = false;
    for (const auto& h : harmonics) {
        if (h.order < 1) {
            throw std::invalid_argument("harmonic order must be >= 1, got " + std::to_string(h.order));
        }
        if (!seen.insert(h.order).second) {
            throw std::invalid_argument("harmonic order " + std::to_string(h.order) + " listed twice");
        }
        if (!(h.amplitude >= 0.0) || !std::isfinite(h.amplitude)) {
            throw std::invalid_argument("harmonic " + std::to_string(h.order) + " amplitude must be >= 0");
        }
        if (h.order * fundamental_hz >= sample_rate_hz / 2.0) {
            throw std::invalid_argument("harmonic " + std::to_string(h.order) + " at " +
                                        fmt17(h.order * fundamental_hz) + " Hz aliases at sample rate " +
                                        fmt17(sample_rate_hz) + " Hz");
        }
        has_fundamental = has_fundamental || (h.order == 1 && h.amplitude > 0.0);
    }
    if (!has_fundamental) {
        throw std::invalid_argument("harmonic order 1 must be present with positive amplitude");
    }
}

double ThreePhaseConfig::fundamental_amplitude() const {
    for (const auto& h : harmonics) {
        if (h.order == 1) {
            return h.amplitude;
        }
    }
    return 0.0;
}

SequenceKind sequence_of(int order) {
    switch (order % 3) {
        case 1:
            return SequenceKind::positive;
        case 2:
            return SequenceKind::negative;
        default:
            return SequenceKind::zero;
    }
}

std::vector<ThreePhaseFrame> gen_three_phase(const ThreePhaseConfig& config, std::int64_t n0, std::size_t count) {
    std::vector<ThreePhaseFrame> frames(count);
    const double omega_ts = 2.0 * std::numbers::pi * config.fundamental_hz * config.sample_period();
    for (std::size_t i = 0; i < count; ++i) {
        const double t = omega_ts * static_cast<double>(n0 + static_cast<std::int64_t>(i)) + config.phase_rad;
        ThreePhaseFrame& f = frames[i];
        for (const auto& h : config.harmonics) {
            f.va += h.amplitude * std::cos(h.order * t);
            f.vb += h.amplitude * std::cos(h.order * (t - kTwoPiOver3));
            f.vc += h.amplitude * std::cos(h.order * (t + kTwoPiOver3));
        }
    }
    if (config.noise_sigma > 0.0) {
        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> noise(0.0, config.noise_sigma);
        for (auto& f : frames) {
            f.va += noise(rng);
            f.vb += noise(rng);
            f.vc += noise(rng);
        }
    }
    return frames;
}

AlphaBeta clarke(const ThreePhaseFrame& frame) {
    constexpr double half_sqrt3 = std::numbers::sqrt3 / 2.0;
    return {(2.0 / 3.0) * (frame.va - 0.5 * frame.vb - 0.5 * frame.vc),
            (2.0 / 3.0) * (half_sqrt3 * frame.vb - half_sqrt3 * frame.vc)};
}

ComplexSeries complex_signal(std::span<const ThreePhaseFrame> frames, double sample_rate_hz) {
    ComplexSeries out{{}, sample_rate_hz};
    out.samples.reserve(frames.size());
    for (const auto& f : frames) {
        const AlphaBeta ab = clarke(f);
        out.samples.emplace_back(ab.alpha, ab.beta);
    }
    return out;
}

QuaternionSeries quaternion_signal(std::span<const ThreePhaseFrame> frames, double sample_rate_hz) {
    QuaternionSeries out{{}, sample_rate_hz};
    out.samples.reserve(frames.size());
    for (const auto& f : frames) {
        out.samples.emplace_back(0.0, f.va, f.vb, f.vc);
    }
    return out;
}

std::complex<double> analytic_complex_decomposition(const ThreePhaseConfig& config, std::int64_t n) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& h : config.harmonics) {
        const double angle = harmonic_angle(config, h.order, n);
        switch (sequence_of(h.order)) {
            case SequenceKind::positive:
                acc += std::polar(h.amplitude, angle);
                break;
            case SequenceKind::negative:
                acc += std::polar(h.amplitude, -angle);
                break;
            case SequenceKind::zero:
                break;
        }
    }
    return acc;
}

Quaternion analytic_quaternion_decomposition(const ThreePhaseConfig& config, std::int64_t n) {
    const FrequencyAxis axis = FrequencyAxis::three_phase();
    const Quaternion rotating{0.0, 1.0, -0.5, -0.5};  // (2i - j - k)/2, orthogonal to the axis
    const Quaternion common{0.0, 0.5, 0.5, 0.5};      // (i + j + k)/2, along the axis
    Quaternion acc;
    for (const auto& h : config.harmonics) {
        const double angle = harmonic_angle(config, h.order, n);
        switch (sequence_of(h.order)) {
            case SequenceKind::positive:
                acc += h.amplitude * (rotating * qexp_axis(axis, -angle));
                break;
            case SequenceKind::negative:
                acc += h.amplitude * (rotating * qexp_axis(axis, angle));
                break;
            case SequenceKind::zero:
                acc += h.amplitude * (common * (qexp_axis(axis, angle) + qexp_axis(axis, -angle)));
                break;
        }
    }
    return acc;
}

double snr_to_sigma(double snr_db, double v1) {
    if (!(v1 > 0.0)) {
        throw std::invalid_argument("snr_to_sigma: fundamental amplitude must be positive");
    }
    if (std::isinf(snr_db) && snr_db > 0.0) {
        return 0.0;
    }
    return std::sqrt((v1 * v1 / 2.0) / std::pow(10.0, snr_db / 10.0));
}

void write_frames_csv(std::ostream& os, std::span<const ThreePhaseFrame> frames, std::int64_t n0) {
    os << "n,va,vb,vc\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
        os << n0 + static_cast<std::int64_t>(i) << ',' << fmt17(frames[i].va) << ',' << fmt17(frames[i].vb) << ','
           << fmt17(frames[i].vc) << '\n';
    }
}

void write_complex_csv(std::ostream& os, const ComplexSeries& series, std::int64_t n0) {
    os << "n,re,im\n";
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
        os << n0 + static_cast<std::int64_t>(i) << ',' << fmt17(series.samples[i].real()) << ','
           << fmt17(series.samples[i].imag()) << '\n';
    }
}

void write_quaternion_csv(std::ostream& os, const QuaternionSeries& series, std::int64_t n0) {
    os << "n,w,x,y,z\n";
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
        const Quaternion& q = series.samples[i];
        os << n0 + static_cast<std::int64_t>(i) << ',' << fmt17(q.w) << ',' << fmt17(q.x) << ',' << fmt17(q.y) << ','
           << fmt17(q.z) << '\n';
    }
}

std::vector<ThreePhaseFrame> read_frames_csv(std::istream& is) {
    std::vector<ThreePhaseFrame> out;
    for (const auto& row : read_csv_rows(is, 4, "n,va,vb,vc")) {
        out.push_back({row[1], row[2], row[3]});
    }
    return out;
}

std::vector<std::complex<double>> read_complex_csv(std::istream& is) {
    std::vector<std::complex<double>> out;
    for (const auto& row : read_csv_rows(is, 3, "n,re,im")) {
        out.emplace_back(row[1], row[2]);
    }
    return out;
}

std::vector<Quaternion> read_quaternion_csv(std::istream& is) {
    std::vector<Quaternion> out;
    for (const auto& row : read_csv_rows(is, 5, "n,w,x,y,z")) {
        out.emplace_back(row[1], row[2], row[3], row[4]);
    }
    return out;
}

}  // namespace qharm
