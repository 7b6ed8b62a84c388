#pragma once

/**
 * @file signal_model.hpp
 * @brief Balanced three-phase generator, Clarke (alpha, beta) transform and the
 *        quaternion construction v = i·va + j·vb + k·vc.
 *
 * Harmonic order h falls into one of three sequence classes:
 *   h ≡ 1 (mod 3)  positive sequence
 *   h ≡ 2 (mod 3)  negative sequence
 *   h ≡ 0 (mod 3)  zero sequence (identical in all three phases)
 * The Clarke transform annihilates the zero-sequence class; the quaternion
 * construction keeps all three.
 */

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qharm/quaternion.hpp"

namespace qharm {

struct Harmonic {
    int order{1};
    double amplitude{1.0};  // absolute, volts
};

struct ThreePhaseConfig {
    double fundamental_hz{50.0};
    double sample_rate_hz{20000.0};
    double phase_rad{0.0};
    std::vector<Harmonic> harmonics{{1, 1.0}};
    double noise_sigma{0.0};  // per-phase standard deviation
    std::uint64_t seed{0};

    /// Throws std::invalid_argument with a message naming the offending field.
    void validate() const;
    [[nodiscard]] double sample_period() const { return 1.0 / sample_rate_hz; }
    [[nodiscard]] double fundamental_amplitude() const;
};

struct ThreePhaseFrame {
    double va{0.0};
    double vb{0.0};
    double vc{0.0};
};

struct ComplexSeries {
    std::vector<std::complex<double>> samples;
    double sample_rate_hz{1.0};
};

struct QuaternionSeries {
    std::vector<Quaternion> samples;
    double sample_rate_hz{1.0};
};

enum class SequenceKind { positive, negative, zero };

[[nodiscard]] SequenceKind sequence_of(int order);

/// Frames for sample indices n0 .. n0+count-1. Noise is drawn sequentially
/// from a generator seeded with config.seed, so equal seeds give equal output.
[[nodiscard]] std::vector<ThreePhaseFrame> gen_three_phase(const ThreePhaseConfig& config, std::int64_t n0,
                                                           std::size_t count);

struct AlphaBeta {
    double alpha{0.0};
    double beta{0.0};
};

[[nodiscard]] AlphaBeta clarke(const ThreePhaseFrame& frame);

[[nodiscard]] ComplexSeries complex_signal(std::span<const ThreePhaseFrame> frames, double sample_rate_hz);
[[nodiscard]] QuaternionSeries quaternion_signal(std::span<const ThreePhaseFrame> frames, double sample_rate_hz);

// Closed-form noiseless oracles.
[[nodiscard]] std::complex<double> analytic_complex_decomposition(const ThreePhaseConfig& config, std::int64_t n);
[[nodiscard]] Quaternion analytic_quaternion_decomposition(const ThreePhaseConfig& config, std::int64_t n);

/// Per-phase noise standard deviation giving `snr_db` relative to the
/// fundamental's mean power v1²/2. Infinite SNR yields 0.
[[nodiscard]] double snr_to_sigma(double snr_db, double v1);

// CSV with at least 17 significant digits so values read back exactly.
void write_frames_csv(std::ostream& os, std::span<const ThreePhaseFrame> frames, std::int64_t n0);
void write_complex_csv(std::ostream& os, const ComplexSeries& series, std::int64_t n0);
void write_quaternion_csv(std::ostream& os, const QuaternionSeries& series, std::int64_t n0);

/// Parse the formats above. Throws std::runtime_error on malformed input.
[[nodiscard]] std::vector<ThreePhaseFrame> read_frames_csv(std::istream& is);
[[nodiscard]] std::vector<std::complex<double>> read_complex_csv(std::istream& is);
[[nodiscard]] std::vector<Quaternion> read_quaternion_csv(std::istream& is);

}  // namespace qharm
