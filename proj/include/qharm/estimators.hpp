#pragma once

/**
 * @file estimators.hpp
 * @brief Covariance estimation, sweep vectors, MVDR / MUSIC / Fourier spectra,
 *        peak picking and sequence classification.
 *
 * Both signal models share one code path. A complex sample a + bi is carried
 * as the quaternion a + bi, and its sweep vectors use the axis i instead of
 * (i+j+k)/√3; complex numbers commute, so the quaternion machinery reduces
 * exactly to the complex formulas.
 */

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qharm/qmatrix.hpp"
#include "qharm/signal_model.hpp"

namespace qharm {

enum class Model { complex, quaternion };
enum class Estimator { ft, mvdr, music };

[[nodiscard]] std::string_view to_string(Model m);
[[nodiscard]] std::string_view to_string(Estimator e);

[[nodiscard]] FrequencyAxis axis_for(Model m);

/// Raised when a quadratic form that must be real has a vector part above tolerance.
class RealnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Relative bound on the vector part of s^H y before it is discarded.
inline constexpr double kRealnessTolerance = 1e-8;
/// Floor for spectrum denominators.
inline constexpr double kDenominatorFloor = 1e-300;

struct CovarianceEstimate {
    QMatrix r;            // unloaded, M×M Hermitian
    Model model{Model::quaternion};
    std::size_t m{0};     // window length
    std::size_t k{0};     // snapshots
    double loading{0.0};  // added to the diagonal before inversion only
    double sample_rate_hz{1.0};
};

/// 1e-10 · trace(R) / M
[[nodiscard]] double default_loading(const QMatrix& r);

/// R = V V^H / K with V(m, k) = v(end_index - k - m). Throws
/// std::invalid_argument if end_index + 1 < M + K - 1 or end_index is past the series.
[[nodiscard]] CovarianceEstimate build_covariance(const QuaternionSeries& series, std::size_t m, std::size_t k,
                                                  std::size_t end_index);
[[nodiscard]] CovarianceEstimate build_covariance(const ComplexSeries& series, std::size_t m, std::size_t k,
                                                  std::size_t end_index);

[[nodiscard]] std::vector<std::complex<double>> sweep_complex(double omega_rad_s, std::size_t m, double ts);
[[nodiscard]] QMatrix sweep_quaternion(double omega_rad_s, std::size_t m, double ts);
/// Entries exp(-mu Ω Ts m) for the model's axis, as a quaternion column.
[[nodiscard]] QMatrix sweep_vector(Model model, double omega_rad_s, std::size_t m, double ts);

struct FrequencyGrid {
    double start_hz{-500.0};
    double stop_hz{500.0};
    double step_hz{0.5};

    /// start, start+step, ... up to stop (inclusive within step/1e6).
    [[nodiscard]] std::vector<double> points() const;
    void validate() const;
};

struct Spectrum {
    std::vector<double> grid_hz;
    std::vector<double> values;
    Estimator estimator{Estimator::mvdr};
    Model model{Model::quaternion};
    /// Largest |vec(s^H y)| / (|s| |y|) seen while evaluating; 0 for FT.
    double max_vector_residue{0.0};
};

[[nodiscard]] Spectrum mvdr_spectrum(const CovarianceEstimate& cov, std::span<const double> grid_hz);
[[nodiscard]] Spectrum music_spectrum(const CovarianceEstimate& cov, std::size_t m0, std::span<const double> grid_hz);
[[nodiscard]] Spectrum fourier_spectrum(const QuaternionSeries& series, std::span<const double> grid_hz);
[[nodiscard]] Spectrum fourier_spectrum(const ComplexSeries& series, std::span<const double> grid_hz);

struct Peak {
    double frequency_hz{0.0};
    double value{0.0};  // linear; 10·log10 gives dB
};

/// Strict local maxima (by more than 1e-9 dB) above (max - threshold_db), refined by a parabola
/// through the three log-values around each maximum.
[[nodiscard]] std::vector<Peak> find_peaks(const Spectrum& spec, double threshold_db);

enum class SequenceClass { positive_or_negative, zero };

[[nodiscard]] std::string_view to_string(SequenceClass c);

struct Detection {
    double frequency_hz{0.0};
    SequenceClass sequence{SequenceClass::positive_or_negative};
    double peak_value{0.0};
    std::optional<double> mirror_frequency_hz;
};

struct HarmonicReport {
    std::vector<Detection> detections;
};

/// Peaks at f and f' with |f + f'| <= pairing_tol_hz merge into one
/// zero-sequence detection at (|f| + |f'|)/2; the rest stay single.
[[nodiscard]] HarmonicReport classify_peaks(std::span<const Peak> peaks, double pairing_tol_hz);

struct TrueHarmonic {
    double frequency_hz{0.0};  // signed; zero-sequence tones compare on |f|
    SequenceClass sequence{SequenceClass::positive_or_negative};
};

/// Expected detections for a configuration: order h at +h·f1, -h·f1 or ±h·f1.
[[nodiscard]] std::vector<TrueHarmonic> true_harmonics(const ThreePhaseConfig& config);

struct HarmonicError {
    double truth_hz{0.0};
    std::optional<double> abs_error_hz;  // empty on a miss
};

/// Nearest detection of the same class within match_window_hz, per truth.
[[nodiscard]] std::vector<HarmonicError> estimate_frequency_error(const HarmonicReport& report,
                                                                  std::span<const TrueHarmonic> truth,
                                                                  double match_window_hz = 10.0);

void write_spectrum_csv(std::ostream& os, const Spectrum& spec);
void write_report_csv(std::ostream& os, const HarmonicReport& report);

}  // namespace qharm
