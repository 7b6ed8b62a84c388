#pragma once

/**
 * @file quaternion.hpp
 * @brief Quaternion scalars q = w + xi + yj + zk and exponentials along a fixed pure axis.
 *
 * Multiplication follows the Hamilton table
 *   i² = j² = k² = ijk = -1,  ij = -ji = k,  jk = -kj = i,  ki = -ik = j
 * and is NOT commutative. Components are always stored and serialized in
 * (w, x, y, z) order.
 */

#include <cmath>
#include <iosfwd>

namespace qharm {

struct Quaternion {
    double w{0.0};
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Quaternion() = default;
    // Reals embed with zero vector part.
    constexpr Quaternion(double w_) : w{w_} {}  // NOLINT(google-explicit-constructor)
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w{w_}, x{x_}, y{y_}, z{z_} {}

    constexpr bool operator==(const Quaternion&) const = default;

    [[nodiscard]] constexpr double scalar() const { return w; }
    [[nodiscard]] constexpr Quaternion vector() const { return {0.0, x, y, z}; }
    [[nodiscard]] double vector_norm() const { return std::sqrt(x * x + y * y + z * z); }

    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w;
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w;
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Quaternion& operator*=(double s) {
        w *= s;
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
    constexpr Quaternion& operator/=(double s) {
        w /= s;
        x /= s;
        y /= s;
        z /= s;
        return *this;
    }
};

inline constexpr Quaternion kUnitI{0.0, 1.0, 0.0, 0.0};
inline constexpr Quaternion kUnitJ{0.0, 0.0, 1.0, 0.0};
inline constexpr Quaternion kUnitK{0.0, 0.0, 0.0, 1.0};

// Hamilton product; factor order matters.
[[nodiscard]] constexpr Quaternion qmul(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

[[nodiscard]] constexpr Quaternion qconj(const Quaternion& a) { return {a.w, -a.x, -a.y, -a.z}; }

[[nodiscard]] constexpr double qnorm2(const Quaternion& a) {
    return a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z;
}

[[nodiscard]] inline double qnorm(const Quaternion& a) { return std::sqrt(qnorm2(a)); }

/// Multiplicative inverse conj(a)/|a|². Throws std::domain_error for a == 0.
[[nodiscard]] Quaternion qinv(const Quaternion& a);

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) { return qmul(a, b); }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
constexpr Quaternion operator/(Quaternion a, double s) { return a /= s; }

/// Largest absolute componentwise difference; the tests' workhorse distance.
[[nodiscard]] inline double max_abs_diff(const Quaternion& a, const Quaternion& b) {
    return std::fmax(std::fmax(std::fabs(a.w - b.w), std::fabs(a.x - b.x)),
                     std::fmax(std::fabs(a.y - b.y), std::fabs(a.z - b.z)));
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

/// Tolerance for "pure" and "unit" validation.
inline constexpr double kAxisTolerance = 1e-12;

/**
 * A pure unit quaternion mu (mu² = -1) that plays the role of the imaginary
 * unit for frequency-domain exponentials. The default is (i+j+k)/√3, the
 * axis on which balanced three-phase harmonics live; the complex model uses
 * the axis i.
 */
class FrequencyAxis {
public:
    FrequencyAxis();
    /// Throws std::invalid_argument unless mu is pure and unit within kAxisTolerance.
    explicit FrequencyAxis(const Quaternion& mu);

    static FrequencyAxis three_phase();
    static FrequencyAxis complex_plane();

    [[nodiscard]] const Quaternion& mu() const { return mu_; }

private:
    Quaternion mu_;
};

/// cos(theta) + mu sin(theta)
[[nodiscard]] Quaternion qexp_axis(const FrequencyAxis& axis, double theta);

enum class Commutation { commutes, anticommutes, neither };

/// Classifies pure `a` by whether a·mu - mu·a or a·mu + mu·a vanishes.
/// Throws std::invalid_argument if `a` has a nonzero scalar part.
[[nodiscard]] Commutation axis_commutator_sign(const Quaternion& a, const FrequencyAxis& axis);

}  // namespace qharm
