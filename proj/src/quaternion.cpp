#include "qharm/quaternion.hpp"

#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qharm {

Quaternion qinv(const Quaternion& a) {
    const double n2 = qnorm2(a);
    if (n2 == 0.0) {
        throw std::domain_error("qinv: zero quaternion has no inverse");
    }
    return qconj(a) / n2;
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

FrequencyAxis::FrequencyAxis() : mu_{three_phase().mu_} {}

FrequencyAxis::FrequencyAxis(const Quaternion& mu) : mu_{mu} {
    if (std::fabs(mu.w) > kAxisTolerance || std::fabs(qnorm(mu) - 1.0) > kAxisTolerance) {
        std::ostringstream msg;
        msg << "FrequencyAxis: axis must be a pure unit quaternion, got " << mu;
        throw std::invalid_argument(msg.str());
    }
}

FrequencyAxis FrequencyAxis::three_phase() {
    constexpr double c = 1.0 / std::numbers::sqrt3;
    return FrequencyAxis{Quaternion{0.0, c, c, c}};
}

FrequencyAxis FrequencyAxis::complex_plane() { return FrequencyAxis{kUnitI}; }

Quaternion qexp_axis(const FrequencyAxis& axis, double theta) {
    const double s = std::sin(theta);
    const Quaternion& mu = axis.mu();
    return {std::cos(theta), mu.x * s, mu.y * s, mu.z * s};
}

Commutation axis_commutator_sign(const Quaternion& a, const FrequencyAxis& axis) {
    if (std::fabs(a.w) > kAxisTolerance) {
        throw std::invalid_argument("axis_commutator_sign: argument must be a pure quaternion");
    }
    const Quaternion am = a * axis.mu();
    const Quaternion ma = axis.mu() * a;
    const double tol = kAxisTolerance * std::fmax(1.0, qnorm(a));
    if (qnorm(am - ma) <= tol) {
        return Commutation::commutes;
    }
    if (qnorm(am + ma) <= tol) {
        return Commutation::anticommutes;
    }
    return Commutation::neither;
}

}  // namespace qharm
