#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "risuav/geometry.hpp"

namespace risuav {

/// Motion limits. v_max and u_max are per second; w_max is per planning step.
/// The *dot_max bounds apply to |input change| / step duration.
struct KinematicLimits {
    double v_max = 12.0;
    double u_max = 8.0;
    double w_max = std::numbers::pi / 6.0;
    double z_min = 35.0;
    double z_max = 130.0;
    double vdot_max = 2.0;
    double udot_max = 2.0;
    double wdot_max = 0.15;

    friend bool operator==(const KinematicLimits&, const KinematicLimits&) = default;
};

/// Average input over one planning step: horizontal velocity, climb rate, heading change.
struct ControlInput {
    double vx = 0.0;
    double vy = 0.0;
    double u = 0.0;
    double omega = 0.0;

    friend bool operator==(const ControlInput&, const ControlInput&) = default;

    [[nodiscard]] double horizontal_speed() const { return std::hypot(vx, vy); }
};

inline void require_positive_dt(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step duration must be positive");
}

inline ControlInput step_input(const Pose& prev, const Pose& next, double dt) {
    require_positive_dt(dt);
    const Vec3 d = next.position - prev.position;
    return {d.x / dt, d.y / dt, d.z / dt, wrap_pi(next.heading - prev.heading)};
}

inline bool check_speed(const ControlInput& in, const KinematicLimits& lim) {
    return in.horizontal_speed() <= lim.v_max && std::abs(in.u) <= lim.u_max && std::abs(in.omega) <= lim.w_max;
}

inline bool check_accel(const ControlInput& prev, const ControlInput& cur, double dt, const KinematicLimits& lim) {
    require_positive_dt(dt);
    return std::abs(cur.horizontal_speed() - prev.horizontal_speed()) / dt <= lim.vdot_max &&
           std::abs(cur.u - prev.u) / dt <= lim.udot_max && std::abs(cur.omega - prev.omega) / dt <= lim.wdot_max;
}

/// One term of the discrete energy sum. Component magnitudes are used so the
/// cost does not depend on flight direction.
inline double step_energy(const ControlInput& prev, const ControlInput& cur, double dt, double alpha1,
                          double alpha2) {
    require_positive_dt(dt);
    const double effort = std::abs(cur.vx) + std::abs(cur.vy) + std::abs(cur.u) + std::abs(cur.omega);
    const double change = std::abs(cur.vx - prev.vx) + std::abs(cur.vy - prev.vy) + std::abs(cur.u - prev.u) +
                          std::abs(cur.omega - prev.omega);
    return alpha1 * effort + alpha2 * change / dt;
}

/// Energy of an input sequence; the first difference is taken against hover (zero input).
inline double trajectory_energy(std::span<const ControlInput> inputs, std::span<const double> dts, double alpha1,
                                double alpha2) {
    if (inputs.size() != dts.size()) throw std::invalid_argument("inputs and step durations differ in length");
    if (inputs.empty()) throw std::invalid_argument("empty input sequence");
    double total = 0.0;
    ControlInput prev{};
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        total += step_energy(prev, inputs[k], dts[k], alpha1, alpha2);
        prev = inputs[k];
    }
    return total;
}

}  // namespace risuav
