#pragma once

// Ground-plane kinematics: rolling constraints of the center of mass, the
// contact point, the error-polar chart around a target point, and the
// geometry of a straight line segment to be tracked.

#include <array>

#include "gyrover/dynamics.hpp"

namespace gyrover {

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

/// Rolling constraint: velocity (X', Y') of the center of mass.
std::array<double, 2> rolling_velocity(const GeneralizedState& state,
                                       const RobotParams& params);

struct ContactPoint {
  double x_a = 0.0;
  double y_a = 0.0;

  bool operator==(const ContactPoint&) const = default;
};

/// Contact point under the wheel rim for a center of mass at (X, Y):
///   x_a = X - R sin(alpha) cos(beta),  y_a = Y + R cos(alpha) cos(beta).
ContactPoint contact_point(double x_center, double y_center, double alpha, double beta,
                           const RobotParams& params);

/// Inverse of contact_point: center of mass over a contact point.
Point2 center_from_contact(const ContactPoint& a, double alpha, double beta,
                           const RobotParams& params);

/// (R gamma' cos(alpha), R gamma' sin(alpha)).
std::array<double, 2> contact_velocity(double alpha, double gamma_dot,
                                       const RobotParams& params);

/// Below this distance the polar chart is singular and the e = 0 convention
/// (psi = 0, psi' = -u_alpha) applies.
inline constexpr double kPolarEpsilon = 1e-6;

/// Contact point relative to a target, in polar form.
///
/// theta is the bearing of the contact point as seen from the target,
/// atan2(y_a - y_t, x_a - x_t). With this choice, moving at R u_gamma along
/// heading alpha gives e' = R u_gamma cos(psi) and
/// theta' = -R u_gamma sin(psi) / e exactly, where psi = theta - alpha.
struct PolarView {
  double e = 0.0;
  double theta = 0.0;
  double psi = 0.0;
};

PolarView polar_view(const ContactPoint& a, double alpha, const Point2& target);

struct PolarRates {
  double e_dot;
  double psi_dot;
};

/// e' = R u_gamma cos(psi), psi' = -u_alpha - R u_gamma sin(psi) / e.
PolarRates polar_rates(const PolarView& pv, double u_alpha, double u_gamma,
                       const RobotParams& params);

/// Geometry of the contact point against the segment start -> end.
///
/// All bearings are measured from `start`. e is the unsigned distance to the
/// infinite line through both points, so e = r |sin(phi - theta)|.
struct LineGeometry {
  double r = 0.0;      // |A - start|
  double e = 0.0;      // distance to the line
  double d = 0.0;      // |A - end|
  double theta = 0.0;  // bearing of A
  double phi = 0.0;    // bearing of end
  double length = 0.0; // |end - start|
  double p = 0.0;      // r cos(theta - alpha) - length cos(phi - alpha)
};

/// Throws DegenerateLineError when end == start.
LineGeometry line_geometry(const ContactPoint& a, double alpha, const Point2& end,
                           const Point2& start = {});

}  // namespace gyrover
