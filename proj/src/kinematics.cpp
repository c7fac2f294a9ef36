#include "gyrover/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "gyrover/errors.hpp"

namespace gyrover {

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double w = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

std::array<double, 2> rolling_velocity(const GeneralizedState& s, const RobotParams& p) {
  const double sa = std::sin(s.alpha);
  const double ca = std::cos(s.alpha);
  const double sb = std::sin(s.beta);
  const double cb = std::cos(s.beta);
  return {p.radius * (s.gamma_dot * ca + s.alpha_dot * ca * cb - s.beta_dot * sa * sb),
          p.radius * (s.gamma_dot * sa + s.alpha_dot * sa * cb + s.beta_dot * ca * sb)};
}

ContactPoint contact_point(double x_center, double y_center, double alpha, double beta,
                           const RobotParams& p) {
  const double offset = p.radius * std::cos(beta);
  return {x_center - offset * std::sin(alpha), y_center + offset * std::cos(alpha)};
}

Point2 center_from_contact(const ContactPoint& a, double alpha, double beta,
                           const RobotParams& p) {
  const double offset = p.radius * std::cos(beta);
  return {a.x_a + offset * std::sin(alpha), a.y_a - offset * std::cos(alpha)};
}

std::array<double, 2> contact_velocity(double alpha, double gamma_dot,
                                       const RobotParams& p) {
  return {p.radius * gamma_dot * std::cos(alpha), p.radius * gamma_dot * std::sin(alpha)};
}

PolarView polar_view(const ContactPoint& a, double alpha, const Point2& target) {
  const double dx = a.x_a - target.x;
  const double dy = a.y_a - target.y;
  const double e = std::hypot(dx, dy);
  if (e < kPolarEpsilon) return {0.0, 0.0, 0.0};
  const double theta = std::atan2(dy, dx);
  return {e, theta, wrap_angle(theta - alpha)};
}

PolarRates polar_rates(const PolarView& pv, double u_alpha, double u_gamma,
                       const RobotParams& p) {
  if (pv.e < kPolarEpsilon) return {0.0, -u_alpha};
  return {p.radius * u_gamma * std::cos(pv.psi),
          -u_alpha - p.radius * u_gamma * std::sin(pv.psi) / pv.e};
}

LineGeometry line_geometry(const ContactPoint& a, double alpha, const Point2& end,
                           const Point2& start) {
  const double lx = end.x - start.x;
  const double ly = end.y - start.y;
  LineGeometry g;
  g.length = std::hypot(lx, ly);
  if (!(g.length > 0.0)) {
    throw DegenerateLineError("line end point coincides with its start");
  }
  const double ax = a.x_a - start.x;
  const double ay = a.y_a - start.y;
  g.r = std::hypot(ax, ay);
  g.theta = std::atan2(ay, ax);
  g.phi = std::atan2(ly, lx);
  g.e = g.r * std::abs(std::sin(g.phi - g.theta));
  g.d = std::hypot(a.x_a - end.x, a.y_a - end.y);
  g.p = g.r * std::cos(g.theta - alpha) - g.length * std::cos(g.phi - alpha);
  return g;
}

}  // namespace gyrover
