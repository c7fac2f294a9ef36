#include "gyrover/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a finite positive number");
  }
}

double sgn0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void RobotParams::validate() const {
  require_positive(mass, "params.m");
  require_positive(radius, "params.R");
  require_positive(inertia_x, "params.Ix");
  require_positive(gravity, "params.g");
  require_positive(lean_inertia(), "params.M22");
}

ReducedCoefficients reduced_params(const RobotParams& p) {
  const double m22 = p.lean_inertia();
  const double mr2 = p.mass * p.radius * p.radius;
  return {p.mass * p.gravity * p.radius / m22, (p.inertia_x + mr2) / m22,
          (2.0 * p.inertia_x + mr2) / m22};
}

double lean_accel(const GeneralizedState& s, const ReducedCoefficients& c) {
  const double cb = std::cos(s.beta);
  const double sb = std::sin(s.beta);
  return -c.gm * cb - c.im * cb * sb * s.alpha_dot * s.alpha_dot -
         c.jm * sb * s.alpha_dot * s.gamma_dot;
}

GeneralizedState with_lean_accel(GeneralizedState state, const RobotParams& params) {
  state.beta_ddot = lean_accel(state, reduced_params(params));
  return state;
}

InertiaTerms inertia_matrix(const GeneralizedState& s, const RobotParams& p) {
  if (!(s.beta > 0.0 && s.beta < std::numbers::pi)) {
    throw DegenerateLeanError("lean angle " + std::to_string(s.beta) +
                              " outside (0, pi)");
  }
  const double sb = std::sin(s.beta);
  const double cb = std::cos(s.beta);
  const double j = 2.0 * p.inertia_x + p.mass * p.radius * p.radius;
  InertiaTerms m{};
  m.m11 = p.inertia_x * sb * sb + j * cb * cb;
  m.m13 = j * cb;
  m.m22 = p.lean_inertia();
  m.m33 = j;
  m.m_rho = m.m11 * m.m33 - m.m13 * m.m13;
  if (!(m.m_rho > 0.0)) {
    throw DegenerateLeanError("M_rho = " + std::to_string(m.m_rho) +
                              " at lean angle " + std::to_string(s.beta));
  }
  return m;
}

NonlinearTerms nonlinear_terms(const GeneralizedState& s, const RobotParams& p) {
  const double sb = std::sin(s.beta);
  const double cb = std::cos(s.beta);
  const double mr2 = p.mass * p.radius * p.radius;
  const double ixm = p.inertia_x + mr2;
  const double j = 2.0 * p.inertia_x + mr2;
  NonlinearTerms n{};
  n.n1 = ixm * std::sin(2.0 * s.beta) * s.alpha_dot * s.beta_dot +
         2.0 * p.inertia_x * sb * s.beta_dot * s.gamma_dot;
  n.n2 = -p.mass * p.gravity * p.radius * cb - j * sb * s.alpha_dot * s.gamma_dot -
         ixm * cb * sb * s.alpha_dot * s.alpha_dot;
  n.n3 = 2.0 * ixm * sb * s.alpha_dot * s.beta_dot;
  return n;
}

std::array<double, 2> decouple(double u3, double u4, const InertiaTerms& m) {
  return {(m.m33 * u3 - m.m13 * u4) / m.m_rho, (-m.m13 * u3 + m.m11 * u4) / m.m_rho};
}

std::array<double, 2> couple(double u5, double u6, const InertiaTerms& m) {
  return {m.m11 * u5 + m.m13 * u6, m.m13 * u5 + m.m33 * u6};
}

TorqueInput cancel_and_decouple(double u5, double u6, const GeneralizedState& state,
                                const RobotParams& params) {
  const InertiaTerms m = inertia_matrix(state, params);
  const NonlinearTerms n = nonlinear_terms(state, params);
  const auto [u3, u4] = couple(u5, u6, m);
  return {-n.n1 + u3, -n.n3 + u4, u3, u4, u5, u6};
}

TorqueInput from_joint_torques(double u1, double u2, const GeneralizedState& state,
                               const RobotParams& params) {
  const InertiaTerms m = inertia_matrix(state, params);
  const NonlinearTerms n = nonlinear_terms(state, params);
  const double u3 = u1 + n.n1;
  const double u4 = u2 + n.n3;
  const auto [u5, u6] = decouple(u3, u4, m);
  return {u1, u2, u3, u4, u5, u6};
}

JointAccel full_accel(const GeneralizedState& state, double u1, double u2,
                      const RobotParams& params) {
  const InertiaTerms m = inertia_matrix(state, params);
  const NonlinearTerms n = nonlinear_terms(state, params);
  // Steering/rolling block by Cramer's rule; the lean row is decoupled.
  const double r1 = n.n1 + u1;
  const double r3 = n.n3 + u2;
  return {(m.m33 * r1 - m.m13 * r3) / m.m_rho, n.n2 / m.m22,
          (m.m11 * r3 - m.m13 * r1) / m.m_rho};
}

JointAccel reduced_accel(const GeneralizedState& state, double u5, double u6,
                         const RobotParams& params) {
  return {u5, lean_accel(state, reduced_params(params)), u6};
}

JerkCoefficients beta_jerk_coeffs(const GeneralizedState& s, const RobotParams& params) {
  const ReducedCoefficients c = reduced_params(params);
  const double sb = std::sin(s.beta);
  const double cb = std::cos(s.beta);
  const double ad = s.alpha_dot;
  const double gd = s.gamma_dot;
  return {c.gm * sb - c.im * std::cos(2.0 * s.beta) * ad * ad - c.jm * cb * ad * gd,
          -c.im * std::sin(2.0 * s.beta) * ad - c.jm * sb * gd, -c.jm * sb * ad};
}

void FrictionParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    const std::string idx = "[" + std::to_string(i) + "]";
    if (!(mu_v[i] >= 0.0)) throw ValidationError("friction.mu_v" + idx, "must be >= 0");
    if (!(mu_d[i] >= 0.0)) throw ValidationError("friction.mu_d" + idx, "must be >= 0");
    if (!(mu_s[i] >= mu_d[i])) {
      throw ValidationError("friction.mu_s" + idx, "must be >= mu_d");
    }
  }
  if (!(stribeck_scale > 0.0)) throw ValidationError("friction.D", "must be > 0");
}

Vec3 friction_torque(const Vec3& q_dot, const FrictionParams& fp) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) {
    const double stribeck = std::exp(-std::abs(q_dot[i]) / fp.stribeck_scale);
    out[i] = fp.mu_v[i] * q_dot[i] +
             (fp.mu_d[i] + (fp.mu_s[i] - fp.mu_d[i]) * stribeck) * sgn0(q_dot[i]);
  }
  return out;
}

}  // namespace gyrover
