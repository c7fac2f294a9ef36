#pragma once

// Equations of motion of a single-wheel gyroscopically stabilized robot
// modeled as a rolling disk: generalized coordinates q = (alpha, beta, gamma)
// for steering, lean and rolling.
//
//   full form      M(q) q'' = N(q, q') + B u,        u = (u1, u2)
//   cancelled form u1 = -N1 + u3, u2 = -N3 + u4
//   decoupled form [u5; u6] = inverse([M11 M13; M13 M33]) [u3; u4]
//   reduced form   alpha'' = u5, gamma'' = u6,
//                  beta''  = -Gm cos(b) - Im cos(b) sin(b) alpha'^2
//                            - Jm sin(b) alpha' gamma'

#include <array>
#include <optional>

namespace gyrover {

using Vec3 = std::array<double, 3>;

/// Physical constants. Defaults are reference values for tests and
/// scenarios, not measured hardware values.
struct RobotParams {
  double mass = 1.0;        // kg
  double radius = 1.0;      // m
  double inertia_x = 0.5;   // transverse moment of inertia, kg m^2
  double gravity = 9.8;     // m/s^2
  /// Lean-axis inertia. Defaults to Ix + m R^2 when unset.
  std::optional<double> lean_inertia_override;

  double lean_inertia() const {
    return lean_inertia_override.value_or(inertia_x + mass * radius * radius);
  }

  /// Throws ValidationError naming the first non-positive field.
  void validate() const;

  bool operator==(const RobotParams&) const = default;
};

/// Gm = m g R / M22, Im = (Ix + m R^2) / M22, Jm = (2 Ix + m R^2) / M22.
struct ReducedCoefficients {
  double gm;
  double im;
  double jm;
};

ReducedCoefficients reduced_params(const RobotParams& params);

struct GeneralizedState {
  double alpha = 0.0;
  double beta = 1.5707963267948966;
  double gamma = 0.0;
  double alpha_dot = 0.0;
  double beta_dot = 0.0;
  double gamma_dot = 0.0;
  /// Cached lean acceleration. Only meaningful after with_lean_accel().
  double beta_ddot = 0.0;

  bool operator==(const GeneralizedState&) const = default;
};

/// beta'' from the reduced lean equation at (beta, alpha_dot, gamma_dot).
double lean_accel(const GeneralizedState& state, const ReducedCoefficients& c);

/// Copy of `state` with beta_ddot recomputed from the reduced lean equation.
GeneralizedState with_lean_accel(GeneralizedState state, const RobotParams& params);

struct InertiaTerms {
  double m11;
  double m13;  // == M31
  double m22;
  double m33;
  double m_rho;  // M11 M33 - M13^2
};

/// Throws DegenerateLeanError unless beta lies strictly inside (0, pi) with
/// M_rho > 0.
InertiaTerms inertia_matrix(const GeneralizedState& state, const RobotParams& params);

struct NonlinearTerms {
  double n1;
  double n2;
  double n3;
};

NonlinearTerms nonlinear_terms(const GeneralizedState& state, const RobotParams& params);

/// All torque layers for one actuation. Stored explicitly so the cancellation
/// and decoupling maps can be checked against each other.
struct TorqueInput {
  double u1, u2;  // joint torques, N m
  double u3, u4;  // after nonlinear cancellation, N m
  double u5, u6;  // decoupled accelerations, rad/s^2
};

/// (u3, u4) -> (u5, u6).
std::array<double, 2> decouple(double u3, double u4, const InertiaTerms& inertia);

/// (u5, u6) -> (u3, u4); inverse of decouple.
std::array<double, 2> couple(double u5, double u6, const InertiaTerms& inertia);

/// Joint torques producing alpha'' = u5, gamma'' = u6 at `state`.
TorqueInput cancel_and_decouple(double u5, double u6, const GeneralizedState& state,
                                const RobotParams& params);

/// Fills every layer starting from raw joint torques.
TorqueInput from_joint_torques(double u1, double u2, const GeneralizedState& state,
                               const RobotParams& params);

struct JointAccel {
  double alpha;
  double beta;
  double gamma;
};

/// Solves the full model M q'' = N + B u for q''.
JointAccel full_accel(const GeneralizedState& state, double u1, double u2,
                      const RobotParams& params);

/// Reduced model: (u5, beta'' from the lean equation, u6).
JointAccel reduced_accel(const GeneralizedState& state, double u5, double u6,
                         const RobotParams& params);

/// beta''' = h1 beta' + h2 u5 + h3 u6, the exact time derivative of the
/// reduced lean equation:
///   h1 = Gm sin(b) - Im cos(2b) alpha'^2 - Jm cos(b) alpha' gamma'
///   h2 = -Im sin(2b) alpha' - Jm sin(b) gamma'
///   h3 = -Jm sin(b) alpha'
struct JerkCoefficients {
  double h1;
  double h2;
  double h3;
};

JerkCoefficients beta_jerk_coeffs(const GeneralizedState& state, const RobotParams& params);

/// Joint friction F = mu_v q' + [mu_d + (mu_s - mu_d) exp(-|q'|/D)] sgn(q'),
/// componentwise over (alpha, beta, gamma).
struct FrictionParams {
  Vec3 mu_v{0.17, 0.15, 0.09};  // N m s/rad
  Vec3 mu_d{0.1, 0.1, 0.07};    // N m
  Vec3 mu_s{0.3, 0.25, 0.1};    // N m
  double stribeck_scale = 0.05;  // D, rad/s (not a measured value)
  /// When set, the controller feeds the modeled friction forward so the plant
  /// sees the commanded joint torque.
  bool compensate = false;

  void validate() const;

  bool operator==(const FrictionParams&) const = default;
};

/// sgn(0) is taken as 0, so the model is quiescent at rest.
Vec3 friction_torque(const Vec3& q_dot, const FrictionParams& fp);

}  // namespace gyrover
