#pragma once

// Feedback laws for balance (torque level), point-to-point and line tracking
// (velocity level).

#include <limits>
#include <optional>

#include "gyrover/dynamics.hpp"
#include "gyrover/kinematics.hpp"
#include "gyrover/switching.hpp"

namespace gyrover {

/// k1 = 1 reproduces the original balance law; larger k1 adds lean damping.
struct BalanceGains {
  double k1 = 1.0;
  double k2 = 1.0;

  void validate() const;
  bool operator==(const BalanceGains&) const = default;
};

/// Actuator rate bounds. Not saturated; they constrain gain choices.
struct ActuatorLimits {
  double alpha_dot_max = std::numeric_limits<double>::infinity();
  double gamma_dot_max = std::numeric_limits<double>::infinity();

  bool operator==(const ActuatorLimits&) const = default;
};

struct PositionGains {
  double k3 = 3.0;  // steering-rate magnitude, rad/s
  double k4 = 1.0;  // distance gain, 1/s
  std::optional<Smoothing> smoothing;

  /// k3 > 2, 0 < k4 < k3 - 1, k3 < alpha_dot_max.
  void validate(const ActuatorLimits& limits = {}) const;
  bool operator==(const PositionGains&) const = default;
};

struct LineGains {
  double k3 = 3.0;  // steering-rate magnitude, rad/s
  double k5 = 1.0;  // drive-rate magnitude, rad/s
  std::optional<Smoothing> smoothing;

  /// k3 > 2, k3 < alpha_dot_max, 0 < k5 < gamma_dot_max.
  void validate(const ActuatorLimits& limits = {}) const;
  bool operator==(const LineGains&) const = default;
};

struct DecoupledCommand {
  double u5;  // alpha'', rad/s^2
  double u6;  // gamma'', rad/s^2

  bool operator==(const DecoupledCommand&) const = default;
};

struct VelocityCommand {
  double u_alpha;  // rad/s
  double u_gamma;  // rad/s

  bool operator==(const VelocityCommand&) const = default;
};

/// |3a + 2b + c|/2 + |a + 2b + c|/2 + |a + b|/sqrt(2). Bounds |beta - pi/2|
/// along the closed balance loop; sigma < pi/2 keeps the lean in (0, pi).
double sigma(double a, double b, double c);

inline constexpr double kDefaultSteeringFloor = 1e-4;

/// Balance law at torque level.
///
///   u5 = -(alpha' - sign0 (k2 V)^{1/4})
///   u6 = -((2+k1) x + (3+2k1) beta' + (2+k1) beta'' + h1 beta' + h2 u5) / h3
///
/// with x = beta - pi/2. Substituted into the jerk equation this leaves
/// beta''' = -((2+k1) x + (3+2k1) beta' + (2+k1) beta''). Reads beta_ddot
/// from the state. Throws SingularSteeringError when |alpha'| < floor and
/// DegenerateLeanError outside (0, pi).
DecoupledCommand balance_control(const GeneralizedState& state, const BalanceGains& gains,
                                 double v, double sign0, const RobotParams& params,
                                 double steering_floor = kDefaultSteeringFloor);

/// Balance law with sign0 latched from alpha'(0) at construction and V taken
/// from the matching Lyapunov candidate (V* for k1 != 1).
class BalanceController {
 public:
  BalanceController(BalanceGains gains, RobotParams params, double initial_alpha_dot,
                    double steering_floor = kDefaultSteeringFloor);

  DecoupledCommand operator()(const GeneralizedState& state) const;

  double sign0() const { return sign0_; }
  const BalanceGains& gains() const { return gains_; }

 private:
  BalanceGains gains_;
  RobotParams params_;
  double sign0_;
  double floor_;
};

/// u_k = (2 |beta - pi/2 + beta'| + f1) / (Jm sin(beta) k3) with
/// f1 = |Gm cos(beta) + Im cos(beta) sin(beta) k3^2|.
double lean_authority(const GeneralizedState& state, double k3, const RobotParams& params);

/// u_alpha = -k3 S(cos psi) S(beta - pi/2 + beta')
/// u_gamma = -(k4 e + u_k) S(cos psi)
/// S is Sgn, or Tanh when smoothing is configured.
VelocityCommand position_control(const GeneralizedState& state, const PolarView& pv,
                                 const PositionGains& gains, const RobotParams& params);

/// With s = S(sin(phi - alpha) sin(phi - theta)):
/// u_alpha = -k3 s S(beta - pi/2 + beta')
/// u_gamma = -(k5 U(p s) + u_k) s
/// U is Theta, or Uanh when smoothing is configured.
VelocityCommand line_control(const GeneralizedState& state, const LineGeometry& lg,
                             const LineGains& gains, const RobotParams& params);

}  // namespace gyrover
