#include "gyrover/controllers.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gyrover/errors.hpp"
#include "gyrover/lyapunov.hpp"

namespace gyrover {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_lean_interior(double beta) {
  if (!(beta > 0.0 && beta < std::numbers::pi)) {
    throw DegenerateLeanError("lean angle " + std::to_string(beta) + " outside (0, pi)");
  }
}

void validate_k3(double k3, const ActuatorLimits& limits, const char* field) {
  if (!(k3 > 2.0)) throw ValidationError(field, "requires k3 > 2");
  if (!(k3 < limits.alpha_dot_max)) {
    throw ValidationError(field, "requires k3 < alpha_dot_max");
  }
}

void validate_smoothing(const std::optional<Smoothing>& s) {
  if (!s) return;
  if (!(s->k6 > 0.0)) throw ValidationError("smoothing.k6", "requires k6 > 0");
  if (!(s->k7 > 0.0)) throw ValidationError("smoothing.k7", "requires k7 > 0");
}

}  // namespace

void BalanceGains::validate() const {
  if (!(k2 > 0.0)) throw ValidationError("gains.k2", "requires k2 > 0");
  if (!(k1 >= 0.0)) throw ValidationError("gains.k1", "requires k1 >= 0");
}

void PositionGains::validate(const ActuatorLimits& limits) const {
  validate_k3(k3, limits, "gains.k3");
  if (!(k4 > 0.0)) throw ValidationError("gains.k4", "requires k4 > 0");
  if (!(k4 < k3 - 1.0)) throw ValidationError("gains.k4", "requires k4 < k3 - 1");
  validate_smoothing(smoothing);
}

void LineGains::validate(const ActuatorLimits& limits) const {
  validate_k3(k3, limits, "gains.k3");
  if (!(k5 > 0.0)) throw ValidationError("gains.k5", "requires k5 > 0");
  if (!(k5 < limits.gamma_dot_max)) {
    throw ValidationError("gains.k5", "requires k5 < gamma_dot_max");
  }
  validate_smoothing(smoothing);
}

double sigma(double a, double b, double c) {
  return std::abs(3.0 * a + 2.0 * b + c) / 2.0 + std::abs(a + 2.0 * b + c) / 2.0 +
         std::abs(a + b) / std::numbers::sqrt2;
}

DecoupledCommand balance_control(const GeneralizedState& s, const BalanceGains& gains,
                                 double v, double sign0, const RobotParams& params,
                                 double steering_floor) {
  require_lean_interior(s.beta);
  if (!(std::abs(s.alpha_dot) >= steering_floor)) {
    throw SingularSteeringError("|alpha_dot| = " + std::to_string(std::abs(s.alpha_dot)) +
                                " below steering floor");
  }
  const double u5 = -(s.alpha_dot - sign0 * std::pow(gains.k2 * v, 0.25));
  const JerkCoefficients h = beta_jerk_coeffs(s, params);
  const double k1 = gains.k1;
  const double x = s.beta - kHalfPi;
  const double lin = (2.0 + k1) * x + (3.0 + 2.0 * k1) * s.beta_dot + (2.0 + k1) * s.beta_ddot;
  const double u6 = -(lin + h.h1 * s.beta_dot + h.h2 * u5) / h.h3;
  return {u5, u6};
}

BalanceController::BalanceController(BalanceGains gains, RobotParams params,
                                     double initial_alpha_dot, double steering_floor)
    : gains_(gains),
      params_(std::move(params)),
      sign0_(initial_alpha_dot > 0.0 ? 1.0 : -1.0),
      floor_(steering_floor) {
  gains_.validate();
}

DecoupledCommand BalanceController::operator()(const GeneralizedState& s) const {
  return balance_control(s, gains_, balance_v_star(s, gains_.k1), sign0_, params_, floor_);
}

double lean_authority(const GeneralizedState& s, double k3, const RobotParams& params) {
  const ReducedCoefficients c = reduced_params(params);
  const double sb = std::sin(s.beta);
  const double cb = std::cos(s.beta);
  const double f1 = std::abs(c.gm * cb + c.im * cb * sb * k3 * k3);
  const double lean = s.beta - kHalfPi + s.beta_dot;
  return (2.0 * std::abs(lean) + f1) / (c.jm * sb * k3);
}

VelocityCommand position_control(const GeneralizedState& s, const PolarView& pv,
                                 const PositionGains& gains, const RobotParams& params) {
  require_lean_interior(s.beta);
  const SwitchSet sw(gains.smoothing);
  const double heading = sw.bipolar(std::cos(pv.psi));
  const double lean = sw.bipolar(s.beta - kHalfPi + s.beta_dot);
  const double uk = lean_authority(s, gains.k3, params);
  return {-gains.k3 * heading * lean, -(gains.k4 * pv.e + uk) * heading};
}

VelocityCommand line_control(const GeneralizedState& s, const LineGeometry& lg,
                             const LineGains& gains, const RobotParams& params) {
  require_lean_interior(s.beta);
  const SwitchSet sw(gains.smoothing);
  const double side = sw.bipolar(std::sin(lg.phi - s.alpha) * std::sin(lg.phi - lg.theta));
  const double lean = sw.bipolar(s.beta - kHalfPi + s.beta_dot);
  const double f2 = gains.k5 * sw.unipolar(lg.p * side);
  const double uk = lean_authority(s, gains.k3, params);
  return {-gains.k3 * side * lean, -(f2 + uk) * side};
}

}  // namespace gyrover
