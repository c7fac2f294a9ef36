#pragma once

// Lyapunov candidates for the balance, point-to-point and line-tracking
// loops, closed-form solutions of the balance loop, and a monitor that
// checks decay along sampled trajectories.

#include <optional>
#include <span>
#include <vector>

#include "gyrover/dynamics.hpp"
#include "gyrover/kinematics.hpp"

namespace gyrover {

enum class LyapunovKind {
  BalanceV,       // lean subsystem, exact decay V' = -2V under the balance law
  BalanceVAlpha,  // sqrt(k2 V)/4 + alpha'^2/2, certifies alpha' -> 0
  BalanceVStar,   // widened balance law with damping gain k1
  PositionV,      // V1 + e^2/2
  LineV,          // V1 + e^2/2 + d^2/2
};

struct LyapunovSpec {
  LyapunovKind kind = LyapunovKind::BalanceV;
  double k1 = 1.0;
  double k2 = 1.0;
};

/// Whatever geometry the kind needs besides the state.
struct LyapunovContext {
  std::optional<PolarView> polar;
  std::optional<LineGeometry> line;
};

/// x^2/2 + y^2/2 + (beta'' + 2y)^2/2 with x = beta - pi/2, y = beta' + x.
/// Reads beta_ddot from the state.
double balance_v(const GeneralizedState& s);

/// x^2/2 + y^2/2 + (beta'' + (1 + k1) y)^2/2; equals balance_v at k1 = 1.
double balance_v_star(const GeneralizedState& s, double k1);

double balance_v_alpha(const GeneralizedState& s, double k2);

/// Lean part shared by the tracking candidates: (x^2 + y^2) / 2.
double lean_v1(const GeneralizedState& s);

double position_v(const GeneralizedState& s, const PolarView& pv);

double line_v(const GeneralizedState& s, const LineGeometry& lg);

/// Throws Error when the context lacks the geometry the kind needs.
double lyapunov_value(const LyapunovSpec& spec, const GeneralizedState& s,
                      const LyapunovContext& ctx = {});

/// beta(t) - pi/2 for the closed-loop lean jerk equation
///   beta''' = -(3(beta - pi/2) + 5 beta' + 3 beta'')
/// with initial data (a, b, c) = (beta(0) - pi/2, beta'(0), beta''(0)).
double closed_form_beta(double a, double b, double c, double t);

/// alpha'(t) under the steering law when V(t) = exp(-2t) V0:
///   alpha'(t) = e^{-t} alpha'(0) +/- 2 (e^{-t/2} - e^{-t}) (k2 V0)^{1/4},
/// taking the sign of alpha'(0).
double closed_form_alpha_dot(double alpha_dot0, double v0, double k2, double t);

/// Decay of a sampled Lyapunov series.
struct DecayReport {
  std::vector<double> values;
  double max_increase = 0.0;
  /// Least-squares slope of log V over samples with V > 1e-12. Filled for
  /// the exponentially decaying balance kinds only.
  std::optional<double> fitted_rate;
  std::vector<double> violation_times;

  bool ok() const { return violation_times.empty(); }
};

inline constexpr double kDefaultMonotonicityTolerance = 1e-6;

/// Samples whose single-step increase exceeds `tolerance` are violations.
/// Throws EmptyTrajectoryError on empty input and Error on a size mismatch.
DecayReport decay_monitor(std::span<const double> times, std::span<const double> values,
                          LyapunovKind kind,
                          double tolerance = kDefaultMonotonicityTolerance);

}  // namespace gyrover
