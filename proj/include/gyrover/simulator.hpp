#pragma once

// Fixed-step RK4 simulation of the robot in torque mode (reduced model with
// decoupled accelerations u5, u6) or velocity mode (alpha' = u_alpha,
// gamma' = u_gamma commanded directly), with closed-loop controller
// bindings, event detection and trajectory recording.
//
// Everything here is deterministic: identical configurations give bitwise
// identical trajectories.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gyrover/controllers.hpp"
#include "gyrover/dynamics.hpp"
#include "gyrover/kinematics.hpp"
#include "gyrover/lyapunov.hpp"

namespace gyrover {

enum class Mode { Torque, Velocity };

enum class CommandHold {
  ZeroOrderHold,  // command evaluated once per step and held
  Continuous,     // controller evaluated at every RK stage
};

struct WheelState {
  GeneralizedState q;  // beta_ddot kept current by the simulator
  Point2 center;       // center of mass (X, Y)
  ContactPoint contact;

  bool operator==(const WheelState&) const = default;
};

using ControlCommand = std::variant<DecoupledCommand, VelocityCommand>;

struct OpenLoop {
  ControlCommand command;

  bool operator==(const OpenLoop&) const = default;
};

struct BalanceTask {
  BalanceGains gains;

  bool operator==(const BalanceTask&) const = default;
};

struct PositionTask {
  PositionGains gains;
  Point2 target;

  bool operator==(const PositionTask&) const = default;
};

/// Line tracking along waypoints[0] -> waypoints[1] -> ...; more than two
/// waypoints chain segments into a corridor.
struct LineTask {
  LineGains gains;
  std::vector<Point2> waypoints;

  bool operator==(const LineTask&) const = default;
};

using ControllerBinding = std::variant<OpenLoop, BalanceTask, PositionTask, LineTask>;

struct EventThresholds {
  double topple_margin = 0.01;  // rad
  double alpha_dot_floor = kDefaultSteeringFloor;
  double converge_lean = 1e-3;          // |beta - pi/2| and |beta'|, balance
  double converge_rate = 1e-3;          // |alpha'| and |gamma'|, balance
  double converge_distance = 0.05;      // e for position, d for line, m
  double converge_line_distance = 0.02; // e for line, m
  double segment_switch_distance = 0.05;
  bool stop_on_converge = true;

  bool operator==(const EventThresholds&) const = default;
};

struct SimConfig {
  Mode mode = Mode::Torque;
  double dt = 1e-3;
  double t_end = 10.0;
  CommandHold hold = CommandHold::ZeroOrderHold;
  RobotParams params;
  std::optional<FrictionParams> friction;  // torque mode only
  /// Initial state. The center of mass and beta'' are derived from the
  /// contact point and the rates.
  WheelState initial;
  ControllerBinding controller = OpenLoop{DecoupledCommand{0.0, 0.0}};
  ActuatorLimits limits;
  EventThresholds events;
  double actuator_lag = 0.0;  // velocity-mode first-order lag, s; 0 = off

  /// Throws ValidationError naming the first bad field.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

enum class EventKind { Toppled, Converged, SingularSteering, DomainExit };

const char* to_string(EventKind kind);

struct Event {
  EventKind kind;
  double time;
  std::string detail;
};

struct Sample {
  double t = 0.0;
  WheelState state;
  double cmd_steer = 0.0;  // u5 or u_alpha
  double cmd_drive = 0.0;  // u6 or u_gamma
  std::optional<PolarView> polar;
  std::optional<LineGeometry> line;
  std::size_t segment = 0;
  double v = 0.0;        // primary Lyapunov value of the task
  double v1 = 0.0;       // lean part (beta - pi/2)^2/2 + (beta' + beta - pi/2)^2/2
  double v_alpha = 0.0;  // balance only; NaN otherwise
};

struct Trajectory {
  Mode mode = Mode::Torque;
  LyapunovKind kind = LyapunovKind::BalanceV;
  std::vector<Sample> samples;
  std::vector<Event> events;

  /// Last event if it ended the run.
  std::optional<Event> terminal() const;
};

/// The Lyapunov function a task is monitored with.
LyapunovSpec primary_lyapunov(const SimConfig& cfg);

/// Initial state with the derived center of mass and beta'' filled in.
WheelState prepare_initial(const SimConfig& cfg);

/// One RK4 step with `command` held across the step. Throws
/// NonFiniteStateError if the result is not finite.
WheelState step(const WheelState& state, const ControlCommand& command,
                const SimConfig& cfg);

/// Controller output at a state; `segment` selects the corridor segment.
ControlCommand evaluate_controller(const WheelState& state, const SimConfig& cfg,
                                   std::size_t segment = 0);

/// Throws InadmissibleStateError naming the violated predicate.
void check_admissible(const SimConfig& cfg);

/// Topple, convergence, singular-steering and domain-exit predicates at one
/// state. Toppled and Converged never fire together.
std::vector<Event> detect_events(const WheelState& state, const SimConfig& cfg, double t,
                                 std::size_t segment = 0);

/// Validates, gates on admissibility, then integrates to t_end or the first
/// terminal event. Sample k is at t = k dt.
Trajectory run_closed_loop(const SimConfig& cfg);

/// Decay report of `kind` recomputed along a trajectory.
DecayReport decay_monitor(const Trajectory& trajectory, const LyapunovSpec& spec,
                          double tolerance = kDefaultMonotonicityTolerance);

/// Number of steps for a horizon: floor(t_end / dt) guarded against
/// representation error.
std::size_t step_count(double t_end, double dt);

}  // namespace gyrover
