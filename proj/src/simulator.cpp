#include "gyrover/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// alpha, beta, gamma, alpha', beta', gamma', X, Y, x_a, y_a
using StateVec = std::array<double, 10>;

StateVec pack(const WheelState& w) {
  return {w.q.alpha,     w.q.beta,     w.q.gamma,   w.q.alpha_dot,
          w.q.beta_dot,  w.q.gamma_dot, w.center.x, w.center.y,
          w.contact.x_a, w.contact.y_a};
}

WheelState unpack(const StateVec& y) {
  WheelState w;
  w.q.alpha = y[0];
  w.q.beta = y[1];
  w.q.gamma = y[2];
  w.q.alpha_dot = y[3];
  w.q.beta_dot = y[4];
  w.q.gamma_dot = y[5];
  w.center = {y[6], y[7]};
  w.contact = {y[8], y[9]};
  return w;
}

StateVec axpy(const StateVec& y, double h, const StateVec& k) {
  StateVec out;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
  return out;
}

template <class Deriv>
StateVec rk4(const StateVec& y, double dt, Deriv&& f) {
  const StateVec k1 = f(y);
  const StateVec k2 = f(axpy(y, 0.5 * dt, k1));
  const StateVec k3 = f(axpy(y, 0.5 * dt, k2));
  const StateVec k4 = f(axpy(y, dt, k3));
  StateVec out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

// Time derivative of the packed state under a command.
StateVec derivative(const StateVec& y, const ControlCommand& command, const SimConfig& cfg) {
  WheelState w = unpack(y);
  GeneralizedState& q = w.q;
  double alpha_acc = 0.0;
  double beta_acc = 0.0;
  double gamma_acc = 0.0;

  if (cfg.mode == Mode::Torque) {
    const auto& u = std::get<DecoupledCommand>(command);
    if (cfg.friction) {
      TorqueInput tq = cancel_and_decouple(u.u5, u.u6, q, cfg.params);
      const Vec3 f = friction_torque({q.alpha_dot, q.beta_dot, q.gamma_dot}, *cfg.friction);
      // The lean axis is unactuated; joint friction acts on steering and drive.
      if (cfg.friction->compensate) {
        tq.u1 += f[0];
        tq.u2 += f[2];
      }
      const JointAccel acc = full_accel(q, tq.u1 - f[0], tq.u2 - f[2], cfg.params);
      alpha_acc = acc.alpha;
      beta_acc = acc.beta;
      gamma_acc = acc.gamma;
    } else {
      const JointAccel acc = reduced_accel(q, u.u5, u.u6, cfg.params);
      alpha_acc = acc.alpha;
      beta_acc = acc.beta;
      gamma_acc = acc.gamma;
    }
  } else {
    const auto& u = std::get<VelocityCommand>(command);
    if (cfg.actuator_lag > 0.0) {
      alpha_acc = (u.u_alpha - q.alpha_dot) / cfg.actuator_lag;
      gamma_acc = (u.u_gamma - q.gamma_dot) / cfg.actuator_lag;
    } else {
      q.alpha_dot = u.u_alpha;
      q.gamma_dot = u.u_gamma;
    }
    beta_acc = lean_accel(q, reduced_params(cfg.params));
  }

  const auto center_vel = rolling_velocity(q, cfg.params);
  const auto contact_vel = contact_velocity(q.alpha, q.gamma_dot, cfg.params);
  return {q.alpha_dot, q.beta_dot,    q.gamma_dot,    alpha_acc,      beta_acc,
          gamma_acc,   center_vel[0], center_vel[1], contact_vel[0], contact_vel[1]};
}

WheelState finish(const StateVec& y, const SimConfig& cfg) {
  for (double v : y) {
    if (!std::isfinite(v)) throw NonFiniteStateError("state became non-finite");
  }
  WheelState w = unpack(y);
  w.q = with_lean_accel(w.q, cfg.params);
  return w;
}

// Velocity mode without lag: rates are the command itself.
void apply_velocity_command(WheelState& w, const ControlCommand& command,
                            const SimConfig& cfg) {
  if (cfg.mode != Mode::Velocity || cfg.actuator_lag > 0.0) return;
  const auto& u = std::get<VelocityCommand>(command);
  w.q.alpha_dot = u.u_alpha;
  w.q.gamma_dot = u.u_gamma;
  w.q = with_lean_accel(w.q, cfg.params);
}

std::size_t segment_count(const SimConfig& cfg) {
  if (const auto* line = std::get_if<LineTask>(&cfg.controller)) {
    return line->waypoints.size() - 1;
  }
  return 1;
}

LineGeometry segment_geometry(const WheelState& w, const LineTask& task, std::size_t seg) {
  return line_geometry(w.contact, w.q.alpha, task.waypoints[seg + 1], task.waypoints[seg]);
}

bool is_balance(const SimConfig& cfg) {
  return std::holds_alternative<BalanceTask>(cfg.controller);
}

Sample make_sample(double t, const WheelState& w, const ControlCommand& command,
                   const SimConfig& cfg, std::size_t segment) {
  Sample s;
  s.t = t;
  s.state = w;
  s.segment = segment;
  if (const auto* u = std::get_if<DecoupledCommand>(&command)) {
    s.cmd_steer = u->u5;
    s.cmd_drive = u->u6;
  } else {
    const auto& v = std::get<VelocityCommand>(command);
    s.cmd_steer = v.u_alpha;
    s.cmd_drive = v.u_gamma;
  }
  LyapunovContext ctx;
  if (const auto* p = std::get_if<PositionTask>(&cfg.controller)) {
    s.polar = polar_view(w.contact, w.q.alpha, p->target);
    ctx.polar = s.polar;
  } else if (const auto* l = std::get_if<LineTask>(&cfg.controller)) {
    s.line = segment_geometry(w, *l, segment);
    ctx.line = s.line;
  }
  s.v = lyapunov_value(primary_lyapunov(cfg), w.q, ctx);
  s.v1 = lean_v1(w.q);
  if (const auto* b = std::get_if<BalanceTask>(&cfg.controller)) {
    s.v_alpha = balance_v_alpha(w.q, b->gains.k2);
  } else {
    s.v_alpha = kNaN;
  }
  return s;
}

}  // namespace

LyapunovSpec primary_lyapunov(const SimConfig& cfg) {
  if (const auto* b = std::get_if<BalanceTask>(&cfg.controller)) {
    return {b->gains.k1 == 1.0 ? LyapunovKind::BalanceV : LyapunovKind::BalanceVStar,
            b->gains.k1, b->gains.k2};
  }
  if (std::holds_alternative<PositionTask>(cfg.controller)) {
    return {LyapunovKind::PositionV};
  }
  if (std::holds_alternative<LineTask>(cfg.controller)) return {LyapunovKind::LineV};
  return {LyapunovKind::BalanceV};
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Toppled:
      return "Toppled";
    case EventKind::Converged:
      return "Converged";
    case EventKind::SingularSteering:
      return "SingularSteering";
    case EventKind::DomainExit:
      return "DomainExit";
  }
  return "Unknown";
}

std::optional<Event> Trajectory::terminal() const {
  if (events.empty()) return std::nullopt;
  return events.back();
}

std::size_t step_count(double t_end, double dt) {
  return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "requires dt > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) {
    throw ValidationError("t_end", "requires t_end >= dt");
  }
  params.validate();
  if (friction) {
    if (mode != Mode::Torque) throw ValidationError("friction", "torque mode only");
    friction->validate();
  }
  if (!(actuator_lag >= 0.0)) throw ValidationError("actuator_lag", "requires lag >= 0");
  if (actuator_lag > 0.0 && mode != Mode::Velocity) {
    throw ValidationError("actuator_lag", "velocity mode only");
  }
  const double margin = events.topple_margin;
  if (!(margin >= 0.0 && margin < kHalfPi)) {
    throw ValidationError("events.topple_margin", "requires 0 <= margin < pi/2");
  }
  const double beta = initial.q.beta;
  if (!(beta > margin && beta < std::numbers::pi - margin)) {
    throw ValidationError("initial.beta", "must lie in (margin, pi - margin)");
  }
  if (!(events.alpha_dot_floor > 0.0)) {
    throw ValidationError("events.alpha_dot_floor", "requires floor > 0");
  }

  std::visit(
      [&](const auto& task) {
        using T = std::decay_t<decltype(task)>;
        if constexpr (std::is_same_v<T, OpenLoop>) {
          const bool torque_cmd = std::holds_alternative<DecoupledCommand>(task.command);
          if (torque_cmd != (mode == Mode::Torque)) {
            throw ValidationError("command", "command type does not match mode");
          }
        } else if constexpr (std::is_same_v<T, BalanceTask>) {
          if (mode != Mode::Torque) {
            throw ValidationError("controller", "balance runs in torque mode");
          }
          task.gains.validate();
        } else if constexpr (std::is_same_v<T, PositionTask>) {
          if (mode != Mode::Velocity) {
            throw ValidationError("controller", "position runs in velocity mode");
          }
          task.gains.validate(limits);
        } else {
          if (mode != Mode::Velocity) {
            throw ValidationError("controller", "line runs in velocity mode");
          }
          task.gains.validate(limits);
          if (task.waypoints.size() < 2) {
            throw ValidationError("path", "needs at least two waypoints");
          }
          for (std::size_t i = 1; i < task.waypoints.size(); ++i) {
            if (task.waypoints[i] == task.waypoints[i - 1]) {
              throw ValidationError("path[" + std::to_string(i) + "]",
                                    "repeats the previous waypoint");
            }
          }
        }
      },
      controller);
}

WheelState prepare_initial(const SimConfig& cfg) {
  WheelState w = cfg.initial;
  w.q = with_lean_accel(w.q, cfg.params);
  const Point2 c = center_from_contact(w.contact, w.q.alpha, w.q.beta, cfg.params);
  w.center = c;
  return w;
}

WheelState step(const WheelState& state, const ControlCommand& command,
                const SimConfig& cfg) {
  const StateVec y = pack(state);
  return finish(rk4(y, cfg.dt,
                    [&](const StateVec& s) { return derivative(s, command, cfg); }),
                cfg);
}

ControlCommand evaluate_controller(const WheelState& w, const SimConfig& cfg,
                                   std::size_t segment) {
  return std::visit(
      [&](const auto& task) -> ControlCommand {
        using T = std::decay_t<decltype(task)>;
        if constexpr (std::is_same_v<T, OpenLoop>) {
          return task.command;
        } else if constexpr (std::is_same_v<T, BalanceTask>) {
          const double sign0 = cfg.initial.q.alpha_dot > 0.0 ? 1.0 : -1.0;
          return balance_control(w.q, task.gains, balance_v_star(w.q, task.gains.k1), sign0,
                                 cfg.params, cfg.events.alpha_dot_floor);
        } else if constexpr (std::is_same_v<T, PositionTask>) {
          return position_control(w.q, polar_view(w.contact, w.q.alpha, task.target),
                                  task.gains, cfg.params);
        } else {
          return line_control(w.q, segment_geometry(w, task, segment), task.gains,
                              cfg.params);
        }
      },
      cfg.controller);
}

void check_admissible(const SimConfig& cfg) {
  const WheelState w = prepare_initial(cfg);
  const double beta = w.q.beta;
  if (!(beta > 0.0 && beta < std::numbers::pi)) {
    throw InadmissibleStateError("0 < beta(0) < pi");
  }
  const double x = beta - kHalfPi;
  if (is_balance(cfg)) {
    if (!(std::abs(w.q.alpha_dot) >= cfg.events.alpha_dot_floor)) {
      throw InadmissibleStateError("alpha_dot(0) != 0");
    }
    if (!(sigma(x, w.q.beta_dot, w.q.beta_ddot) < kHalfPi)) {
      throw InadmissibleStateError("sigma < pi/2");
    }
  } else if (const auto* p = std::get_if<PositionTask>(&cfg.controller)) {
    if (!(polar_view(w.contact, w.q.alpha, p->target).e > 0.0)) {
      throw InadmissibleStateError("e(0) > 0");
    }
    const double lean = x + w.q.beta_dot;
    if (!(std::sqrt(x * x + lean * lean) / 2.0 < kHalfPi)) {
      throw InadmissibleStateError("sqrt((beta-pi/2)^2 + (beta-pi/2+beta_dot)^2)/2 < pi/2");
    }
  } else if (const auto* l = std::get_if<LineTask>(&cfg.controller)) {
    if (!(segment_geometry(w, *l, 0).e > 0.0)) throw InadmissibleStateError("e(0) > 0");
  }
}

std::vector<Event> detect_events(const WheelState& w, const SimConfig& cfg, double t,
                                 std::size_t segment) {
  std::vector<Event> events;
  const StateVec y = pack(w);
  for (double v : y) {
    if (!std::isfinite(v)) {
      events.push_back({EventKind::DomainExit, t, "non-finite state"});
      return events;
    }
  }
  const double margin = cfg.events.topple_margin;
  const double beta = w.q.beta;
  if (!(beta > margin && beta < std::numbers::pi - margin)) {
    events.push_back({EventKind::Toppled, t, "beta = " + std::to_string(beta)});
  }

  const EventThresholds& th = cfg.events;
  bool converged = false;
  std::string detail;
  if (is_balance(cfg)) {
    converged = std::abs(beta - kHalfPi) < th.converge_lean &&
                std::abs(w.q.beta_dot) < th.converge_lean &&
                std::abs(w.q.alpha_dot) < th.converge_rate &&
                std::abs(w.q.gamma_dot) < th.converge_rate;
    detail = "upright and at rest";
  } else if (const auto* p = std::get_if<PositionTask>(&cfg.controller)) {
    const double e = polar_view(w.contact, w.q.alpha, p->target).e;
    converged = e < th.converge_distance;
    detail = "e = " + std::to_string(e);
  } else if (const auto* l = std::get_if<LineTask>(&cfg.controller)) {
    if (segment + 1 == segment_count(cfg)) {
      const LineGeometry g = segment_geometry(w, *l, segment);
      converged = g.d < th.converge_distance && g.e < th.converge_line_distance;
      detail = "d = " + std::to_string(g.d) + ", e = " + std::to_string(g.e);
    }
  }
  if (converged && events.empty()) events.push_back({EventKind::Converged, t, detail});

  if (is_balance(cfg) && !(std::abs(w.q.alpha_dot) >= th.alpha_dot_floor)) {
    events.push_back({EventKind::SingularSteering, t,
                      "|alpha_dot| = " + std::to_string(std::abs(w.q.alpha_dot))});
  }
  return events;
}

Trajectory run_closed_loop(const SimConfig& cfg) {
  cfg.validate();
  check_admissible(cfg);

  Trajectory traj;
  traj.mode = cfg.mode;
  traj.kind = primary_lyapunov(cfg).kind;
  const std::size_t n = step_count(cfg.t_end, cfg.dt);
  traj.samples.reserve(n + 1);

  WheelState w = prepare_initial(cfg);
  std::size_t segment = 0;
  const std::size_t last_segment = segment_count(cfg) - 1;
  bool converged_once = false;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;

    if (const auto* l = std::get_if<LineTask>(&cfg.controller)) {
      while (segment < last_segment &&
             segment_geometry(w, *l, segment).d < cfg.events.segment_switch_distance) {
        ++segment;
      }
    }

    std::vector<Event> now = detect_events(w, cfg, t, segment);
    if (converged_once) {
      std::erase_if(now, [](const Event& e) { return e.kind == EventKind::Converged; });
    }
    converged_once = converged_once || std::any_of(now.begin(), now.end(), [](const Event& e) {
                       return e.kind == EventKind::Converged;
                     });
    const auto is_terminal = [&](const Event& e) {
      return e.kind != EventKind::Converged || cfg.events.stop_on_converge;
    };
    // Terminal events go last so terminal() reports the one that ended the run.
    std::stable_partition(now.begin(), now.end(),
                          [&](const Event& e) { return !is_terminal(e); });
    const bool stop = std::any_of(now.begin(), now.end(), is_terminal);
    const bool blocked = std::any_of(now.begin(), now.end(), [](const Event& e) {
      return e.kind != EventKind::Converged;
    });
    for (Event& ev : now) traj.events.push_back(std::move(ev));

    ControlCommand command = DecoupledCommand{kNaN, kNaN};
    if (cfg.mode == Mode::Velocity) command = VelocityCommand{kNaN, kNaN};
    if (!blocked) {
      command = evaluate_controller(w, cfg, segment);
      apply_velocity_command(w, command, cfg);
    }
    traj.samples.push_back(make_sample(t, w, command, cfg, segment));

    if (stop || k == n) break;

    try {
      if (cfg.hold == CommandHold::Continuous && !std::holds_alternative<OpenLoop>(cfg.controller)) {
        const StateVec y = pack(w);
        const StateVec next = rk4(y, cfg.dt, [&](const StateVec& s) {
          WheelState ws = unpack(s);
          ws.q = with_lean_accel(ws.q, cfg.params);
          ControlCommand c = evaluate_controller(ws, cfg, segment);
          return derivative(s, c, cfg);
        });
        w = finish(next, cfg);
      } else {
        w = step(w, command, cfg);
      }
    } catch (const NonFiniteStateError& e) {
      traj.events.push_back({EventKind::DomainExit, t + cfg.dt, e.what()});
      break;
    } catch (const SingularSteeringError& e) {
      traj.events.push_back({EventKind::SingularSteering, t + cfg.dt, e.what()});
      break;
    } catch (const DegenerateLeanError& e) {
      traj.events.push_back({EventKind::Toppled, t + cfg.dt, e.what()});
      break;
    }
  }
  return traj;
}

DecayReport decay_monitor(const Trajectory& trajectory, const LyapunovSpec& spec,
                          double tolerance) {
  if (trajectory.samples.empty()) throw EmptyTrajectoryError("trajectory has no samples");
  std::vector<double> times;
  std::vector<double> values;
  times.reserve(trajectory.samples.size());
  values.reserve(trajectory.samples.size());
  for (const Sample& s : trajectory.samples) {
    LyapunovContext ctx{s.polar, s.line};
    times.push_back(s.t);
    values.push_back(lyapunov_value(spec, s.state.q, ctx));
  }
  return decay_monitor(std::span<const double>(times), std::span<const double>(values),
                       spec.kind, tolerance);
}

}  // namespace gyrover
