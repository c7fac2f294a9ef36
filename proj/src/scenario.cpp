#include "gyrover/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

using nlohmann::json;

// Object reader that records which keys were consumed so leftovers can be
// reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(display(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(raw(key), field(key));
  }

  std::optional<double> optional_number(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) {
      if (has(key)) used_.insert(key);
      return std::nullopt;
    }
    return as_number(raw(key), field(key));
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(field(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    if (!has(key)) throw ValidationError(field(key), "is required");
    const json& v = raw(key);
    if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<Reader> object(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) {
      if (has(key)) used_.insert(key);
      return std::nullopt;
    }
    return Reader(raw(key), field(key));
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.contains(item.key())) throw ValidationError(field(item.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ValidationError(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError(field, "must be finite");
    return x;
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Vec3 vec3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) throw ValidationError(field, "expected 3 numbers");
  return {Reader::as_number(v[0], field + "[0]"), Reader::as_number(v[1], field + "[1]"),
          Reader::as_number(v[2], field + "[2]")};
}

Point2 point(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) throw ValidationError(field, "expected [x, y]");
  return {Reader::as_number(v[0], field + "[0]"), Reader::as_number(v[1], field + "[1]")};
}

json to_json(const Point2& p) { return json::array({p.x, p.y}); }

json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

std::optional<Smoothing> read_smoothing(Reader& r) {
  if (!r.has("smoothing")) return Smoothing{};
  auto s = r.object("smoothing");
  if (!s) return std::nullopt;
  Smoothing out;
  out.k6 = s->number("k6", out.k6);
  out.k7 = s->number("k7", out.k7);
  s->finish();
  if (!(out.k6 > 0.0)) throw ValidationError("controller.smoothing.k6", "requires k6 > 0");
  if (!(out.k7 > 0.0)) throw ValidationError("controller.smoothing.k7", "requires k7 > 0");
  return out;
}

json smoothing_json(const std::optional<Smoothing>& s) {
  if (!s) return nullptr;
  return {{"k6", s->k6}, {"k7", s->k7}};
}

RobotParams read_params(Reader& r) {
  RobotParams p;
  p.mass = r.number("m", p.mass);
  p.radius = r.number("R", p.radius);
  p.inertia_x = r.number("Ix", p.inertia_x);
  p.gravity = r.number("g", p.gravity);
  p.lean_inertia_override = r.optional_number("M22");
  r.finish();
  return p;
}

FrictionParams read_friction(Reader& r) {
  FrictionParams f;
  if (r.has("mu_v")) f.mu_v = vec3(r.raw("mu_v"), r.field("mu_v"));
  if (r.has("mu_d")) f.mu_d = vec3(r.raw("mu_d"), r.field("mu_d"));
  if (r.has("mu_s")) f.mu_s = vec3(r.raw("mu_s"), r.field("mu_s"));
  f.stribeck_scale = r.number("D", f.stribeck_scale);
  f.compensate = r.boolean("compensate", f.compensate);
  r.finish();
  return f;
}

ControllerBinding read_controller(Reader& r) {
  const std::string type = r.string("type");
  ControllerBinding out;
  if (type == "open_loop") {
    // The command variant is fixed up once the mode is known.
    out = OpenLoop{DecoupledCommand{r.number("steer", 0.0), r.number("drive", 0.0)}};
  } else if (type == "balance") {
    BalanceTask t;
    t.gains.k1 = r.number("k1", t.gains.k1);
    t.gains.k2 = r.number("k2", t.gains.k2);
    out = t;
  } else if (type == "position") {
    PositionTask t;
    t.gains.k3 = r.number("k3", t.gains.k3);
    t.gains.k4 = r.number("k4", t.gains.k4);
    t.gains.smoothing = read_smoothing(r);
    if (r.has("target")) t.target = point(r.raw("target"), r.field("target"));
    out = t;
  } else if (type == "line") {
    LineTask t;
    t.gains.k3 = r.number("k3", t.gains.k3);
    t.gains.k5 = r.number("k5", t.gains.k5);
    t.gains.smoothing = read_smoothing(r);
    if (!r.has("path")) throw ValidationError(r.field("path"), "is required");
    const json& path = r.raw("path");
    if (!path.is_array()) throw ValidationError(r.field("path"), "expected an array");
    for (std::size_t i = 0; i < path.size(); ++i) {
      t.waypoints.push_back(point(path[i], r.field("path") + "[" + std::to_string(i) + "]"));
    }
    out = t;
  } else {
    throw ValidationError(r.field("type"),
                          "expected open_loop, balance, position or line, got " + type);
  }
  r.finish();
  return out;
}

json controller_json(const ControllerBinding& c) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, OpenLoop>) {
          double steer = 0.0;
          double drive = 0.0;
          if (const auto* u = std::get_if<DecoupledCommand>(&t.command)) {
            steer = u->u5;
            drive = u->u6;
          } else {
            const auto& v = std::get<VelocityCommand>(t.command);
            steer = v.u_alpha;
            drive = v.u_gamma;
          }
          return {{"type", "open_loop"}, {"steer", steer}, {"drive", drive}};
        } else if constexpr (std::is_same_v<T, BalanceTask>) {
          return {{"type", "balance"}, {"k1", t.gains.k1}, {"k2", t.gains.k2}};
        } else if constexpr (std::is_same_v<T, PositionTask>) {
          return {{"type", "position"},
                  {"k3", t.gains.k3},
                  {"k4", t.gains.k4},
                  {"smoothing", smoothing_json(t.gains.smoothing)},
                  {"target", to_json(t.target)}};
        } else {
          json path = json::array();
          for (const Point2& p : t.waypoints) path.push_back(to_json(p));
          return {{"type", "line"},
                  {"k3", t.gains.k3},
                  {"k5", t.gains.k5},
                  {"smoothing", smoothing_json(t.gains.smoothing)},
                  {"path", path}};
        }
      },
      c);
}

WheelState read_initial(Reader& r, const RobotParams& params) {
  WheelState w;
  GeneralizedState& q = w.q;
  q.alpha = r.number("alpha", q.alpha);
  q.beta = r.number("beta", q.beta);
  q.gamma = r.number("gamma", q.gamma);
  q.alpha_dot = r.number("alpha_dot", q.alpha_dot);
  q.beta_dot = r.number("beta_dot", q.beta_dot);
  w.contact.x_a = r.number("x_a", 0.0);
  w.contact.y_a = r.number("y_a", 0.0);
  const bool has_gd = r.has("gamma_dot");
  const bool has_bdd = r.has("beta_ddot");
  if (has_gd && has_bdd) {
    throw ValidationError(r.field("beta_ddot"), "give gamma_dot or beta_ddot, not both");
  }
  if (has_bdd) {
    // Solve the lean equation for the drive rate that yields this beta''.
    const double bdd = r.number("beta_ddot", 0.0);
    const ReducedCoefficients c = reduced_params(params);
    const double cb = std::cos(q.beta);
    const double sb = std::sin(q.beta);
    const double den = -c.jm * sb * q.alpha_dot;
    if (den == 0.0) {
      throw ValidationError(r.field("beta_ddot"), "needs alpha_dot != 0 and sin(beta) != 0");
    }
    q.gamma_dot = (bdd + c.gm * cb + c.im * cb * sb * q.alpha_dot * q.alpha_dot) / den;
  } else {
    q.gamma_dot = r.number("gamma_dot", 0.0);
  }
  r.finish();
  return w;
}

EventThresholds read_events(Reader& r) {
  EventThresholds e;
  e.topple_margin = r.number("topple_margin", e.topple_margin);
  e.alpha_dot_floor = r.number("alpha_dot_floor", e.alpha_dot_floor);
  e.converge_lean = r.number("converge_lean", e.converge_lean);
  e.converge_rate = r.number("converge_rate", e.converge_rate);
  e.converge_distance = r.number("converge_distance", e.converge_distance);
  e.converge_line_distance = r.number("converge_line_distance", e.converge_line_distance);
  e.segment_switch_distance = r.number("segment_switch_distance", e.segment_switch_distance);
  e.stop_on_converge = r.boolean("stop_on_converge", e.stop_on_converge);
  r.finish();
  return e;
}

Thresholds read_thresholds(Reader& r) {
  Thresholds t;
  t.require_converged = r.boolean("require_converged", t.require_converged);
  t.final_e_max = r.optional_number("final_e_max");
  t.final_d_max = r.optional_number("final_d_max");
  t.final_line_e_max = r.optional_number("final_line_e_max");
  t.max_lean_deviation = r.optional_number("max_lean_deviation");
  t.final_gamma_dot_max = r.optional_number("final_gamma_dot_max");
  t.steering_sign_preserved = r.boolean("steering_sign_preserved", t.steering_sign_preserved);
  t.lyapunov_monotone = r.boolean("lyapunov_monotone", t.lyapunov_monotone);
  r.finish();
  return t;
}

json optional_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

Scenario from_json(const json& root) {
  Reader r(root, "");
  Scenario sc;
  sc.name = r.string("name");
  if (sc.name.empty()) throw ValidationError("name", "must not be empty");
  SimConfig& cfg = sc.config;

  if (r.has("mode")) {
    const std::string mode = r.string("mode");
    if (mode == "torque") {
      cfg.mode = Mode::Torque;
    } else if (mode == "velocity") {
      cfg.mode = Mode::Velocity;
    } else {
      throw ValidationError("mode", "expected torque or velocity");
    }
  }
  cfg.dt = r.number("dt", cfg.dt);
  cfg.t_end = r.number("t_end", cfg.t_end);
  if (r.has("hold")) {
    const std::string hold = r.string("hold");
    if (hold == "zoh") {
      cfg.hold = CommandHold::ZeroOrderHold;
    } else if (hold == "continuous") {
      cfg.hold = CommandHold::Continuous;
    } else {
      throw ValidationError("hold", "expected zoh or continuous");
    }
  }
  cfg.actuator_lag = r.number("actuator_lag", cfg.actuator_lag);
  if (auto p = r.object("params")) cfg.params = read_params(*p);
  if (auto f = r.object("friction")) cfg.friction = read_friction(*f);
  if (auto l = r.object("limits")) {
    cfg.limits.alpha_dot_max = l->number("alpha_dot_max", cfg.limits.alpha_dot_max);
    cfg.limits.gamma_dot_max = l->number("gamma_dot_max", cfg.limits.gamma_dot_max);
    l->finish();
  }
  if (auto e = r.object("events")) cfg.events = read_events(*e);
  if (auto c = r.object("controller")) {
    cfg.controller = read_controller(*c);
  } else {
    throw ValidationError("controller", "is required");
  }
  if (auto* open = std::get_if<OpenLoop>(&cfg.controller); open && cfg.mode == Mode::Velocity) {
    const auto u = std::get<DecoupledCommand>(open->command);
    open->command = VelocityCommand{u.u5, u.u6};
  }
  if (auto i = r.object("initial")) cfg.initial = read_initial(*i, cfg.params);
  if (auto t = r.object("thresholds")) sc.thresholds = read_thresholds(*t);
  if (r.has("plot_channels")) {
    const json& pc = r.raw("plot_channels");
    if (!pc.is_array()) throw ValidationError("plot_channels", "expected an array");
    for (const json& c : pc) {
      if (!c.is_string()) throw ValidationError("plot_channels", "expected strings");
      sc.plot_channels.push_back(c.get<std::string>());
    }
  }
  r.finish();

  cfg.validate();
  cfg.initial = prepare_initial(cfg);
  return sc;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  return from_json(root);
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string serialize_scenario(const Scenario& sc) {
  const SimConfig& cfg = sc.config;
  const GeneralizedState& q = cfg.initial.q;
  json params = {{"m", cfg.params.mass},
                 {"R", cfg.params.radius},
                 {"Ix", cfg.params.inertia_x},
                 {"g", cfg.params.gravity},
                 {"M22", optional_json(cfg.params.lean_inertia_override)}};
  json root = {
      {"name", sc.name},
      {"mode", cfg.mode == Mode::Torque ? "torque" : "velocity"},
      {"dt", cfg.dt},
      {"t_end", cfg.t_end},
      {"hold", cfg.hold == CommandHold::Continuous ? "continuous" : "zoh"},
      {"actuator_lag", cfg.actuator_lag},
      {"params", params},
      {"initial",
       {{"alpha", q.alpha},
        {"beta", q.beta},
        {"gamma", q.gamma},
        {"alpha_dot", q.alpha_dot},
        {"beta_dot", q.beta_dot},
        {"gamma_dot", q.gamma_dot},
        {"x_a", cfg.initial.contact.x_a},
        {"y_a", cfg.initial.contact.y_a}}},
      {"controller", controller_json(cfg.controller)},
      {"events",
       {{"topple_margin", cfg.events.topple_margin},
        {"alpha_dot_floor", cfg.events.alpha_dot_floor},
        {"converge_lean", cfg.events.converge_lean},
        {"converge_rate", cfg.events.converge_rate},
        {"converge_distance", cfg.events.converge_distance},
        {"converge_line_distance", cfg.events.converge_line_distance},
        {"segment_switch_distance", cfg.events.segment_switch_distance},
        {"stop_on_converge", cfg.events.stop_on_converge}}},
      {"thresholds",
       {{"require_converged", sc.thresholds.require_converged},
        {"final_e_max", optional_json(sc.thresholds.final_e_max)},
        {"final_d_max", optional_json(sc.thresholds.final_d_max)},
        {"final_line_e_max", optional_json(sc.thresholds.final_line_e_max)},
        {"max_lean_deviation", optional_json(sc.thresholds.max_lean_deviation)},
        {"final_gamma_dot_max", optional_json(sc.thresholds.final_gamma_dot_max)},
        {"steering_sign_preserved", sc.thresholds.steering_sign_preserved},
        {"lyapunov_monotone", sc.thresholds.lyapunov_monotone}}},
      {"plot_channels", sc.plot_channels},
  };
  json limits = json::object();
  if (std::isfinite(cfg.limits.alpha_dot_max)) limits["alpha_dot_max"] = cfg.limits.alpha_dot_max;
  if (std::isfinite(cfg.limits.gamma_dot_max)) limits["gamma_dot_max"] = cfg.limits.gamma_dot_max;
  root["limits"] = limits;
  if (cfg.friction) {
    const FrictionParams& f = *cfg.friction;
    root["friction"] = {{"mu_v", to_json(f.mu_v)},
                        {"mu_d", to_json(f.mu_d)},
                        {"mu_s", to_json(f.mu_s)},
                        {"D", f.stribeck_scale},
                        {"compensate", f.compensate}};
  }
  return root.dump(2) + "\n";
}

void override_timing(Scenario& sc, std::optional<double> dt, std::optional<double> t_end) {
  if (dt) sc.config.dt = *dt;
  if (t_end) sc.config.t_end = *t_end;
  sc.config.validate();
}

}  // namespace gyrover
