#include "gyrover/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "gyrover/errors.hpp"

namespace gyrover {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string channel_list() {
  std::string out;
  for (const ChannelInfo& c : channels()) {
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

std::size_t channel_index(const std::string& name) {
  const auto& all = channels();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].name == name) return i;
  }
  throw UnknownChannelError("unknown channel '" + name + "'; valid channels: " + channel_list());
}

double value_at(const Sample& s, std::size_t index) {
  const GeneralizedState& q = s.state.q;
  switch (index) {
    case 0: return s.t;
    case 1: return q.alpha;
    case 2: return q.beta;
    case 3: return q.gamma;
    case 4: return q.alpha_dot;
    case 5: return q.beta_dot;
    case 6: return q.gamma_dot;
    case 7: return q.beta_ddot;
    case 8: return s.state.center.x;
    case 9: return s.state.center.y;
    case 10: return s.state.contact.x_a;
    case 11: return s.state.contact.y_a;
    case 12: return s.cmd_steer;
    case 13: return s.cmd_drive;
    case 14:
      if (s.polar) return s.polar->e;
      if (s.line) return s.line->e;
      return kNaN;
    case 15: return s.polar ? s.polar->psi : kNaN;
    case 16: return s.line ? s.line->d : kNaN;
    case 17: return s.v;
    case 18: return s.v1;
    case 19: return s.v_alpha;
    default: return kNaN;
  }
}

std::string unit_for(const ChannelInfo& c, Mode mode) {
  if (c.name == "cmd_steer" || c.name == "cmd_drive") {
    return mode == Mode::Torque ? "rad/s^2" : "rad/s";
  }
  return c.unit;
}

json event_json(const Event& e) {
  return {{"kind", to_string(e.kind)}, {"time", e.time}, {"detail", e.detail}};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

const std::vector<ChannelInfo>& channels() {
  static const std::vector<ChannelInfo> all = {
      {"t", "s"},         {"alpha", "rad"},     {"beta", "rad"},
      {"gamma", "rad"},   {"alpha_dot", "rad/s"}, {"beta_dot", "rad/s"},
      {"gamma_dot", "rad/s"}, {"beta_ddot", "rad/s^2"}, {"x_c", "m"},
      {"y_c", "m"},       {"x_a", "m"},         {"y_a", "m"},
      {"cmd_steer", "cmd"}, {"cmd_drive", "cmd"}, {"e", "m"},
      {"psi", "rad"},     {"d", "m"},           {"V", "1"},
      {"V1", "1"},        {"V_alpha", "1"},
  };
  return all;
}

double channel_value(const Sample& sample, const std::string& channel) {
  return value_at(sample, channel_index(channel));
}

std::vector<PlotColumn> emit_plot_data(const Trajectory& trajectory,
                                       std::span<const std::string> names) {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const std::string& n : names) idx.push_back(channel_index(n));
  std::vector<PlotColumn> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    PlotColumn col{names[i], {}};
    col.values.reserve(trajectory.samples.size());
    for (const Sample& s : trajectory.samples) col.values.push_back(value_at(s, idx[i]));
    out.push_back(std::move(col));
  }
  return out;
}

std::vector<std::string> default_plot_channels(const SimConfig& cfg) {
  std::vector<std::string> out = {"beta", "alpha_dot", "gamma_dot", "cmd_steer", "cmd_drive",
                                  "V", "x_a", "y_a"};
  if (std::holds_alternative<PositionTask>(cfg.controller)) {
    out.insert(out.end(), {"e", "psi"});
  } else if (std::holds_alternative<LineTask>(cfg.controller)) {
    out.insert(out.end(), {"e", "d"});
  } else if (std::holds_alternative<BalanceTask>(cfg.controller)) {
    out.push_back("V_alpha");
  }
  return out;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path,
                      TrajectoryFormat format) {
  const auto& all = channels();
  std::ofstream out = open_out(path);
  if (format == TrajectoryFormat::Csv) {
    for (std::size_t i = 0; i < all.size(); ++i) {
      out << (i ? "," : "") << all[i].name << '[' << unit_for(all[i], trajectory.mode) << ']';
    }
    out << '\n';
    for (const Sample& s : trajectory.samples) {
      for (std::size_t i = 0; i < all.size(); ++i) {
        out << (i ? "," : "") << format_number(value_at(s, i));
      }
      out << '\n';
    }
  } else {
    json cols = json::array();
    for (const ChannelInfo& c : all) {
      cols.push_back({{"name", c.name}, {"unit", unit_for(c, trajectory.mode)}});
    }
    json rows = json::array();
    for (const Sample& s : trajectory.samples) {
      json row = json::array();
      for (std::size_t i = 0; i < all.size(); ++i) {
        const double v = value_at(s, i);
        if (std::isnan(v)) {
          row.push_back(nullptr);
        } else {
          row.push_back(v);
        }
      }
      rows.push_back(std::move(row));
    }
    json doc = {{"channels", cols}, {"rows", rows}};
    json events = json::array();
    for (const Event& e : trajectory.events) events.push_back(event_json(e));
    doc["events"] = events;
    out << doc.dump() << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_plot_files(const Trajectory& trajectory, std::span<const std::string> names,
                      const std::filesystem::path& dir) {
  const std::vector<PlotColumn> cols = emit_plot_data(trajectory, names);
  for (const PlotColumn& col : cols) {
    const ChannelInfo& info = channels()[channel_index(col.channel)];
    std::ofstream out = open_out(dir / ("plot_" + col.channel + ".csv"));
    out << "t[s]," << col.channel << '[' << unit_for(info, trajectory.mode) << "]\n";
    for (std::size_t i = 0; i < col.values.size(); ++i) {
      out << format_number(trajectory.samples[i].t) << ',' << format_number(col.values[i])
          << '\n';
    }
  }
}

bool RunReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ThresholdCheck& c) { return c.pass; });
}

RunReport evaluate(const Scenario& scenario, const Trajectory& trajectory) {
  RunReport r;
  r.scenario = scenario.name;
  r.events = trajectory.events;
  r.terminal = trajectory.terminal();
  r.samples = trajectory.samples.size();
  if (trajectory.samples.empty()) return r;

  const Sample& last = trajectory.samples.back();
  r.final_state = last.state;
  r.decay = decay_monitor(trajectory, primary_lyapunov(scenario.config));

  const Thresholds& th = scenario.thresholds;
  const bool converged =
      std::any_of(trajectory.events.begin(), trajectory.events.end(),
                  [](const Event& e) { return e.kind == EventKind::Converged; });
  if (th.require_converged) {
    r.checks.push_back({"converged", converged ? 1.0 : 0.0, 1.0, converged});
  }
  const auto upper = [&](const char* name, std::optional<double> limit, double value) {
    if (limit) r.checks.push_back({name, value, *limit, value < *limit});
  };
  upper("final_e_max", th.final_e_max, value_at(last, 14));
  upper("final_d_max", th.final_d_max, value_at(last, 16));
  upper("final_line_e_max", th.final_line_e_max, last.line ? last.line->e : kNaN);
  if (th.max_lean_deviation) {
    double worst = 0.0;
    for (const Sample& s : trajectory.samples) {
      worst = std::max(worst, std::abs(s.state.q.beta - std::numbers::pi / 2.0));
    }
    r.checks.push_back(
        {"max_lean_deviation", worst, *th.max_lean_deviation, worst <= *th.max_lean_deviation});
  }
  upper("final_gamma_dot_max", th.final_gamma_dot_max, std::abs(last.state.q.gamma_dot));
  if (th.steering_sign_preserved) {
    const bool positive = trajectory.samples.front().state.q.alpha_dot > 0.0;
    double flips = 0.0;
    for (const Sample& s : trajectory.samples) {
      if ((s.state.q.alpha_dot > 0.0) != positive) ++flips;
    }
    r.checks.push_back({"steering_sign_preserved", flips, 0.0, flips == 0.0});
  }
  if (th.lyapunov_monotone) {
    r.checks.push_back({"lyapunov_monotone", r.decay->max_increase,
                        kDefaultMonotonicityTolerance, r.decay->ok()});
  }

  const bool fell = r.terminal && (r.terminal->kind == EventKind::Toppled ||
                                   r.terminal->kind == EventKind::DomainExit);
  if (fell) {
    r.exit_code = ExitCode::Toppled;
  } else if (converged && r.all_pass()) {
    r.exit_code = ExitCode::Converged;
  } else {
    r.exit_code = ExitCode::NotConverged;
  }
  return r;
}

std::string report_json(const RunReport& r) {
  json doc;
  doc["scenario"] = r.scenario;
  doc["exit_code"] = static_cast<int>(r.exit_code);
  doc["terminal_event"] = r.terminal ? event_json(*r.terminal) : json(nullptr);
  json events = json::array();
  for (const Event& e : r.events) events.push_back(event_json(e));
  doc["events"] = events;
  doc["samples"] = r.samples;
  if (r.final_state) {
    const WheelState& w = *r.final_state;
    doc["final_state"] = {{"alpha", w.q.alpha},         {"beta", w.q.beta},
                          {"gamma", w.q.gamma},         {"alpha_dot", w.q.alpha_dot},
                          {"beta_dot", w.q.beta_dot},   {"gamma_dot", w.q.gamma_dot},
                          {"beta_ddot", w.q.beta_ddot}, {"x_a", w.contact.x_a},
                          {"y_a", w.contact.y_a}};
  } else {
    doc["final_state"] = nullptr;
  }
  if (r.decay) {
    const DecayReport& d = *r.decay;
    doc["lyapunov"] = {{"max_increase", d.max_increase},
                       {"fitted_rate", d.fitted_rate ? json(*d.fitted_rate) : json(nullptr)},
                       {"violations", d.violation_times.size()},
                       {"first_violation", d.violation_times.empty()
                                               ? json(nullptr)
                                               : json(d.violation_times.front())},
                       {"ok", d.ok()}};
  } else {
    doc["lyapunov"] = nullptr;
  }
  json checks = json::array();
  for (const ThresholdCheck& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"value", std::isnan(c.value) ? json(nullptr) : json(c.value)},
                      {"limit", c.limit},
                      {"pass", c.pass}});
  }
  doc["checks"] = checks;
  doc["wall_clock_s"] = r.wall_clock_s;
  return doc.dump(2) + "\n";
}

RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       TrajectoryFormat format) {
  std::filesystem::create_directories(out_dir);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::string> names = scenario.plot_channels.empty()
                                             ? default_plot_channels(scenario.config)
                                             : scenario.plot_channels;
  for (const std::string& n : names) channel_index(n);
  RunReport report;
  try {
    const Trajectory traj = run_closed_loop(scenario.config);
    report = evaluate(scenario, traj);
    write_trajectory(traj, out_dir / (format == TrajectoryFormat::Csv ? "trajectory.csv"
                                                                     : "trajectory.json"),
                     format);
    write_plot_files(traj, names, out_dir);
  } catch (const InadmissibleStateError& e) {
    report = RunReport{};
    report.scenario = scenario.name;
    report.terminal = Event{EventKind::DomainExit, 0.0, e.what()};
    report.events = {*report.terminal};
    report.exit_code = ExitCode::Inadmissible;
  }
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream out = open_out(out_dir / "report.json");
  out << report_json(report);
  if (!out) throw std::runtime_error("failed writing report.json");
  return report;
}

}  // namespace gyrover
