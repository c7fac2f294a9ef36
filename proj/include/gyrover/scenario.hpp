#pragma once

// Scenario files: a JSON document describing one simulation plus the
// thresholds its report is judged against. Parsing is strict; unknown keys
// and out-of-range values are rejected with the offending field named.
//
// Schema (all keys optional unless marked):
//
//   name            string (required)
//   mode            "torque" | "velocity"
//   dt, t_end       seconds
//   hold            "zoh" | "continuous"
//   actuator_lag    seconds, velocity mode
//   params          { m, R, Ix, g, M22 }
//   friction        { mu_v[3], mu_d[3], mu_s[3], D, compensate }
//   initial         { alpha, beta, gamma, alpha_dot, beta_dot,
//                     gamma_dot | beta_ddot, x_a, y_a }
//   controller      (required) one of
//                     { type: "open_loop", steer, drive }
//                     { type: "balance", k1, k2 }
//                     { type: "position", k3, k4, smoothing, target[2] }
//                     { type: "line", k3, k5, smoothing, path[[x, y], ...] }
//                   smoothing is null (hard switching) or { k6, k7 };
//                   omitted means { k6: 20, k7: 20 }
//   limits          { alpha_dot_max, gamma_dot_max }
//   events          { topple_margin, alpha_dot_floor, converge_lean,
//                     converge_rate, converge_distance,
//                     converge_line_distance, segment_switch_distance,
//                     stop_on_converge }
//   thresholds      see Thresholds
//   plot_channels   [string, ...]

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gyrover/simulator.hpp"

namespace gyrover {

/// Acceptance thresholds checked on a finished run. Unset entries are not
/// checked.
struct Thresholds {
  bool require_converged = true;
  std::optional<double> final_e_max;       // position: final e
  std::optional<double> final_d_max;       // line: final d
  std::optional<double> final_line_e_max;  // line: final e
  std::optional<double> max_lean_deviation;  // max |beta - pi/2| over the run
  std::optional<double> final_gamma_dot_max;
  bool steering_sign_preserved = false;  // sign(alpha') never changes
  bool lyapunov_monotone = false;        // primary V non-increasing

  bool operator==(const Thresholds&) const = default;
};

struct Scenario {
  std::string name;
  SimConfig config;
  Thresholds thresholds;
  std::vector<std::string> plot_channels;

  bool operator==(const Scenario&) const = default;
};

/// Throws ParseError on malformed JSON and ValidationError on bad content.
Scenario parse_scenario_text(const std::string& text);

/// Reads and parses a file. Throws ParseError if it cannot be read.
Scenario parse_scenario(const std::filesystem::path& path);

/// Pretty-printed JSON that parses back to an equal Scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Overrides dt and t_end, then revalidates.
void override_timing(Scenario& scenario, std::optional<double> dt,
                     std::optional<double> t_end);

}  // namespace gyrover
