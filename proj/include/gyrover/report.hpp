#pragma once

// Trajectory output, plot channels, run reports and exit codes.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gyrover/scenario.hpp"
#include "gyrover/simulator.hpp"

namespace gyrover {

struct ChannelInfo {
  std::string name;
  std::string unit;
};

/// Every channel a trajectory can emit, in file column order.
const std::vector<ChannelInfo>& channels();

/// Value of a channel at a sample; NaN where it does not apply. Throws
/// UnknownChannelError listing the valid names.
double channel_value(const Sample& sample, const std::string& channel);

struct PlotColumn {
  std::string channel;
  std::vector<double> values;
};

/// One column per requested channel, validated before any data is read.
std::vector<PlotColumn> emit_plot_data(const Trajectory& trajectory,
                                       std::span<const std::string> channels);

/// Default plot channels for a task.
std::vector<std::string> default_plot_channels(const SimConfig& cfg);

enum class TrajectoryFormat { Csv, Json };

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path,
                      TrajectoryFormat format);

/// Writes plot_<channel>.csv with columns t and the channel.
void write_plot_files(const Trajectory& trajectory, std::span<const std::string> channels,
                      const std::filesystem::path& dir);

enum class ExitCode : int {
  Converged = 0,
  NotConverged = 1,
  Toppled = 2,
  Inadmissible = 3,
  ConfigError = 4,
};

struct ThresholdCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string scenario;
  std::optional<Event> terminal;
  std::vector<Event> events;
  std::optional<WheelState> final_state;
  std::optional<DecayReport> decay;
  std::vector<ThresholdCheck> checks;
  std::size_t samples = 0;
  double wall_clock_s = 0.0;
  ExitCode exit_code = ExitCode::NotConverged;

  bool all_pass() const;
};

/// Judges a finished trajectory against the scenario thresholds.
RunReport evaluate(const Scenario& scenario, const Trajectory& trajectory);

std::string report_json(const RunReport& report);

/// Runs the scenario and writes trajectory, report.json and plot files into
/// `out_dir`. An inadmissible initial state yields a report with a
/// DomainExit event at t = 0 and no trajectory.
RunReport run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                       TrajectoryFormat format = TrajectoryFormat::Csv);

}  // namespace gyrover
