#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gyrover/errors.hpp"
#include "gyrover/report.hpp"
#include "gyrover/scenario.hpp"

namespace fs = std::filesystem;
using namespace gyrover;

namespace {

constexpr int kConfigError = static_cast<int>(ExitCode::ConfigError);

std::string outcome(const RunReport& r) {
  if (!r.terminal) return "horizon";
  return std::string(to_string(r.terminal->kind)) + "@" + std::to_string(r.terminal->time);
}

void print_summary(const RunReport& r, std::ostream& os) {
  os << r.scenario << ": exit " << static_cast<int>(r.exit_code) << " (" << outcome(r) << ")";
  for (const ThresholdCheck& c : r.checks) {
    if (!c.pass) os << " FAIL " << c.name << "=" << c.value << " limit " << c.limit;
  }
  os << '\n';
}

int run_one(const fs::path& file, const fs::path& out, std::optional<double> dt,
            std::optional<double> t_end, TrajectoryFormat format, std::ostream& os) {
  try {
    Scenario sc = parse_scenario(file);
    override_timing(sc, dt, t_end);
    const RunReport r = run_scenario(sc, out, format);
    print_summary(r, os);
    return static_cast<int>(r.exit_code);
  } catch (const std::exception& e) {
    os << file.string() << ": error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate a single-wheel gyroscopic robot under its controllers"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one scenario file");
  std::string run_file;
  std::string run_out = "out";
  std::optional<double> run_dt;
  std::optional<double> run_t_end;
  std::string run_format = "csv";
  run->add_option("scenario", run_file, "Scenario JSON file")->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--dt", run_dt, "Override the step size (s)");
  run->add_option("--t-end", run_t_end, "Override the horizon (s)");
  run->add_option("--format", run_format, "Trajectory format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* batch = app.add_subcommand("batch", "Run every *.json scenario in a directory");
  std::string batch_dir;
  std::string batch_out = "out";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  batch->add_option("dir", batch_dir, "Scenario directory")->required();
  batch->add_option("--out", batch_out, "Output root; one subdirectory per scenario");
  batch->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-channels", "Print the trajectory channels");

  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  std::string validate_file;
  validate->add_option("scenario", validate_file, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*run) {
    const TrajectoryFormat format =
        run_format == "json" ? TrajectoryFormat::Json : TrajectoryFormat::Csv;
    return run_one(run_file, run_out, run_dt, run_t_end, format, std::cout);
  }

  if (*batch) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(batch_dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    if (ec) {
      std::cerr << "cannot read " << batch_dir << ": " << ec.message() << '\n';
      return kConfigError;
    }
    std::sort(files.begin(), files.end());
    std::vector<int> codes(files.size(), 0);
    std::vector<std::string> logs(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < files.size(); i = next++) {
        std::ostringstream os;
        codes[i] = run_one(files[i], fs::path(batch_out) / files[i].stem(), std::nullopt,
                           std::nullopt, TrajectoryFormat::Csv, os);
        logs[i] = os.str();
      }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<unsigned>(jobs, std::max<std::size_t>(1, files.size()));
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int worst = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
      std::cout << logs[i];
      worst = std::max(worst, codes[i]);
    }
    return worst;
  }

  if (*list) {
    for (const ChannelInfo& c : channels()) std::cout << c.name << '\t' << c.unit << '\n';
    return 0;
  }

  if (*validate) {
    try {
      const Scenario sc = parse_scenario(validate_file);
      std::cout << sc.name << ": ok\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << validate_file << ": " << e.what() << '\n';
      return kConfigError;
    }
  }
  return kConfigError;
}
