#pragma once

#include <optional>
#include <string>

#include "gaitevo/ga.hpp"
#include "gaitevo/serial.hpp"

namespace gaitevo {

// One run's settings as read from a config file. Any section or key may be
// omitted (documented defaults apply); unknown keys are rejected.
struct AppConfig {
  GaConfig ga;
  SimConfig sim;
  std::string backend = "sim";  // sim | manual | serial
  SerialSettings serial;
  // Set only when the file provided ga.seed; evolve requires a seed from the
  // file or the command line, never the wall clock.
  std::optional<std::uint64_t> seed;
};

AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::string& path);

// Run-log file: line 1 is the config snapshot, then one JSON object per line
// for each initial individual and each iteration record. The byte layout is
// stable for a given RunLog, so seeded runs diff clean.
std::string dump_log(const RunLog& log);
RunLog parse_log(const std::string& text);

void save_log(const RunLog& log, const std::string& path);
RunLog load_log(const std::string& path);

// Convergence view: "iteration,best_cm,mean_cm,population_size", row 0 from
// the initial population, one row per iteration after, cm with 2 decimals.
std::string report_csv(const RunLog& log);

// 2-decimal centimetre formatting shared by the CSV report and the CLI.
std::string format_cm(double value);

}  // namespace gaitevo
