#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gaitevo/errors.hpp"
#include "gaitevo/fitness.hpp"
#include "gaitevo/ga.hpp"
#include "gaitevo/genome.hpp"
#include "gaitevo/serial.hpp"
#include "gaitevo/sim.hpp"
#include "gaitevo/store.hpp"

namespace {

using namespace gaitevo;

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitIo = 2;
constexpr int kExitBackend = 3;

std::unique_ptr<Evaluator> make_evaluator(const AppConfig& cfg) {
  if (cfg.backend == "sim") return std::make_unique<SimEvaluator>(cfg.sim);
  if (cfg.backend == "manual") return std::make_unique<ManualEvaluator>(std::cin, std::cerr);
  if (cfg.backend == "serial") {
    if (cfg.serial.port.empty()) {
      throw ConfigError("serial backend needs a port (--port or backend.port)");
    }
    return std::make_unique<SerialEvaluator>(cfg.serial);
  }
  throw ConfigError("unknown backend '" + cfg.backend + "'");
}

int run_evolve(const std::optional<std::string>& config_path,
               const std::optional<std::uint64_t>& seed,
               const std::optional<int>& iterations,
               const std::optional<std::string>& backend,
               const std::optional<std::string>& port, const std::string& out_path) {
  AppConfig cfg = config_path ? load_config(*config_path) : AppConfig{};
  if (seed) {
    cfg.seed = *seed;  // command line wins over the file
    cfg.ga.seed = *seed;
  }
  if (!cfg.seed) {
    throw ConfigError("no seed: pass --seed or set ga.seed in the config file");
  }
  if (iterations) {
    if (*iterations < 0) throw ConfigError("--iterations must be >= 0");
    cfg.ga.n_iterations = *iterations;
  }
  if (backend) cfg.backend = *backend;
  if (port) cfg.serial.port = *port;

  const std::unique_ptr<Evaluator> evaluator = make_evaluator(cfg);
  const RunLog log = evolve(cfg.ga, *evaluator, cfg.sim);
  save_log(log, out_path);

  const std::vector<Individual> final_members = final_population(log);
  const Population final_pop{final_members, cfg.ga.capacity};
  const Individual& best = best_member(final_pop);
  std::cout << "best_cm=" << format_cm(best.fitness) << "\n";
  std::cout << "best_genome=" << format_genome(best.genome) << "\n";
  return kExitOk;
}

Genome read_genome_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open genome file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return parse_genome(line);
  }
  throw ParseError(ParseError::Kind::WrongTokenCount, -1,
                   "no genome found in '" + path + "'");
}

void write_trace_csv(const std::vector<WalkerState>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << "t_ms,theta_front,theta_back,target_front,target_back,x_cm,y_cm,heading_deg\n";
  char buf[256];
  for (const WalkerState& s : samples) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", s.t,
                  s.theta_front, s.theta_back, s.target_front, s.target_back, s.x,
                  s.y, s.heading);
    out << buf;
  }
  if (!out) throw IoFailure("write to '" + path + "' failed");
}

int run_single(const std::string& genome_path, const std::string& backend,
               const std::optional<std::string>& config_path,
               const std::optional<std::string>& trace_path) {
  if (backend != "sim") {
    throw ConfigError("run supports only the sim backend");
  }
  const AppConfig cfg = config_path ? load_config(*config_path) : AppConfig{};
  const Genome g = read_genome_file(genome_path);
  const ValidationReport report = validate(g, cfg.ga.limits);
  if (!report.ok()) {
    for (const Violation& v : report.violations) {
      std::cerr << "gene " << v.gene_index << ": " << to_string(v.kind) << "\n";
    }
    return kExitInvalidInput;
  }
  const SimOutcome outcome = execute(g, cfg.sim);
  std::cout << "displacement_cm=" << format_cm(outcome.displacement_cm)
            << " deviation_deg=" << format_cm(outcome.deviation_deg)
            << " fell=" << (outcome.fell ? "true" : "false") << "\n";
  if (trace_path) write_trace_csv(trace(g, cfg.sim), *trace_path);
  return kExitOk;
}

int run_validate(const std::string& genome_path) {
  std::ifstream in(genome_path);
  if (!in) throw IoFailure("cannot open genome file '" + genome_path + "'");
  std::string line;
  int line_no = 0;
  bool all_ok = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Genome g = parse_genome(line);
      for (const Violation& v : validate(g).violations) {
        std::cout << "line " << line_no << " gene " << v.gene_index << ": "
                  << to_string(v.kind) << "\n";
        all_ok = false;
      }
    } catch (const ParseError& e) {
      std::cout << "line " << line_no << ": " << e.what() << "\n";
      all_ok = false;
    }
  }
  if (!all_ok) return kExitInvalidInput;
  std::cout << "OK\n";
  return kExitOk;
}

int run_rand(std::uint64_t seed, int count) {
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    std::cout << format_genome(random_genome(rng)) << "\n";
  }
  return kExitOk;
}

int run_report(const std::string& log_path, const std::optional<std::string>& csv_path) {
  const RunLog log = load_log(log_path);
  const std::string csv = report_csv(log);
  if (!csv_path) {
    std::cout << csv;
    return kExitOk;
  }
  std::ofstream out(*csv_path, std::ios::binary);
  if (!out) throw IoFailure("cannot open '" + *csv_path + "' for writing");
  out << csv;
  if (!out) throw IoFailure("write to '" + *csv_path + "' failed");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolutionary gait optimization for a two-servo walker"};
  app.require_subcommand(1);

  // evolve
  auto* evolve_cmd = app.add_subcommand("evolve", "run the genetic algorithm");
  std::optional<std::string> ev_config;
  std::optional<std::uint64_t> ev_seed;
  std::optional<int> ev_iterations;
  std::optional<std::string> ev_backend;
  std::optional<std::string> ev_port;
  std::string ev_out;
  evolve_cmd->add_option("--config", ev_config, "config file (JSON)");
  evolve_cmd->add_option("--seed", ev_seed, "RNG seed (overrides the config file)");
  evolve_cmd->add_option("--iterations", ev_iterations, "number of GA iterations");
  evolve_cmd->add_option("--backend", ev_backend, "sim, manual or serial");
  evolve_cmd->add_option("--port", ev_port, "serial port or exec:<command>");
  evolve_cmd->add_option("--out", ev_out, "run log output path")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "execute one genome");
  std::string run_genome_file;
  std::string run_backend = "sim";
  std::optional<std::string> run_config;
  std::optional<std::string> run_trace;
  run_cmd->add_option("genome-file", run_genome_file, "file with one genome per line")
      ->required();
  run_cmd->add_option("--backend", run_backend, "evaluation backend (sim only)");
  run_cmd->add_option("--config", run_config, "config file (JSON)");
  run_cmd->add_option("--trace", run_trace, "write a per-millisecond trace CSV here");

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "check genome existence conditions");
  std::string val_genome_file;
  validate_cmd->add_option("genome-file", val_genome_file, "file with one genome per line")
      ->required();

  // rand
  auto* rand_cmd = app.add_subcommand("rand", "print random canonical genomes");
  std::uint64_t rand_seed = 0;
  int rand_count = 1;
  rand_cmd->add_option("--seed", rand_seed, "RNG seed")->required();
  rand_cmd->add_option("--count", rand_count, "number of genomes");

  // report
  auto* report_cmd = app.add_subcommand("report", "convergence CSV from a run log");
  std::string report_log_file;
  std::optional<std::string> report_csv_path;
  report_cmd->add_option("log-file", report_log_file, "run log path")->required();
  report_cmd->add_option("--csv", report_csv_path, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalidInput;
  }

  try {
    if (evolve_cmd->parsed()) {
      return run_evolve(ev_config, ev_seed, ev_iterations, ev_backend, ev_port, ev_out);
    }
    if (run_cmd->parsed()) {
      return run_single(run_genome_file, run_backend, run_config, run_trace);
    }
    if (validate_cmd->parsed()) return run_validate(val_genome_file);
    if (rand_cmd->parsed()) return run_rand(rand_seed, rand_count);
    if (report_cmd->parsed()) return run_report(report_log_file, report_csv_path);
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const EvaluatorFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const SerialError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ConsoleClosed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}
