#include "gaitevo/store.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "gaitevo/errors.hpp"

namespace gaitevo {

namespace {

using Json = nlohmann::ordered_json;

// --- config -----------------------------------------------------------------

void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const Json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate_config(const AppConfig& cfg) {
  const GaConfig& ga = cfg.ga;
  check(ga.capacity >= 2, "ga.capacity must be >= 2");
  check(ga.p_mut >= 0 && ga.p_mut <= 1, "ga.p_mut must be in [0, 1]");
  check(ga.p_cat >= 0 && ga.p_cat <= 1, "ga.p_cat must be in [0, 1]");
  check(ga.cat_count >= 0, "ga.cat_count must be >= 0");
  check(ga.max_child_retries >= 1, "ga.max_child_retries must be >= 1");
  check(ga.n_iterations >= 0, "ga.n_iterations must be >= 0");
  check(ga.limits.delay_threshold > 0 && ga.limits.delay_threshold <= 1000,
        "limits.delay_threshold must be in (0, 1000]");
  check(cfg.sim.slew_rate > 0, "sim.slew_rate must be > 0");
  check(cfg.sim.c_slip >= 0 && cfg.sim.c_slip < cfg.sim.c_power,
        "sim coefficients must satisfy 0 <= c_slip < c_power");
  check(cfg.sim.fall_split > 0, "sim.fall_split must be > 0");
  check(cfg.backend == "sim" || cfg.backend == "manual" || cfg.backend == "serial",
        "backend.name must be sim, manual or serial");
  check(cfg.serial.timeout_s > 0, "backend.timeout_s must be > 0");
}

void parse_ga_section(const Json& ga, AppConfig& cfg) {
  reject_unknown_keys(ga,
                      {"capacity", "p_mut", "p_cat", "cat_count",
                       "max_child_retries", "n_iterations", "seed"},
                      "section 'ga'");
  read_field(ga, "capacity", cfg.ga.capacity);
  read_field(ga, "p_mut", cfg.ga.p_mut);
  read_field(ga, "p_cat", cfg.ga.p_cat);
  read_field(ga, "cat_count", cfg.ga.cat_count);
  read_field(ga, "max_child_retries", cfg.ga.max_child_retries);
  read_field(ga, "n_iterations", cfg.ga.n_iterations);
  if (ga.contains("seed")) {
    std::uint64_t seed = 0;
    read_field(ga, "seed", seed);
    cfg.ga.seed = seed;
    cfg.seed = seed;
  }
}

void parse_limits_section(const Json& limits, AppConfig& cfg) {
  reject_unknown_keys(limits, {"delay_threshold", "forbid_opposite_pairs"},
                      "section 'limits'");
  read_field(limits, "delay_threshold", cfg.ga.limits.delay_threshold);
  read_field(limits, "forbid_opposite_pairs", cfg.ga.limits.forbid_opposite_pairs);
}

void parse_sim_section(const Json& sim, AppConfig& cfg) {
  reject_unknown_keys(sim, {"slew_rate", "c_power", "c_slip", "c_turn", "fall_split"},
                      "section 'sim'");
  read_field(sim, "slew_rate", cfg.sim.slew_rate);
  read_field(sim, "c_power", cfg.sim.c_power);
  read_field(sim, "c_slip", cfg.sim.c_slip);
  read_field(sim, "c_turn", cfg.sim.c_turn);
  read_field(sim, "fall_split", cfg.sim.fall_split);
}

AppConfig config_from_json(const Json& root) {
  AppConfig cfg;
  reject_unknown_keys(root, {"ga", "limits", "sim", "backend"}, "config");

  if (root.contains("ga")) parse_ga_section(root.at("ga"), cfg);
  if (root.contains("limits")) parse_limits_section(root.at("limits"), cfg);
  if (root.contains("sim")) parse_sim_section(root.at("sim"), cfg);
  if (root.contains("backend")) {
    const Json& backend = root.at("backend");
    if (!backend.is_object()) throw ConfigError("section 'backend' must be an object");
    reject_unknown_keys(backend, {"name", "port", "baud", "timeout_s"},
                        "section 'backend'");
    read_field(backend, "name", cfg.backend);
    read_field(backend, "port", cfg.serial.port);
    read_field(backend, "baud", cfg.serial.baud);
    read_field(backend, "timeout_s", cfg.serial.timeout_s);
  }

  validate_config(cfg);
  return cfg;
}

// Log line 1 carries the same ga/limits/sim sections but only the backend name.
AppConfig header_from_json(const Json& root) {
  AppConfig cfg;
  reject_unknown_keys(root, {"ga", "limits", "sim", "backend"}, "log header");
  if (root.contains("ga")) parse_ga_section(root.at("ga"), cfg);
  if (root.contains("limits")) parse_limits_section(root.at("limits"), cfg);
  if (root.contains("sim")) parse_sim_section(root.at("sim"), cfg);
  read_field(root, "backend", cfg.backend);
  validate_config(cfg);
  return cfg;
}

// --- run log ----------------------------------------------------------------

Json config_line(const RunLog& log) {
  Json ga = Json::object();
  ga["capacity"] = log.config.capacity;
  ga["p_mut"] = log.config.p_mut;
  ga["p_cat"] = log.config.p_cat;
  ga["cat_count"] = log.config.cat_count;
  ga["max_child_retries"] = log.config.max_child_retries;
  ga["n_iterations"] = log.config.n_iterations;
  ga["seed"] = log.config.seed;

  Json limits = Json::object();
  limits["delay_threshold"] = log.config.limits.delay_threshold;
  limits["forbid_opposite_pairs"] = log.config.limits.forbid_opposite_pairs;

  Json sim = Json::object();
  sim["slew_rate"] = log.sim.slew_rate;
  sim["c_power"] = log.sim.c_power;
  sim["c_slip"] = log.sim.c_slip;
  sim["c_turn"] = log.sim.c_turn;
  sim["fall_split"] = log.sim.fall_split;

  Json line = Json::object();
  line["ga"] = std::move(ga);
  line["limits"] = std::move(limits);
  line["sim"] = std::move(sim);
  line["backend"] = log.backend;
  return line;
}

Json individual_line(const Individual& ind) {
  Json line = Json::object();
  line["id"] = ind.id;
  line["genome"] = format_genome(ind.genome);
  line["fitness"] = ind.fitness;
  line["fell"] = ind.fell;
  line["born_iteration"] = ind.born_iteration;
  return line;
}

Json record_line(const IterationRecord& rec) {
  Json line = Json::object();
  line["iteration"] = rec.iteration;
  line["catastrophe_removed"] = rec.catastrophe_removed;
  if (rec.child_id) line["child_id"] = *rec.child_id;
  if (rec.child_genome) line["child_genome"] = format_genome(*rec.child_genome);
  if (rec.child_fitness) line["child_fitness"] = *rec.child_fitness;
  line["accepted"] = rec.accepted;
  if (rec.replaced_id) line["replaced_id"] = *rec.replaced_id;
  line["best_cm"] = rec.best_cm;
  line["mean_cm"] = rec.mean_cm;
  line["population_size"] = rec.population_size;
  return line;
}

Json parse_record_json(const std::string& text, int line_no) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedRecord(line_no, "not a JSON object");
  }
  return j;
}

template <typename T>
T require_field(const Json& obj, const char* key, int line_no) {
  if (!obj.contains(key)) {
    throw MalformedRecord(line_no, std::string("missing key '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw MalformedRecord(line_no, std::string("bad value for '") + key + "'");
  }
}

Genome genome_field(const Json& obj, const char* key, int line_no) {
  const std::string text = require_field<std::string>(obj, key, line_no);
  try {
    return parse_genome(text);
  } catch (const ParseError& e) {
    throw MalformedRecord(line_no, std::string("bad genome: ") + e.what());
  }
}

Individual parse_individual(const std::string& text, int line_no) {
  const Json j = parse_record_json(text, line_no);
  try {
    reject_unknown_keys(j, {"id", "genome", "fitness", "fell", "born_iteration"},
                        "individual record");
  } catch (const ConfigError& e) {
    throw MalformedRecord(line_no, e.what());
  }
  Individual ind;
  ind.id = require_field<std::uint64_t>(j, "id", line_no);
  ind.genome = genome_field(j, "genome", line_no);
  ind.fitness = require_field<double>(j, "fitness", line_no);
  ind.fell = require_field<bool>(j, "fell", line_no);
  ind.born_iteration = require_field<int>(j, "born_iteration", line_no);
  return ind;
}

IterationRecord parse_record(const std::string& text, int line_no) {
  const Json j = parse_record_json(text, line_no);
  try {
    reject_unknown_keys(j,
                        {"iteration", "catastrophe_removed", "child_id",
                         "child_genome", "child_fitness", "accepted", "replaced_id",
                         "best_cm", "mean_cm", "population_size"},
                        "iteration record");
  } catch (const ConfigError& e) {
    throw MalformedRecord(line_no, e.what());
  }
  IterationRecord rec;
  rec.iteration = require_field<int>(j, "iteration", line_no);
  rec.catastrophe_removed =
      require_field<std::vector<std::uint64_t>>(j, "catastrophe_removed", line_no);
  if (j.contains("child_id")) {
    rec.child_id = require_field<std::uint64_t>(j, "child_id", line_no);
  }
  if (j.contains("child_genome")) {
    rec.child_genome = genome_field(j, "child_genome", line_no);
  }
  if (j.contains("child_fitness")) {
    rec.child_fitness = require_field<double>(j, "child_fitness", line_no);
  }
  rec.accepted = require_field<bool>(j, "accepted", line_no);
  if (j.contains("replaced_id")) {
    rec.replaced_id = require_field<std::uint64_t>(j, "replaced_id", line_no);
  }
  rec.best_cm = require_field<double>(j, "best_cm", line_no);
  rec.mean_cm = require_field<double>(j, "mean_cm", line_no);
  rec.population_size = require_field<int>(j, "population_size", line_no);
  if (rec.accepted && (!rec.child_genome || !rec.child_fitness)) {
    throw MalformedRecord(line_no, "accepted record without a child");
  }
  return rec;
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
  Json root = Json::parse(json_text, nullptr, false);
  if (root.is_discarded() || !root.is_object()) {
    throw ConfigError("config is not a JSON object");
  }
  return config_from_json(root);
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_log(const RunLog& log) {
  std::string out = config_line(log).dump();
  out.push_back('\n');
  for (const Individual& ind : log.initial_population) {
    out += individual_line(ind).dump();
    out.push_back('\n');
  }
  for (const IterationRecord& rec : log.records) {
    out += record_line(rec).dump();
    out.push_back('\n');
  }
  return out;
}

RunLog parse_log(const std::string& text) {
  std::vector<std::string> lines;
  std::string::size_type pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(pos));  // unterminated final line
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty()) throw MalformedRecord(1, "empty log");

  const Json header = parse_record_json(lines[0], 1);
  if (!header.contains("backend") || !header.at("backend").is_string()) {
    throw MalformedRecord(1, "missing backend name");
  }
  AppConfig cfg;
  try {
    cfg = header_from_json(header);
  } catch (const ConfigError& e) {
    throw MalformedRecord(1, e.what());
  }

  RunLog log;
  log.config = cfg.ga;
  log.sim = cfg.sim;
  log.backend = cfg.backend;

  const int present = static_cast<int>(lines.size());
  int line_no = 2;
  const auto next_line = [&]() -> const std::string& {
    if (line_no > present) throw MalformedRecord(line_no, "truncated log");
    return lines[static_cast<std::size_t>(line_no - 1)];
  };
  for (int i = 0; i < log.config.capacity; ++i, ++line_no) {
    log.initial_population.push_back(parse_individual(next_line(), line_no));
  }
  for (int i = 0; i < log.config.n_iterations; ++i, ++line_no) {
    log.records.push_back(parse_record(next_line(), line_no));
  }
  for (; line_no <= present; ++line_no) {
    if (!lines[line_no - 1].empty()) {
      throw MalformedRecord(line_no, "trailing data after the last record");
    }
  }
  return log;
}

void save_log(const RunLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << dump_log(log);
  if (!out) throw IoFailure("write to '" + path + "' failed");
}

RunLog load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open log '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_log(text.str());
}

std::string format_cm(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string report_csv(const RunLog& log) {
  std::string csv = "iteration,best_cm,mean_cm,population_size\n";
  double best = 0, sum = 0;
  bool first = true;
  for (const Individual& ind : log.initial_population) {
    if (first || ind.fitness > best) best = ind.fitness;
    first = false;
    sum += ind.fitness;
  }
  const auto row = [&csv](int iteration, double best_cm, double mean_cm, int size) {
    csv += std::to_string(iteration);
    csv.push_back(',');
    csv += format_cm(best_cm);
    csv.push_back(',');
    csv += format_cm(mean_cm);
    csv.push_back(',');
    csv += std::to_string(size);
    csv.push_back('\n');
  };
  const int n0 = static_cast<int>(log.initial_population.size());
  row(0, best, n0 > 0 ? sum / n0 : 0.0, n0);
  for (const IterationRecord& rec : log.records) {
    row(rec.iteration, rec.best_cm, rec.mean_cm, rec.population_size);
  }
  return csv;
}

}  // namespace gaitevo
