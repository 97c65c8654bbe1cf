// Acceptance suite: exercises every release criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code is the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "fixtures.hpp"
#include "gaitevo/errors.hpp"
#include "gaitevo/fitness.hpp"
#include "gaitevo/ga.hpp"
#include "gaitevo/genome.hpp"
#include "gaitevo/serial.hpp"
#include "gaitevo/sim.hpp"
#include "gaitevo/store.hpp"
#include "sim_reference.hpp"
#include "statutil.hpp"

namespace fs = std::filesystem;
using namespace gaitevo;

namespace {

struct Context {
  std::vector<std::string> failures;
  std::string detail;  // shown on the PASS line, e.g. measured medians

  void expect(bool ok, const std::string& message) {
    if (!ok) failures.push_back(message);
  }
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "gaitevo-acceptance";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// --- criterion 1: exact paper-value gates -----------------------------------

void criterion_paper_values(Context& ctx) {
  ctx.expect(to_fitness({12.0, true}) == -9.0, "fall penalty is not exactly -9");
  ctx.expect(to_fitness({-3.7, true}) == -9.0, "fall penalty depends on displacement");
  ctx.expect(to_fitness({8.0, false}) == 8.0, "plain displacement must pass through");
  ctx.expect(kFallPenalty == -9.0, "penalty constant drifted");

  ctx.expect(kGenomeLength == 15, "genomes must be exactly 15 genes");
  bool wrong_length_rejected = false;
  try {
    parse_genome("D50 B0");
  } catch (const ParseError& e) {
    wrong_length_rejected = e.kind == ParseError::Kind::WrongTokenCount;
  }
  ctx.expect(wrong_length_rejected, "short genome text must be rejected");

  SimEvaluator eval;
  GaConfig cfg;
  cfg.seed = 1;
  cfg.n_iterations = 0;
  ctx.expect(cfg.capacity == 5, "default capacity must be 5");
  ctx.expect(evolve(cfg, eval).initial_population.size() == 5,
             "initial population must hold 5 individuals");

  const auto accepts = [](const std::string& text) {
    try {
      parse_genome(text);
      return true;
    } catch (const ParseError&) {
      return false;
    }
  };
  ctx.expect(accepts(fixtures::pad15("D0")) && accepts(fixtures::pad15("D1000")),
             "delay range endpoints must parse");
  ctx.expect(!accepts(fixtures::pad15("D-1")) && !accepts(fixtures::pad15("D1001")),
             "delays outside [0, 1000] must be rejected");
  ctx.expect(accepts(fixtures::pad15("B-90 F90")) && accepts(fixtures::pad15("F-90 B90")),
             "angle range endpoints must parse");
  ctx.expect(!accepts(fixtures::pad15("B-91")) && !accepts(fixtures::pad15("F91")),
             "angles outside [-90, 90] must be rejected");
  ctx.expect(!accepts(fixtures::pad15("E1")), "End genes must carry value 0");
}

// --- criterion 2: convergence of the default configuration ------------------

void criterion_convergence(Context& ctx) {
  SimEvaluator eval;
  std::vector<double> initial_best;
  std::vector<double> final_best;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GaConfig cfg;  // defaults: capacity 5, p_mut 0.05, p_cat 0.1, 20 iterations
    cfg.seed = seed;
    const RunLog log = evolve(cfg, eval, eval.config());
    double best0 = log.initial_population.front().fitness;
    for (const Individual& ind : log.initial_population) {
      best0 = std::max(best0, ind.fitness);
    }
    initial_best.push_back(best0);
    final_best.push_back(log.records.back().best_cm);
  }
  const double med_final = median(final_best);
  const double med_initial = median(initial_best);
  ctx.detail = fmt("median final %.2f cm, median initial %.2f cm", med_final, med_initial);
  ctx.expect(med_final >= 4.0,
             fmt("median best after 20 iterations is %.3f cm, need >= 4.0", med_final));
  ctx.expect(med_final >= 2.0 * med_initial,
             fmt("median final %.3f cm is not 2x the initial median %.3f cm", med_final,
                 med_initial));
}

// --- criterion 3: elitism without catastrophes ------------------------------

void criterion_elitism(Context& ctx) {
  SimEvaluator eval;
  int violations = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    GaConfig cfg;
    cfg.seed = seed;
    cfg.p_cat = 0.0;
    const RunLog log = evolve(cfg, eval, eval.config());
    const std::string csv = report_csv(log);

    // walk the best_cm column of the rendered CSV itself
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    double previous = -1e300;
    bool ok = true;
    while (std::getline(lines, line)) {
      const std::size_t a = line.find(',');
      const std::size_t b = line.find(',', a + 1);
      const double best = std::strtod(line.substr(a + 1, b - a - 1).c_str(), nullptr);
      if (best < previous) ok = false;
      previous = best;
    }
    if (!ok) ++violations;
  }
  ctx.expect(violations == 0,
             "best_cm decreased in " + std::to_string(violations) + " of 1000 seeds");
}

// --- criterion 4: byte-identical CLI runs ------------------------------------

void criterion_determinism(Context& ctx) {
  const fs::path dir = scratch_dir();
  const fs::path log_a = dir / "det_a.log";
  const fs::path log_b = dir / "det_b.log";
  const std::string base = std::string(GAITEVO_CLI_PATH) +
                           " evolve --backend sim --seed 4242 --iterations 20 --out ";
  const int rc_a = std::system((base + log_a.string() + " >/dev/null").c_str());
  const int rc_b = std::system((base + log_b.string() + " >/dev/null").c_str());
  ctx.expect(WIFEXITED(rc_a) && WEXITSTATUS(rc_a) == 0, "first evolve run failed");
  ctx.expect(WIFEXITED(rc_b) && WEXITSTATUS(rc_b) == 0, "second evolve run failed");
  const std::string bytes_a = slurp(log_a);
  ctx.expect(!bytes_a.empty(), "first run produced an empty log");
  ctx.expect(bytes_a == slurp(log_b), "two seeded runs differ byte for byte");

  const RunLog log = load_log(log_a.string());
  ctx.expect(dump_log(log) == bytes_a, "reserializing the loaded log changed bytes");
}

// --- criterion 5: DSL round trip ---------------------------------------------

void criterion_round_trip(Context& ctx) {
  Rng rng(90210);
  for (int i = 0; i < 1000; ++i) {
    const Genome g = random_genome(rng);
    const std::string text = format_genome(g);
    if (!(parse_genome(text) == g)) {
      ctx.expect(false, "parse(format(g)) != g for " + text);
      return;
    }
    if (format_genome(parse_genome(text)) != text) {
      ctx.expect(false, "format(parse(t)) != t for " + text);
      return;
    }
  }
  const Genome ref = parse_genome(fixtures::kReferenceGait);
  ctx.expect(validate(ref).ok(), "published example genome must validate cleanly");
  ctx.expect(format_genome(ref) == fixtures::kReferenceGait,
             "published example genome must round-trip");
}

// --- criterion 6: existence-condition filter ---------------------------------

void criterion_existence_filter(Context& ctx) {
  const auto only_violation = [](const ValidationReport& r, int index,
                                 ViolationKind kind) {
    return r.violations.size() == 1 && r.violations[0].gene_index == index &&
           r.violations[0].kind == kind;
  };

  ctx.expect(only_violation(validate(parse_genome(fixtures::pad15("F30 F-30"))), 0,
                            ViolationKind::OppositePair),
             "adjacent F30 F-30 must be rejected as OppositePair");
  ctx.expect(only_violation(validate(parse_genome(fixtures::pad15("B-45 B45"))), 0,
                            ViolationKind::OppositePair),
             "adjacent B-45 B45 must be rejected as OppositePair");
  ctx.expect(only_violation(validate(parse_genome(fixtures::pad15("D1000"))), 0,
                            ViolationKind::DelayTooLong),
             "a delay at the threshold must be rejected as DelayTooLong");

  std::vector<Gene> fourteen(14, Gene{Opcode::Delay, 0});
  fourteen.back() = Gene{Opcode::End, 0};
  ValidationReport r = validate(std::span<const Gene>(fourteen.data(), fourteen.size()));
  bool has_wrong_length = false;
  for (const Violation& v : r.violations) {
    has_wrong_length |= v.kind == ViolationKind::WrongLength;
  }
  ctx.expect(has_wrong_length, "a 14-gene child must be rejected as WrongLength");

  std::vector<Gene> sixteen(16, Gene{Opcode::Delay, 0});
  sixteen.back() = Gene{Opcode::End, 0};
  r = validate(std::span<const Gene>(sixteen.data(), sixteen.size()));
  has_wrong_length = false;
  for (const Violation& v : r.violations) {
    has_wrong_length |= v.kind == ViolationKind::WrongLength;
  }
  ctx.expect(has_wrong_length, "a 16-gene child must be rejected as WrongLength");

  ctx.expect(validate(parse_genome(fixtures::kReferenceGait)).ok(),
             "published example genome must pass the filter");
}

// --- criterion 7: operator statistics ----------------------------------------

void criterion_operator_statistics(Context& ctx) {
  // Mutation replacement count vs Binomial(14, p_eff). A redraw can reproduce
  // the original gene, so the observable flip rate is p * (1 - 1/3003) on the
  // all-D0 base genome (1/3 opcode chance, 1/1001 value chance).
  {
    const Genome base = parse_genome(fixtures::kAllZeroDelay);
    const double p = 0.05;
    const double p_eff = p * (1.0 - 1.0 / 3003.0);
    const int trials = 10000;
    Rng rng(20240531);
    std::vector<double> observed(15, 0.0);
    for (int t = 0; t < trials; ++t) {
      const Genome mutant = mutate(base, rng, p);
      int replaced = 0;
      for (int i = 0; i + 1 < kGenomeLength; ++i) {
        if (mutant.genes[i] != base.genes[i]) ++replaced;
      }
      observed[static_cast<std::size_t>(replaced)] += 1;
    }
    const std::vector<double> pmf = testutil::binomial_pmf(14, p_eff);
    // buckets 0,1,2,3 and >=4 keep every expected count comfortably large
    std::vector<double> obs(5, 0.0), exp(5, 0.0);
    for (int k = 0; k <= 14; ++k) {
      const std::size_t bucket = static_cast<std::size_t>(std::min(k, 4));
      obs[bucket] += observed[static_cast<std::size_t>(k)];
      exp[bucket] += pmf[static_cast<std::size_t>(k)] * trials;
    }
    const double stat = testutil::chi_square(obs, exp);
    ctx.expect(stat < testutil::chi2_crit_p001(4),
               fmt("mutation count chi-square %.2f exceeds the p=0.001 bound %.2f", stat,
                   testutil::chi2_crit_p001(4)));
  }

  // Catastrophe removal must be uniform over members: each of 5 members
  // should be removed with frequency 2/5 over 10,000 trials.
  {
    const int trials = 10000;
    Rng rng(887766);
    std::vector<double> removed_count(5, 0.0);
    for (int t = 0; t < trials; ++t) {
      Population pop;
      pop.capacity = 5;
      for (std::uint64_t id = 1; id <= 5; ++id) {
        Individual ind;
        ind.id = id;
        ind.fitness = static_cast<double>(id);  // fitness must not matter
        pop.members.push_back(ind);
      }
      for (const std::uint64_t id : catastrophe(pop, rng, 2)) {
        removed_count[static_cast<std::size_t>(id - 1)] += 1;
      }
    }
    const std::vector<double> expected(5, trials * 2.0 / 5.0);
    const double stat = testutil::chi_square(removed_count, expected);
    ctx.expect(stat < testutil::chi2_crit_p001(4),
               fmt("catastrophe chi-square %.2f exceeds the p=0.001 bound %.2f", stat,
                   testutil::chi2_crit_p001(4)));
  }
}

// --- criterion 8: simulator oracle equivalence --------------------------------

void criterion_sim_oracle(Context& ctx) {
  constexpr double kTol = 1e-9;
  // the derived example arithmetic uses the reference coefficient set
  SimConfig straight = fixtures::reference_coefficients();
  straight.c_turn = 0.0;
  simref::RefConfig ref_straight = simref::derivation_coefficients();
  ref_straight.c_turn = 0.0;

  struct Case {
    const char* text;
    double expected_cm;
  };
  const Case cases[] = {
      {"F-60 D200 E0", 1.20},
      {"F-60 D200 F0 D200 E0", 0.72},
      {"F-60 D50 E0", 0.60},
  };
  for (const Case& c : cases) {
    const std::string text = fixtures::pad15(c.text);
    const SimOutcome out = execute(parse_genome(text), straight);
    const simref::RefResult ref = simref::run_text(text, ref_straight);
    ctx.expect(std::abs(out.displacement_cm - c.expected_cm) < kTol,
               fmt("derived example off: got %.12f, want %.2f", out.displacement_cm,
                   c.expected_cm));
    ctx.expect(std::abs(out.displacement_cm - ref.x) < kTol,
               "implementation and oracle disagree on a derived example");
  }

  // the (|80 - (-80)| = 160)-degree scissor falls under the reference
  // threshold and under the shipped one
  const SimOutcome fall = execute(parse_genome(fixtures::pad15("F80 B-80 D500")),
                                  fixtures::reference_coefficients());
  ctx.expect(fall.fell && to_fitness({fall.displacement_cm, fall.fell}) == -9.0,
             "scissor split must fall and map to -9");
  ctx.expect(execute(parse_genome(fixtures::pad15("F80 B-80 D500"))).fell,
             "scissor split must fall under the shipped defaults too");

  const SimOutcome pinned =
      execute(parse_genome(fixtures::kReferenceGait), fixtures::reference_coefficients());
  ctx.expect(std::abs(pinned.displacement_cm - 0.04000418218026535) < kTol,
             "pinned outcome of the reference gait drifted");

  SimConfig shipped_straight;
  shipped_straight.c_turn = 0.0;
  Rng rng(31337);
  for (int i = 0; i < 1000; ++i) {
    const Genome g = random_genome(rng);
    const std::string text = format_genome(g);

    const SimOutcome out = execute(g);
    const simref::RefResult ref = simref::run_text(text);
    if (std::abs(out.displacement_cm - ref.x) >= kTol || out.fell != ref.fell ||
        out.duration_ms != ref.duration_ms ||
        std::abs(out.deviation_deg - std::fabs(ref.heading)) >= kTol) {
      ctx.expect(false, "oracle mismatch on random genome " + text);
      return;
    }

    Genome swapped = g;
    for (Gene& gene : swapped.genes) {
      if (gene.opcode == Opcode::Front) {
        gene.opcode = Opcode::Back;
      } else if (gene.opcode == Opcode::Back) {
        gene.opcode = Opcode::Front;
      }
    }
    const SimOutcome mirror = execute(swapped);
    if (std::abs(out.displacement_cm - mirror.displacement_cm) >= kTol ||
        std::abs(out.deviation_deg - mirror.deviation_deg) >= kTol ||
        out.fell != mirror.fell) {
      ctx.expect(false, "front-back swap symmetry broke on " + text);
      return;
    }

    const std::vector<WalkerState> path = trace(g, shipped_straight);
    if (std::abs(path.back().y) >= kTol || std::abs(path.back().heading) >= kTol) {
      ctx.expect(false, "zero-turn run left the axis on " + text);
      return;
    }
  }
}

// --- criterion 9: serial protocol conformance ---------------------------------

void criterion_serial(Context& ctx) {
  const std::string mock = MOCK_DEVICE_PATH;
  const Genome g = parse_genome(fixtures::kReferenceGait);
  const auto settings = [&mock](const std::string& flags, double timeout) {
    SerialSettings s;
    s.port = "exec:" + mock + (flags.empty() ? "" : " " + flags);
    s.timeout_s = timeout;
    return s;
  };

  try {
    SerialEvaluator eval(settings("", 5.0));
    ctx.expect(eval.evaluate(g) == Evaluation{3.5, false}, "OK/DIST path broken");
  } catch (const Error& e) {
    ctx.expect(false, std::string("OK/DIST path threw: ") + e.what());
  }

  try {
    SerialEvaluator eval(settings("--go fall", 5.0));
    ctx.expect(eval.evaluate(g) == Evaluation{0.0, true}, "OK/FALL path broken");
  } catch (const Error& e) {
    ctx.expect(false, std::string("OK/FALL path threw: ") + e.what());
  }

  {
    bool nacked = false;
    try {
      SerialEvaluator eval(settings("--nack 2", 5.0));
      eval.evaluate(g);
    } catch (const DeviceNack& e) {
      nacked = e.code == 2;
    } catch (const Error&) {
    }
    ctx.expect(nacked, "ERR reply must raise DeviceNack with its code");
  }

  {
    bool protocol_error = false;
    try {
      SerialEvaluator eval(settings("--go garbage", 5.0));
      eval.evaluate(g);
    } catch (const ProtocolError&) {
      protocol_error = true;
    } catch (const Error&) {
    }
    ctx.expect(protocol_error, "garbage reply must raise ProtocolError");
  }

  {
    bool timed_out = false;
    try {
      SerialEvaluator eval(settings("--go silent", 0.2));
      eval.evaluate(g);
    } catch (const Timeout&) {
      timed_out = true;
    } catch (const Error&) {
    }
    ctx.expect(timed_out, "silent device must raise Timeout");
  }

  {
    bool timed_out = false;
    try {
      SerialEvaluator eval(settings("--pong silent", 0.2));
    } catch (const Timeout&) {
      timed_out = true;
    } catch (const Error&) {
    }
    ctx.expect(timed_out, "silent handshake must raise Timeout");
  }

  {
    bool protocol_error = false;
    try {
      SerialEvaluator eval(settings("--pong garbage", 5.0));
    } catch (const ProtocolError&) {
      protocol_error = true;
    } catch (const Error&) {
    }
    ctx.expect(protocol_error, "bad handshake reply must raise ProtocolError");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* title;
    std::function<void(Context&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "paper-value gates", criterion_paper_values},
      {2, "default-config convergence", criterion_convergence},
      {3, "elitism without catastrophes", criterion_elitism},
      {4, "seeded runs are byte-identical", criterion_determinism},
      {5, "genome text round trip", criterion_round_trip},
      {6, "existence-condition filter", criterion_existence_filter},
      {7, "operator statistics", criterion_operator_statistics},
      {8, "simulator oracle equivalence", criterion_sim_oracle},
      {9, "serial protocol conformance", criterion_serial},
  };

  int failed = 0;
  for (const Criterion& criterion : criteria) {
    Context ctx;
    try {
      criterion.run(ctx);
    } catch (const std::exception& e) {
      ctx.expect(false, std::string("unexpected exception: ") + e.what());
    }
    const bool ok = ctx.failures.empty();
    const std::string suffix = ctx.detail.empty() ? "" : " [" + ctx.detail + "]";
    std::printf("criterion %d (%s): %s%s\n", criterion.number, criterion.title,
                ok ? "PASS" : "FAIL", suffix.c_str());
    for (const std::string& message : ctx.failures) {
      std::printf("    - %s\n", message.c_str());
    }
    if (!ok) ++failed;
  }
  std::printf("%d/9 criteria passed\n", 9 - failed);
  return failed;
}
