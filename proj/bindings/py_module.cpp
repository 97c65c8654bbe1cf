#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <utility>

#include "gaitevo/errors.hpp"
#include "gaitevo/fitness.hpp"
#include "gaitevo/ga.hpp"
#include "gaitevo/genome.hpp"
#include "gaitevo/serial.hpp"
#include "gaitevo/sim.hpp"
#include "gaitevo/store.hpp"

namespace py = pybind11;
using namespace gaitevo;

namespace {

// Adapts a Python callable (genome text -> displacement or (displacement,
// fell)) to the evaluator interface, so experiments can plug in their own
// fitness measurements from Python.
class CallbackEvaluator final : public Evaluator {
 public:
  explicit CallbackEvaluator(py::function fn) : fn_(std::move(fn)) {}

  std::string name() const override { return "callback"; }

  Evaluation evaluate(const Genome& g) override {
    const py::object result = fn_(format_genome(g));
    if (py::isinstance<py::tuple>(result)) {
      const auto t = result.cast<std::pair<double, bool>>();
      return Evaluation{t.first, t.second};
    }
    return Evaluation{result.cast<double>(), false};
  }

 private:
  py::function fn_;
};

std::string opcode_str(Opcode op) { return std::string(1, static_cast<char>(op)); }

Opcode opcode_from_str(const std::string& s) {
  if (s.size() != 1) throw std::invalid_argument("opcode must be a single letter");
  return static_cast<Opcode>(s[0]);
}

Genome genome_from_genes(const std::vector<Gene>& genes) {
  if (static_cast<int>(genes.size()) != kGenomeLength) {
    throw std::invalid_argument("a genome holds exactly 15 genes");
  }
  Genome g;
  std::copy(genes.begin(), genes.end(), g.genes.begin());
  return g;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Evolutionary gait optimization for a two-servo walker";

  const py::object base =
      py::register_exception<Error>(m, "GaitevoError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidGenome>(m, "InvalidGenomeError", base.ptr());
  py::register_exception<PopulationTooSmall>(m, "PopulationTooSmallError", base.ptr());
  py::register_exception<EvaluatorFailure>(m, "EvaluatorFailureError", base.ptr());
  py::register_exception<ConsoleClosed>(m, "ConsoleClosedError", base.ptr());
  const py::object serial_base =
      py::register_exception<SerialError>(m, "SerialError", base.ptr());
  py::register_exception<Timeout>(m, "TimeoutError", serial_base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", serial_base.ptr());
  py::register_exception<DeviceNack>(m, "DeviceNackError", serial_base.ptr());
  py::register_exception<PortError>(m, "PortError", serial_base.ptr());
  py::register_exception<IoFailure>(m, "IoFailureError", base.ptr());
  py::register_exception<MalformedRecord>(m, "MalformedRecordError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.attr("GENOME_LENGTH") = kGenomeLength;
  m.attr("FALL_PENALTY") = kFallPenalty;

  py::class_<Rng>(m, "Rng", "Deterministic seeded generator; every draw is integer-based")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform_int", &Rng::uniform_int, py::arg("lo"), py::arg("hi"))
      .def("uniform01", &Rng::uniform01)
      .def("bernoulli", &Rng::bernoulli, py::arg("p"));

  py::class_<Gene>(m, "Gene")
      .def(py::init([](const std::string& opcode, int value) {
             return Gene{opcode_from_str(opcode), value};
           }),
           py::arg("opcode"), py::arg("value"))
      .def_property(
          "opcode", [](const Gene& g) { return opcode_str(g.opcode); },
          [](Gene& g, const std::string& s) { g.opcode = opcode_from_str(s); })
      .def_readwrite("value", &Gene::value)
      .def(py::self == py::self)
      .def("__repr__", [](const Gene& g) {
        return "Gene('" + opcode_str(g.opcode) + "', " + std::to_string(g.value) + ")";
      });

  py::class_<Genome>(m, "Genome")
      .def(py::init([](const std::string& text) { return parse_genome(text); }),
           py::arg("text"))
      .def(py::init(&genome_from_genes), py::arg("genes"))
      .def_property_readonly("genes",
                             [](const Genome& g) {
                               return std::vector<Gene>(g.genes.begin(), g.genes.end());
                             })
      .def("effective_length", &Genome::effective_length)
      .def("__str__", [](const Genome& g) { return format_genome(g); })
      .def("__repr__",
           [](const Genome& g) { return "Genome('" + format_genome(g) + "')"; })
      .def(py::self == py::self);

  py::class_<ValidationLimits>(m, "ValidationLimits")
      .def(py::init<>())
      .def(py::init([](int delay_threshold, bool forbid_opposite_pairs) {
             return ValidationLimits{delay_threshold, forbid_opposite_pairs};
           }),
           py::arg("delay_threshold") = 1000, py::arg("forbid_opposite_pairs") = true)
      .def_readwrite("delay_threshold", &ValidationLimits::delay_threshold)
      .def_readwrite("forbid_opposite_pairs", &ValidationLimits::forbid_opposite_pairs);

  py::class_<Violation>(m, "Violation")
      .def_readonly("gene_index", &Violation::gene_index)
      .def_property_readonly(
          "kind", [](const Violation& v) { return std::string(to_string(v.kind)); })
      .def("__repr__", [](const Violation& v) {
        return "Violation(" + std::to_string(v.gene_index) + ", " +
               std::string(to_string(v.kind)) + ")";
      });

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("violations", &ValidationReport::violations)
      .def("ok", &ValidationReport::ok)
      .def("__bool__", &ValidationReport::ok);

  m.def("parse_genome", &parse_genome, py::arg("text"));
  m.def("format_genome", &format_genome, py::arg("genome"));
  m.def("random_genome", &random_genome, py::arg("rng"),
        py::arg("limits") = ValidationLimits{});
  m.def("validate",
        py::overload_cast<const Genome&, const ValidationLimits&>(&validate),
        py::arg("genome"), py::arg("limits") = ValidationLimits{});

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("slew_rate", &SimConfig::slew_rate)
      .def_readwrite("c_power", &SimConfig::c_power)
      .def_readwrite("c_slip", &SimConfig::c_slip)
      .def_readwrite("c_turn", &SimConfig::c_turn)
      .def_readwrite("fall_split", &SimConfig::fall_split)
      .def(py::self == py::self);

  py::class_<WalkerState>(m, "WalkerState")
      .def_readonly("t", &WalkerState::t)
      .def_readonly("theta_front", &WalkerState::theta_front)
      .def_readonly("theta_back", &WalkerState::theta_back)
      .def_readonly("target_front", &WalkerState::target_front)
      .def_readonly("target_back", &WalkerState::target_back)
      .def_readonly("x", &WalkerState::x)
      .def_readonly("y", &WalkerState::y)
      .def_readonly("heading", &WalkerState::heading);

  py::class_<SimOutcome>(m, "SimOutcome")
      .def_readonly("displacement_cm", &SimOutcome::displacement_cm)
      .def_readonly("deviation_deg", &SimOutcome::deviation_deg)
      .def_readonly("fell", &SimOutcome::fell)
      .def_readonly("duration_ms", &SimOutcome::duration_ms)
      .def("__repr__", [](const SimOutcome& o) {
        return "SimOutcome(displacement_cm=" + std::to_string(o.displacement_cm) +
               ", deviation_deg=" + std::to_string(o.deviation_deg) +
               ", fell=" + (o.fell ? std::string("True") : std::string("False")) +
               ", duration_ms=" + std::to_string(o.duration_ms) + ")";
      });

  m.def("execute", &execute, py::arg("genome"), py::arg("config") = SimConfig{});
  m.def("trace", &trace, py::arg("genome"), py::arg("config") = SimConfig{});

  py::class_<Evaluation>(m, "Evaluation")
      .def(py::init([](double cm, bool fell) { return Evaluation{cm, fell}; }),
           py::arg("displacement_cm") = 0.0, py::arg("fell") = false)
      .def_readwrite("displacement_cm", &Evaluation::displacement_cm)
      .def_readwrite("fell", &Evaluation::fell)
      .def(py::self == py::self);

  m.def("to_fitness", &to_fitness, py::arg("evaluation"));

  py::class_<GaConfig>(m, "GaConfig")
      .def(py::init<>())
      .def_readwrite("capacity", &GaConfig::capacity)
      .def_readwrite("p_mut", &GaConfig::p_mut)
      .def_readwrite("p_cat", &GaConfig::p_cat)
      .def_readwrite("cat_count", &GaConfig::cat_count)
      .def_readwrite("limits", &GaConfig::limits)
      .def_readwrite("max_child_retries", &GaConfig::max_child_retries)
      .def_readwrite("n_iterations", &GaConfig::n_iterations)
      .def_readwrite("seed", &GaConfig::seed);

  py::class_<Individual>(m, "Individual")
      .def_readonly("id", &Individual::id)
      .def_readonly("genome", &Individual::genome)
      .def_readonly("fitness", &Individual::fitness)
      .def_readonly("fell", &Individual::fell)
      .def_readonly("born_iteration", &Individual::born_iteration)
      .def(py::self == py::self);

  py::class_<Population>(m, "Population")
      .def(py::init<>())
      .def_readwrite("members", &Population::members)
      .def_readwrite("capacity", &Population::capacity)
      .def("size", &Population::size);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("catastrophe_removed", &IterationRecord::catastrophe_removed)
      .def_readonly("child_id", &IterationRecord::child_id)
      .def_readonly("child_genome", &IterationRecord::child_genome)
      .def_readonly("child_fitness", &IterationRecord::child_fitness)
      .def_readonly("accepted", &IterationRecord::accepted)
      .def_readonly("replaced_id", &IterationRecord::replaced_id)
      .def_readonly("best_cm", &IterationRecord::best_cm)
      .def_readonly("mean_cm", &IterationRecord::mean_cm)
      .def_readonly("population_size", &IterationRecord::population_size);

  py::class_<RunLog>(m, "RunLog")
      .def_readonly("config", &RunLog::config)
      .def_readonly("sim", &RunLog::sim)
      .def_readonly("backend", &RunLog::backend)
      .def_readonly("initial_population", &RunLog::initial_population)
      .def_readonly("records", &RunLog::records)
      .def(py::self == py::self);

  m.def("select_parents", &select_parents, py::arg("population"));
  m.def("crossover", &crossover, py::arg("parent_a"), py::arg("parent_b"),
        py::arg("rng"));
  m.def("mutate", &mutate, py::arg("genome"), py::arg("rng"), py::arg("p_mut"));
  m.def("catastrophe", &catastrophe, py::arg("population"), py::arg("rng"),
        py::arg("cat_count"));
  m.def("final_population", &final_population, py::arg("log"));

  m.def(
      "evolve",
      [](const GaConfig& config, const SimConfig& sim, py::object evaluator) {
        std::unique_ptr<Evaluator> backend;
        if (evaluator.is_none()) {
          backend = std::make_unique<SimEvaluator>(sim);
        } else {
          backend = std::make_unique<CallbackEvaluator>(evaluator.cast<py::function>());
        }
        return evolve(config, *backend, sim);
      },
      py::arg("config"), py::arg("sim") = SimConfig{}, py::arg("evaluator") = py::none(),
      "Runs the genetic algorithm against the simulator, or against a Python\n"
      "callable mapping genome text to a displacement (or (cm, fell) tuple).");

  m.def("dump_log", &dump_log, py::arg("log"));
  m.def("parse_log", &parse_log, py::arg("text"));
  m.def("save_log", &save_log, py::arg("log"), py::arg("path"));
  m.def("load_log", &load_log, py::arg("path"));
  m.def("report_csv", &report_csv, py::arg("log"));
}
