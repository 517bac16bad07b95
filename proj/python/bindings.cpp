#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "transdyn/base_location.hpp"
#include "transdyn/cli.hpp"
#include "transdyn/error.hpp"
#include "transdyn/ingest.hpp"
#include "transdyn/model.hpp"
#include "transdyn/oracle.hpp"
#include "transdyn/pipeline.hpp"
#include "transdyn/synth.hpp"

namespace py = pybind11;
using namespace transdyn;

namespace {

std::int64_t epoch(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_epoch(std::int64_t s) { return Timestamp{Seconds{s}}; }

ModelParams make_params(double beta, std::int64_t pingpong_window, std::optional<std::int64_t> max_dwell_cap,
                        std::optional<std::int64_t> window_start, std::optional<std::int64_t> window_end) {
  ModelParams p;
  p.beta = beta;
  p.pingpong_window = Seconds{pingpong_window};
  p.max_dwell_cap = max_dwell_cap ? Seconds{*max_dwell_cap} : unbounded_dwell;
  if (window_start) p.observation_window.start = from_epoch(*window_start);
  if (window_end) p.observation_window.end = from_epoch(*window_end);
  p.validate();
  return p;
}

EventBatch parse_text(const std::string& text, const std::string& format, double cell_size) {
  ParseOptions options;
  options.format = parse_format(format);
  std::istringstream in(text);
  return canonicalize(parse_events(in, options), cell_size);
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["N"] = s.population.N;
  d["eta"] = s.population.eta;
  d["gamma"] = s.population.gamma;
  d["W"] = s.W;
  d["theta_seconds"] = s.theta_seconds;
  d["beta"] = s.beta;
  d["Q"] = s.Q;
  d["M"] = s.M;
  return d;
}

}  // namespace

PYBIND11_MODULE(_transdyn, m) {
  m.doc() = "Transient population dynamics: ingest, model, discovery and grid comparison";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<OracleSizeError>(m, "OracleSizeError", PyExc_ValueError);

  py::class_<MobilityEvent>(m, "MobilityEvent")
      .def_readonly("person_id", &MobilityEvent::person_id)
      .def_readonly("location_id", &MobilityEvent::location_id)
      .def_readonly("lat", &MobilityEvent::lat)
      .def_readonly("lon", &MobilityEvent::lon)
      .def_property_readonly("timestamp", [](const MobilityEvent& e) { return epoch(e.timestamp); })
      .def_readonly("category", &MobilityEvent::category)
      .def("__repr__", [](const MobilityEvent& e) {
        return "<MobilityEvent " + e.person_id + "@" + e.location_id + " " +
               format_timestamp(e.timestamp) + ">";
      });

  py::class_<EventBatch>(m, "EventBatch")
      .def_readonly("events", &EventBatch::events)
      .def_readonly("source_count", &EventBatch::source_count)
      .def_property_readonly("rejected", [](const EventBatch& b) {
        std::vector<std::pair<std::size_t, std::string>> out;
        for (const auto& r : b.rejected) out.emplace_back(r.line, r.reason);
        return out;
      });

  py::class_<MovementEdge>(m, "MovementEdge")
      .def_readonly("person_id", &MovementEdge::person_id)
      .def_readonly("from_location", &MovementEdge::from_location)
      .def_readonly("to_location", &MovementEdge::to_location)
      .def_property_readonly("depart_ts", [](const MovementEdge& e) { return epoch(e.depart_ts); })
      .def_property_readonly("arrive_ts", [](const MovementEdge& e) { return epoch(e.arrive_ts); });

  py::class_<BaseAssignment>(m, "BaseAssignment")
      .def_readonly("person_id", &BaseAssignment::person_id)
      .def_readonly("base_location", &BaseAssignment::base_location)
      .def_readonly("support", &BaseAssignment::support)
      .def_readonly("confidence", &BaseAssignment::confidence);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("beta") = 1.0, py::arg("pingpong_window") = 900,
           py::arg("max_dwell_cap") = std::optional<std::int64_t>(12 * 3600),
           py::arg("window_start") = py::none(), py::arg("window_end") = py::none(),
           "Durations in seconds; max_dwell_cap=None means uncapped.")
      .def_readonly("beta", &ModelParams::beta)
      .def_property_readonly("pingpong_window",
                             [](const ModelParams& p) { return p.pingpong_window.count(); });

  m.def("parse_events", &parse_text, py::arg("text"), py::arg("format") = "jsonl",
        py::arg("cell_size") = 0.05, "Parse and canonicalize events from a JSONL or CSV string.");
  m.def("cell_token", py::overload_cast<double, double, double>(&cell_token), py::arg("lat"),
        py::arg("lon"), py::arg("cell_size"));

  m.def(
      "infer_bases",
      [](const EventBatch& batch, int night_start, int night_end) {
        return assign_bases(batch, HourWindow{night_start, night_end});
      },
      py::arg("batch"), py::arg("night_start") = 21, py::arg("night_end") = 6);

  m.def(
      "movement_edges",
      [](const EventBatch& batch, std::int64_t pingpong_window) {
        std::vector<MovementEdge> out;
        for (auto person : split_by_person(batch.events)) {
          auto raw = movement_edges(person);
          auto kept = suppress_ping_pong(raw, Seconds{pingpong_window});
          out.insert(out.end(), kept.begin(), kept.end());
        }
        return out;
      },
      py::arg("batch"), py::arg("pingpong_window") = 0,
      "Per-person movement edges after ping-pong suppression (0 keeps all).");

  m.def(
      "run_pipeline",
      [](const EventBatch& batch, const ModelParams& params, double cell_size,
         std::uint64_t min_unique_visitors, std::map<std::string, std::string> bases) {
        PipelineConfig config;
        config.params = params;
        config.cell_size = cell_size;
        config.min_unique_visitors = min_unique_visitors;
        BaseMap overrides(bases.begin(), bases.end());
        const auto r = run_pipeline(batch, config, overrides);
        py::dict d = summary_dict(r.summary());
        std::vector<std::pair<std::string, std::uint64_t>> ranking;
        for (const auto& c : r.categories) ranking.emplace_back(c.category, c.total_Q);
        d["category_ranking"] = ranking;
        std::vector<std::string> flagged;
        for (const auto& s : r.locations)
          if (s.is_transient_location) flagged.push_back(s.location_id);
        d["transient_locations"] = flagged;
        return d;
      },
      py::arg("batch"), py::arg("params") = ModelParams{}, py::arg("cell_size") = 0.05,
      py::arg("min_unique_visitors") = 3,
      py::arg("bases") = std::map<std::string, std::string>{},
      "Run the model on a canonical batch and return the summary as a dict.");

  m.def(
      "run_oracle",
      [](const EventBatch& batch, const ModelParams& params,
         std::map<std::string, std::string> bases) {
        BaseMap pinned(bases.begin(), bases.end());
        const BaseMap all = to_base_map(assign_bases(batch, HourWindow{}, pinned));
        ModelParams p = params;
        p.observation_window = resolve_window(p.observation_window, batch);
        return summary_dict(run_oracle(batch, all, p));
      },
      py::arg("batch"), py::arg("params") = ModelParams{},
      py::arg("bases") = std::map<std::string, std::string>{});

  m.def(
      "generate",
      [](const std::string& config_json) {
        const auto out = generate(synth_config_from_json(config_json));
        py::dict d;
        d["events_jsonl"] = out.events_jsonl;
        d["ground_truth_json"] = out.ground_truth_json;
        d["census_csv"] = out.census_csv;
        return d;
      },
      py::arg("config_json") = "{}", "Synthetic traces; config as a JSON object string.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"transdyn"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command line in-process; returns (exit_code, stdout, stderr).");
}
