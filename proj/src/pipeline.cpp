#include "transdyn/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"
#include "transdyn/csv.hpp"
#include "transdyn/error.hpp"
#include "transdyn/parallel.hpp"

namespace transdyn {

void PipelineConfig::validate() const {
  params.validate();
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be > 0");
  if (min_unique_visitors < 1) throw ConfigError("min_unique_visitors must be >= 1");
  if (!(absent_threshold >= 0.0)) throw ConfigError("absent_threshold must be >= 0");
  if (night_window.start < 0 || night_window.start > 23 || night_window.end < 0 ||
      night_window.end > 23)
    throw ConfigError("night_window hours must lie in [0, 23]");
}

std::string summary_to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["N"] = s.population.N;
  j["eta"] = s.population.eta;
  j["gamma"] = s.population.gamma;
  j["W"] = s.W;
  j["theta_seconds"] = s.theta_seconds;
  j["beta"] = s.beta;
  j["Q"] = nlohmann::ordered_json::object();
  for (const auto& [loc, q] : s.Q) j["Q"][loc] = q;
  j["M"] = nlohmann::ordered_json::object();
  for (const auto& [person, m] : s.M) j["M"][person] = m;
  return j.dump(2) + "\n";
}

RunSummary summary_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DataError("summary is not valid JSON");
  RunSummary s;
  try {
    s.population.N = j.at("N").get<std::uint64_t>();
    s.population.eta = j.at("eta").get<std::uint64_t>();
    s.population.gamma = j.at("gamma").get<std::uint64_t>();
    s.W = j.at("W").get<double>();
    s.theta_seconds = j.at("theta_seconds").get<std::int64_t>();
    s.beta = j.value("beta", 1.0);
    if (j.contains("Q"))
      for (const auto& [k, v] : j["Q"].items()) s.Q[k] = v.get<std::uint64_t>();
    if (j.contains("M"))
      for (const auto& [k, v] : j["M"].items()) s.M[k] = v.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("summary: ") + e.what());
  }
  return s;
}

RunSummary PipelineResult::summary() const {
  RunSummary s;
  s.population = population;
  s.W = W;
  s.theta_seconds = duration.total.count();
  s.beta = effective_params.beta;
  for (const auto& [loc, st] : stats)
    if (st.Q > 0) s.Q[loc] = st.Q;
  for (const auto& p : profiles) s.M[p.person_id] = p.movement_profile_M;
  return s;
}

ObservationWindow resolve_window(const ObservationWindow& window, const EventBatch& batch) {
  ObservationWindow out = window;
  if (batch.events.empty()) return out;
  auto [lo, hi] = std::minmax_element(
      batch.events.begin(), batch.events.end(),
      [](const MobilityEvent& a, const MobilityEvent& b) { return a.timestamp < b.timestamp; });
  if (out.start == Timestamp::min()) out.start = lo->timestamp;
  if (out.end == Timestamp::max()) out.end = hi->timestamp;
  return out;
}

PipelineResult run_pipeline(EventBatch canonical, const PipelineConfig& config,
                            const BaseMap& base_overrides,
                            const std::optional<CensusBaseline>& census) {
  config.validate();
  PipelineResult r;
  r.batch = std::move(canonical);
  r.effective_params = config.params;
  r.effective_params.observation_window = resolve_window(config.params.observation_window, r.batch);

  r.bases = assign_bases(r.batch, config.night_window, base_overrides);
  const BaseMap base_map = to_base_map(r.bases);

  // Per-person work is independent; results land in person order.
  const auto persons = split_by_person(r.batch.events);
  r.profiles.resize(persons.size());
  std::vector<std::vector<MovementEdge>> person_edges(persons.size());
  parallel_chunks(persons.size(), config.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& base = r.bases.at(persons[i].front().person_id).base_location;
      r.profiles[i] = build_profile(persons[i], base, r.effective_params, &person_edges[i]);
    }
  });
  std::size_t total_edges = 0;
  for (const auto& e : person_edges) total_edges += e.size();
  r.edges.reserve(total_edges);
  for (auto& e : person_edges)
    r.edges.insert(r.edges.end(), std::make_move_iterator(e.begin()),
                   std::make_move_iterator(e.end()));

  r.W = cumulative_estimate(r.profiles);
  r.duration = transient_duration(r.profiles, r.effective_params);
  r.population = summarize_population(r.profiles, r.batch);

  r.stats = location_agglomeration(r.edges, base_map);
  attach_location_attributes(r.stats, r.batch);
  r.locations = discover_transient_locations(r.stats, base_map, config.min_unique_visitors);
  for (const auto& s : r.locations) {
    auto& target = r.stats.find(s.location_id)->second;
    target.resident_count = s.resident_count;
    target.is_transient_location = s.is_transient_location;
  }
  r.categories = rank_categories(r.locations);

  r.grid = grid_aggregate(r.edges, r.effective_params, config.cell_size);
  if (census) {
    for (auto& [idx, cell] : r.grid)
      if (auto it = census->population.find(idx); it != census->population.end())
        cell.census_pop = it->second;
  }
  r.grid_diff = census_diff(r.grid, config.cell_size, census, config.absent_threshold);
  return r;
}

void write_profiles_csv(std::ostream& out, std::span<const PersonProfile> profiles) {
  out << "user,base,raw_edges,suppressed_edges,M,is_transient\n";
  for (const auto& p : profiles)
    out << csv_field(p.person_id) << ',' << csv_field(p.base_location) << ',' << p.raw_edge_count
        << ',' << p.suppressed_edge_count << ',' << format_real(p.movement_profile_M) << ','
        << (p.is_transient ? 1 : 0) << '\n';
}

void write_location_stats_csv(std::ostream& out, const LocationStatsMap& stats) {
  out << "location,Q,unique_visitors,category\n";
  for (const auto& [id, s] : stats)
    out << csv_field(id) << ',' << s.Q << ',' << s.unique_visitors << ',' << csv_field(s.category)
        << '\n';
}

}  // namespace transdyn
