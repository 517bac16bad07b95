#include "transdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "transdyn/error.hpp"

namespace transdyn {

void ModelParams::validate() const {
  if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1]");
  if (pingpong_window < Seconds{0}) throw ConfigError("pingpong_window must be >= 0");
  if (max_dwell_cap <= Seconds{0}) throw ConfigError("max_dwell_cap must be > 0");
  if (observation_window.start > observation_window.end)
    throw ConfigError("observation_window start is after its end");
}

std::vector<MovementEdge> movement_edges(PersonEvents events) {
  std::vector<MovementEdge> edges;
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& prev = events[i - 1];
    const auto& cur = events[i];
    if (prev.location_id == cur.location_id) continue;
    MovementEdge e;
    e.person_id = cur.person_id;
    e.from_location = prev.location_id;
    e.to_location = cur.location_id;
    e.depart_ts = prev.timestamp;
    e.arrive_ts = cur.timestamp;
    e.depart_index = i - 1;
    e.arrive_index = i;
    e.arrive_lat = cur.lat;
    e.arrive_lon = cur.lon;
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<MovementEdge> suppress_ping_pong(std::span<const MovementEdge> edges, Seconds window) {
  std::vector<MovementEdge> kept;
  kept.reserve(edges.size());
  std::size_t i = 0;
  while (i < edges.size()) {
    if (window > Seconds{0} && i + 1 < edges.size()) {
      const auto& first = edges[i];
      const auto& second = edges[i + 1];
      const bool reversal = first.person_id == second.person_id &&
                            first.from_location == second.to_location &&
                            first.to_location == second.from_location;
      if (reversal && second.arrive_ts - first.depart_ts <= window) {
        i += 2;
        continue;
      }
    }
    kept.push_back(edges[i]);
    ++i;
  }
  return kept;
}

TransientFlags classify_transient(PersonEvents events, std::string_view base,
                                  Seconds pingpong_window) {
  TransientFlags flags;
  flags.per_event.assign(events.size(), false);
  const auto raw = movement_edges(events);
  for (const auto& e : suppress_ping_pong(raw, pingpong_window)) {
    flags.per_event[e.depart_index] = true;
    flags.per_event[e.arrive_index] = true;
  }
  for (std::size_t i = 0; i < events.size(); ++i)
    if (events[i].location_id != base) flags.per_event[i] = true;
  flags.person = std::find(flags.per_event.begin(), flags.per_event.end(), true) !=
                 flags.per_event.end();
  return flags;
}

double movement_profile(std::span<const MovementEdge> suppressed, const ModelParams& params) {
  return params.beta * static_cast<double>(suppressed.size());
}

std::vector<DwellInterval> dwell_intervals(PersonEvents events, std::string_view base,
                                           Timestamp observation_end) {
  std::vector<DwellInterval> out;
  std::size_t i = 0;
  while (i < events.size()) {
    std::size_t j = i + 1;
    while (j < events.size() && events[j].location_id == events[i].location_id) ++j;
    if (events[i].location_id != base) {
      DwellInterval d;
      d.location_id = events[i].location_id;
      d.start = events[i].timestamp;
      d.trailing = j == events.size();
      d.end = d.trailing ? std::max(observation_end, events[j - 1].timestamp) : events[j].timestamp;
      out.push_back(std::move(d));
    }
    i = j;
  }
  return out;
}

PersonProfile build_profile(PersonEvents events, std::string_view base, const ModelParams& params,
                            std::vector<MovementEdge>* edges_out) {
  PersonProfile p;
  if (events.empty()) return p;
  p.person_id = events.front().person_id;
  p.base_location = std::string(base);
  p.beta = params.beta;
  p.pingpong_window = params.pingpong_window;

  const auto raw = movement_edges(events);
  auto kept = suppress_ping_pong(raw, params.pingpong_window);
  p.raw_edge_count = raw.size();
  p.suppressed_edge_count = kept.size();
  p.movement_profile_M = movement_profile(kept, params);

  const bool away = std::any_of(events.begin(), events.end(),
                                [&](const MobilityEvent& e) { return e.location_id != base; });
  p.is_transient = p.suppressed_edge_count > 0 || away;

  const Timestamp end = params.observation_window.end == Timestamp::max()
                            ? events.back().timestamp
                            : params.observation_window.end;
  p.dwell_intervals = dwell_intervals(events, base, end);

  if (edges_out)
    edges_out->insert(edges_out->end(), std::make_move_iterator(kept.begin()),
                      std::make_move_iterator(kept.end()));
  return p;
}

double cumulative_estimate(std::span<const PersonProfile> profiles) {
  if (profiles.empty()) return 0.0;
  std::uint64_t edges = 0;
  for (const auto& p : profiles) {
    if (p.beta != profiles.front().beta || p.pingpong_window != profiles.front().pingpong_window)
      throw DataError("inconsistent params");
    edges += p.suppressed_edge_count;
  }
  return profiles.front().beta * static_cast<double>(edges);
}

LocationStatsMap location_agglomeration(std::span<const MovementEdge> edges, const BaseMap& bases) {
  LocationStatsMap stats;
  std::set<std::pair<std::string_view, std::string_view>> visitors;
  for (const auto& e : edges) {
    auto it = stats.find(e.to_location);
    if (it == stats.end()) {
      it = stats.emplace(e.to_location, LocationStats{}).first;
      it->second.location_id = e.to_location;
    }
    auto& s = it->second;
    ++s.inbound_edges;
    const auto base = bases.find(e.person_id);
    if (base != bases.end() && base->second == e.to_location) continue;
    ++s.Q;
    if (visitors.emplace(e.to_location, e.person_id).second) ++s.unique_visitors;
  }
  return stats;
}

DurationSummary transient_duration(std::span<const PersonProfile> profiles,
                                   const ModelParams& params) {
  DurationSummary out;
  for (const auto& p : profiles) {
    Seconds person{0};
    for (const auto& d : p.dwell_intervals) person += std::min(d.end - d.start, params.max_dwell_cap);
    if (p.is_transient) out.per_person[p.person_id] = person;
    out.total += person;
  }
  return out;
}

PopulationSummary summarize_population(std::span<const PersonProfile> profiles,
                                       const EventBatch& batch) {
  PopulationSummary s;
  s.N = profiles.size();
  s.eta = static_cast<std::uint64_t>(
      std::count_if(profiles.begin(), profiles.end(), [](const auto& p) { return p.is_transient; }));
  std::set<std::string_view> locations;
  for (const auto& e : batch.events) locations.insert(e.location_id);
  s.gamma = locations.size();
  return s;
}

}  // namespace transdyn
