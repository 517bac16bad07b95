#include "transdyn/base_location.hpp"

#include <fstream>
#include <vector>

#include "transdyn/error.hpp"

namespace transdyn {
namespace {

struct Tally {
  std::size_t night = 0;
  std::size_t all = 0;
  Seconds dwell{0};
};

/// Better candidate: more votes, then more dwell, then smaller id (map order
/// visits smaller ids first, so strict comparison keeps the first).
bool better(std::size_t votes, Seconds dwell, std::size_t best_votes, Seconds best_dwell) {
  if (votes != best_votes) return votes > best_votes;
  return dwell > best_dwell;
}

}  // namespace

BaseAssignment infer_base(PersonEvents events, HourWindow night_window) {
  if (events.empty()) throw DataError("no events for person");

  // Dwell of a location is the summed span of its maximal runs of
  // consecutive sightings. Inserting a sighting at one location can only
  // shorten the dwell of the others.
  std::map<std::string_view, Tally> tallies;
  std::size_t run_start = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& t = tallies[events[i].location_id];
    ++t.all;
    if (night_window.contains(utc_hour(events[i].timestamp))) ++t.night;
    if (i + 1 == events.size() || events[i + 1].location_id != events[i].location_id) {
      t.dwell += events[i].timestamp - events[run_start].timestamp;
      run_start = i + 1;
    }
  }

  std::size_t night_total = 0;
  for (const auto& [loc, t] : tallies) night_total += t.night;
  const bool use_night = night_total > 0;

  std::string_view best;
  bool have_best = false;
  std::size_t best_votes = 0;
  Seconds best_dwell{-1};
  for (const auto& [loc, t] : tallies) {
    const std::size_t votes = use_night ? t.night : t.all;
    if (!have_best || better(votes, t.dwell, best_votes, best_dwell)) {
      have_best = true;
      best = loc;
      best_votes = votes;
      best_dwell = t.dwell;
    }
  }

  BaseAssignment out;
  out.person_id = events.front().person_id;
  if (tallies.size() == 1) best_votes = events.size();
  out.base_location = std::string(best);
  out.support = best_votes;
  out.confidence = static_cast<double>(best_votes) / static_cast<double>(events.size());
  return out;
}

std::map<std::string, BaseAssignment> assign_bases(const EventBatch& batch,
                                                   HourWindow night_window,
                                                   const BaseMap& overrides) {
  std::map<std::string, BaseAssignment> out;
  for (PersonEvents person : split_by_person(batch.events)) {
    const std::string& id = person.front().person_id;
    if (auto it = overrides.find(id); it != overrides.end()) {
      BaseAssignment pinned{id, it->second, 0, 0.0};
      for (const auto& e : person)
        if (e.location_id == it->second) ++pinned.support;
      pinned.confidence =
          static_cast<double>(pinned.support) / static_cast<double>(person.size());
      out.emplace(id, std::move(pinned));
    } else {
      out.emplace(id, infer_base(person, night_window));
    }
  }
  return out;
}

BaseMap to_base_map(const std::map<std::string, BaseAssignment>& assignments) {
  BaseMap out;
  for (const auto& [id, a] : assignments) out.emplace(id, a.base_location);
  return out;
}

BaseMap read_base_overrides(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open base override file '" + path + "'");
  BaseMap out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "user,base_location")
        throw ConfigError(path + ": expected header 'user,base_location'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected user,base_location");
    out[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return out;
}

}  // namespace transdyn
