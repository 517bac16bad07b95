#pragma once

#include <list>
#include <string>
#include <vector>

#include "transdyn/model.hpp"

namespace transdyn::testing {

/// Reference for the ping-pong rule: walk a linked list with a cursor,
/// erase a qualifying pair and step past the gap without looking back.
inline std::vector<MovementEdge> naive_suppress(const std::vector<MovementEdge>& edges,
                                                Seconds window) {
  std::list<MovementEdge> work(edges.begin(), edges.end());
  if (window.count() == 0) return edges;
  auto cur = work.begin();
  while (cur != work.end()) {
    auto nxt = std::next(cur);
    if (nxt == work.end()) break;
    const bool reverse = cur->from_location == nxt->to_location &&
                         cur->to_location == nxt->from_location && cur->person_id == nxt->person_id;
    const auto span = nxt->arrive_ts - cur->depart_ts;
    if (reverse && span <= window) {
      auto after = std::next(nxt);
      work.erase(cur, after);
      cur = after;
    } else {
      ++cur;
    }
  }
  return {work.begin(), work.end()};
}

/// Consecutive distinct-location pairs, recounted from scratch.
inline std::vector<MovementEdge> naive_edges(const std::vector<MobilityEvent>& person) {
  std::vector<MovementEdge> out;
  for (std::size_t i = 0; i + 1 < person.size(); ++i) {
    if (person[i].location_id == person[i + 1].location_id) continue;
    MovementEdge e;
    e.person_id = person[i].person_id;
    e.from_location = person[i].location_id;
    e.to_location = person[i + 1].location_id;
    e.depart_ts = person[i].timestamp;
    e.arrive_ts = person[i + 1].timestamp;
    out.push_back(e);
  }
  return out;
}

}  // namespace transdyn::testing
