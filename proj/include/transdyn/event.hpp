#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "transdyn/time.hpp"

namespace transdyn {

/// One timestamped sighting of a person at a location.
struct MobilityEvent {
  std::string person_id;
  /// Venue id, or a "c:<row>:<col>" cell token once canonicalized. Empty only
  /// between parsing and canonicalization for venue-less records.
  std::string location_id;
  double lat = 0.0;
  double lon = 0.0;
  Timestamp timestamp{};
  std::string category;
  /// 1-based line in the source stream. Not part of event identity.
  std::size_t source_line = 0;

  auto ordering_key() const {
    return std::tie(person_id, timestamp, location_id, lat, lon, category);
  }
  friend bool operator==(const MobilityEvent& a, const MobilityEvent& b) {
    return a.ordering_key() == b.ordering_key();
  }
};

struct RejectedRecord {
  std::size_t line = 0;
  std::string reason;
  friend bool operator==(const RejectedRecord&, const RejectedRecord&) = default;
};

/// Closed observation interval [start, end].
struct ObservationWindow {
  Timestamp start = Timestamp::min();
  Timestamp end = Timestamp::max();

  bool contains(Timestamp t) const { return t >= start && t <= end; }
  bool bounded() const { return start != Timestamp::min() && end != Timestamp::max(); }
  friend bool operator==(const ObservationWindow&, const ObservationWindow&) = default;
};

/// Accepted events ordered by (person_id, timestamp, location_id, ...), plus
/// the rejects. accepted + rejected == source_count.
struct EventBatch {
  std::vector<MobilityEvent> events;
  std::size_t source_count = 0;
  std::vector<RejectedRecord> rejected;

  std::size_t accepted_count() const { return events.size(); }
};

/// Contiguous run of one person's events inside an EventBatch.
using PersonEvents = std::span<const MobilityEvent>;

/// Splits a batch sorted by person into per-person spans, in person order.
std::vector<PersonEvents> split_by_person(const std::vector<MobilityEvent>& events);

}  // namespace transdyn
