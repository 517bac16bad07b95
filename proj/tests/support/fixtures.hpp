#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "transdyn/event.hpp"
#include "transdyn/ingest.hpp"
#include "transdyn/time.hpp"

namespace transdyn::testing {

inline Timestamp at(const std::string& rfc3339) { return *parse_timestamp(rfc3339); }

/// Day 2016-03-01 at hh:mm UTC.
inline Timestamp hm(int hour, int minute = 0) {
  return at("2016-03-01T00:00:00Z") + Seconds{hour * 3600 + minute * 60};
}

inline MobilityEvent event(const std::string& person, const std::string& location, Timestamp ts,
                           double lat = -33.87, double lon = 151.21,
                           const std::string& category = {}) {
  MobilityEvent e;
  e.person_id = person;
  e.location_id = location;
  e.timestamp = ts;
  e.lat = lat;
  e.lon = lon;
  e.category = category;
  return e;
}

/// Sorted, canonical batch built directly from events.
inline EventBatch batch_of(std::vector<MobilityEvent> events, double cell_size = 0.05) {
  EventBatch b;
  b.source_count = events.size();
  b.events = std::move(events);
  return canonicalize(std::move(b), cell_size);
}

inline EventBatch parse_string(const std::string& text, InputFormat format = InputFormat::jsonl,
                               ObservationWindow window = {}) {
  std::istringstream in(text);
  ParseOptions options;
  options.format = format;
  options.window = window;
  options.threads = 1;
  return parse_events(in, options);
}

}  // namespace transdyn::testing
