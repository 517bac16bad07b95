#pragma once

#include <map>
#include <string>

#include "transdyn/event.hpp"
#include "transdyn/time.hpp"

namespace transdyn {

struct BaseAssignment {
  std::string person_id;
  std::string base_location;
  /// Anchoring events: night events at the base, or all events at the base
  /// when the person has no night events or only one location.
  std::size_t support = 0;
  /// support / number of the person's accepted events.
  double confidence = 0.0;
  friend bool operator==(const BaseAssignment&, const BaseAssignment&) = default;
};

/// person_id -> base location_id.
using BaseMap = std::map<std::string, std::string, std::less<>>;

/// Modal location among night-window events (UTC hours), falling back to the
/// overall modal location. Ties go to the larger total dwell, then the
/// lexicographically smaller location_id. A person seen at a single location
/// gets it with confidence 1. Throws DataError on an empty span.
BaseAssignment infer_base(PersonEvents events, HourWindow night_window = {});

/// Infers a base for every person in a canonical batch; entries in
/// `overrides` win over inference (support/confidence are recomputed
/// against the pinned location).
std::map<std::string, BaseAssignment> assign_bases(const EventBatch& batch,
                                                   HourWindow night_window = {},
                                                   const BaseMap& overrides = {});

BaseMap to_base_map(const std::map<std::string, BaseAssignment>& assignments);

/// Reads the override file: CSV `user,base_location`. Throws IoError/ConfigError.
BaseMap read_base_overrides(const std::string& path);

}  // namespace transdyn
