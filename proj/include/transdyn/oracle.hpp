#pragma once

#include "transdyn/base_location.hpp"
#include "transdyn/error.hpp"
#include "transdyn/event.hpp"
#include "transdyn/model.hpp"
#include "transdyn/pipeline.hpp"

namespace transdyn {

inline constexpr std::size_t oracle_max_persons = 50;
inline constexpr std::size_t oracle_max_events_per_person = 200;

/// Input exceeds the brute-force size limits.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

/// Brute-force evaluation of the movement, agglomeration and duration sums.
/// Every (person, step, from, to) indicator term is materialized over the
/// full location set, and nothing is shared with the model's aggregation
/// code. Throws OracleSizeError beyond 50 persons or 200 events per person.
RunSummary run_oracle(const EventBatch& canonical, const BaseMap& bases, const ModelParams& params);

}  // namespace transdyn
