#include "transdyn/oracle.hpp"

#include <algorithm>
#include <set>

namespace transdyn {
namespace {

/// Indicator term (person)_{t_s}^{l_j -> l_k} that evaluated to 1.
struct Term {
  std::size_t step;
  std::size_t from;
  std::size_t to;
};

}  // namespace

RunSummary run_oracle(const EventBatch& canonical, const BaseMap& bases, const ModelParams& params) {
  // Group by person by hand; the batch order is not relied upon.
  std::map<std::string, std::vector<const MobilityEvent*>> people;
  std::set<std::string> location_set;
  Timestamp last_seen = Timestamp::min();
  for (const auto& e : canonical.events) {
    people[e.person_id].push_back(&e);
    location_set.insert(e.location_id);
    last_seen = std::max(last_seen, e.timestamp);
  }
  if (people.size() > oracle_max_persons)
    throw OracleSizeError("oracle refuses " + std::to_string(people.size()) + " persons (limit " +
                          std::to_string(oracle_max_persons) + ")");
  for (auto& [id, seq] : people) {
    if (seq.size() > oracle_max_events_per_person)
      throw OracleSizeError("oracle refuses person " + id + " with " +
                            std::to_string(seq.size()) + " events (limit " +
                            std::to_string(oracle_max_events_per_person) + ")");
    std::stable_sort(seq.begin(), seq.end(), [](const MobilityEvent* a, const MobilityEvent* b) {
      if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
      return a->location_id < b->location_id;
    });
  }
  const std::vector<std::string> L(location_set.begin(), location_set.end());
  const std::size_t gamma = L.size();
  const Timestamp t_end =
      params.observation_window.end == Timestamp::max() ? last_seen : params.observation_window.end;

  RunSummary out;
  out.beta = params.beta;
  out.population.N = people.size();
  out.population.gamma = gamma;

  std::vector<std::uint64_t> q(gamma, 0);
  std::uint64_t all_terms = 0;
  std::int64_t theta = 0;

  for (const auto& [id, seq] : people) {
    std::string base;
    if (auto it = bases.find(id); it != bases.end()) base = it->second;

    // Location index of each sighting.
    std::vector<std::size_t> at(seq.size());
    for (std::size_t s = 0; s < seq.size(); ++s)
      for (std::size_t j = 0; j < gamma; ++j)
        if (L[j] == seq[s]->location_id) at[s] = j;

    std::vector<Term> terms;
    for (std::size_t s = 0; s + 1 < seq.size(); ++s)
      for (std::size_t j = 0; j < gamma; ++j)
        for (std::size_t k = 0; k < gamma; ++k)
          if (j != k && at[s] == j && at[s + 1] == k) terms.push_back({s, j, k});

    std::vector<bool> removed(terms.size(), false);
    if (params.pingpong_window.count() > 0) {
      std::size_t idx = 0;
      while (idx < terms.size()) {
        const bool has_next = idx + 1 < terms.size();
        if (has_next && terms[idx + 1].from == terms[idx].to &&
            terms[idx + 1].to == terms[idx].from &&
            seq[terms[idx + 1].step + 1]->timestamp - seq[terms[idx].step]->timestamp <=
                params.pingpong_window) {
          removed[idx] = removed[idx + 1] = true;
          idx += 2;
        } else {
          idx += 1;
        }
      }
    }

    std::uint64_t kept = 0;
    for (std::size_t t = 0; t < terms.size(); ++t)
      if (!removed[t]) ++kept;
    all_terms += kept;
    out.M[id] = params.beta * static_cast<double>(kept);

    for (std::size_t k = 0; k < gamma; ++k) {
      if (L[k] == base) continue;
      for (std::size_t t = 0; t < terms.size(); ++t)
        if (!removed[t] && terms[t].to == k) ++q[k];
    }

    bool away = false;
    for (std::size_t s = 0; s < seq.size(); ++s) {
      if (L[at[s]] == base) continue;
      away = true;
      if (s > 0 && at[s - 1] == at[s]) continue;
      std::size_t next = s + 1;
      while (next < seq.size() && at[next] == at[s]) ++next;
      const Timestamp stop = next < seq.size() ? seq[next]->timestamp
                                               : std::max(t_end, seq.back()->timestamp);
      theta += std::min(stop - seq[s]->timestamp, params.max_dwell_cap).count();
    }
    if (kept > 0 || away) ++out.population.eta;
  }

  out.W = params.beta * static_cast<double>(all_terms);
  out.theta_seconds = theta;
  for (std::size_t k = 0; k < gamma; ++k)
    if (q[k] > 0) out.Q[L[k]] = q[k];
  return out;
}

}  // namespace transdyn
