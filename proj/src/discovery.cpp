#include "transdyn/discovery.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"
#include "transdyn/csv.hpp"
#include "transdyn/error.hpp"

namespace transdyn {

std::vector<LocationStats> discover_transient_locations(LocationStatsMap stats,
                                                        const BaseMap& bases,
                                                        std::uint64_t min_unique_visitors) {
  if (min_unique_visitors < 1) throw ConfigError("min_unique_visitors must be >= 1");
  for (auto& [id, s] : stats) s.resident_count = 0;
  for (const auto& [person, base] : bases)
    if (auto it = stats.find(base); it != stats.end()) ++it->second.resident_count;

  std::vector<LocationStats> out;
  out.reserve(stats.size());
  for (auto& [id, s] : stats) {
    s.is_transient_location =
        s.unique_visitors >= min_unique_visitors && s.unique_visitors > s.resident_count;
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const LocationStats& a, const LocationStats& b) {
    if (a.Q != b.Q) return a.Q > b.Q;
    if (a.unique_visitors != b.unique_visitors) return a.unique_visitors > b.unique_visitors;
    return a.location_id < b.location_id;
  });
  return out;
}

std::vector<CategoryRank> rank_categories(std::span<const LocationStats> locations) {
  std::map<std::string, CategoryRank, std::less<>> by_category;
  for (const auto& s : locations) {
    if (!s.is_transient_location) continue;
    const std::string name = s.category.empty() ? std::string(uncategorized) : s.category;
    auto& r = by_category[name];
    r.category = name;
    r.total_Q += s.Q;
    ++r.location_count;
  }
  std::vector<CategoryRank> out;
  for (auto& [name, r] : by_category) out.push_back(std::move(r));
  std::stable_sort(out.begin(), out.end(), [](const CategoryRank& a, const CategoryRank& b) {
    return a.total_Q > b.total_Q;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

void attach_location_attributes(LocationStatsMap& stats, const EventBatch& batch) {
  struct Acc {
    double lat = 0.0, lon = 0.0;
    std::size_t n = 0;
    std::map<std::string_view, std::size_t> categories;
  };
  std::map<std::string_view, Acc> acc;
  for (const auto& e : batch.events) {
    if (!stats.contains(e.location_id)) continue;
    auto& a = acc[e.location_id];
    a.lat += e.lat;
    a.lon += e.lon;
    ++a.n;
    if (!e.category.empty()) ++a.categories[e.category];
  }
  for (auto& [id, a] : acc) {
    auto& s = stats.find(id)->second;
    s.mean_lat = a.lat / static_cast<double>(a.n);
    s.mean_lon = a.lon / static_cast<double>(a.n);
    std::size_t best = 0;
    for (const auto& [cat, n] : a.categories) {
      if (n > best) {
        best = n;
        s.category = std::string(cat);
      }
    }
  }
}

void write_locations_csv(std::ostream& out, std::span<const LocationStats> locations) {
  out << "location,Q,unique_visitors,resident_count,category,is_transient\n";
  for (const auto& s : locations) {
    out << csv_field(s.location_id) << ',' << s.Q << ',' << s.unique_visitors << ','
        << s.resident_count << ',' << csv_field(s.category) << ','
        << (s.is_transient_location ? 1 : 0) << '\n';
  }
}

void write_category_ranking_csv(std::ostream& out, std::span<const CategoryRank> ranking) {
  out << "rank,category,total_Q,location_count\n";
  for (const auto& r : ranking)
    out << r.rank << ',' << csv_field(r.category) << ',' << r.total_Q << ',' << r.location_count
        << '\n';
}

void write_locations_geojson(std::ostream& out, std::span<const LocationStats> locations) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = nlohmann::ordered_json::array();
  for (const auto& s : locations) {
    if (!s.is_transient_location) continue;
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {s.mean_lon, s.mean_lat}}};
    f["properties"] = {{"location", s.location_id},
                       {"Q", s.Q},
                       {"unique_visitors", s.unique_visitors},
                       {"resident_count", s.resident_count},
                       {"category", s.category},
                       {"is_transient", true}};
    fc["features"].push_back(std::move(f));
  }
  out << fc.dump(2) << '\n';
}

}  // namespace transdyn
