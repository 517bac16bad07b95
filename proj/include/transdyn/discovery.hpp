#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "transdyn/base_location.hpp"
#include "transdyn/model.hpp"

namespace transdyn {

inline constexpr std::string_view uncategorized = "uncategorized";

struct CategoryRank {
  std::string category;
  std::uint64_t total_Q = 0;
  std::uint64_t location_count = 0;
  std::uint64_t rank = 0;
  friend bool operator==(const CategoryRank&, const CategoryRank&) = default;
};

/// Fills resident_count from `bases`, flags locations whose unique visitors
/// reach `min_unique_visitors` and outnumber their residents, and returns all
/// locations ordered by (Q desc, unique_visitors desc, location_id asc).
/// Throws ConfigError when min_unique_visitors is 0.
std::vector<LocationStats> discover_transient_locations(LocationStatsMap stats,
                                                        const BaseMap& bases,
                                                        std::uint64_t min_unique_visitors);

/// Sums Q per category over flagged locations (unflagged entries are
/// skipped); ranks by total_Q desc, then category name.
std::vector<CategoryRank> rank_categories(std::span<const LocationStats> locations);

/// Category and mean coordinates of every location seen in the batch. The
/// category is the most frequent non-empty one, ties to the smaller name.
void attach_location_attributes(LocationStatsMap& stats, const EventBatch& batch);

/// CSV `location,Q,unique_visitors,resident_count,category,is_transient`.
void write_locations_csv(std::ostream& out, std::span<const LocationStats> locations);
/// CSV `rank,category,total_Q,location_count`.
void write_category_ranking_csv(std::ostream& out, std::span<const CategoryRank> ranking);
/// FeatureCollection of flagged locations as Points at their mean coordinates.
void write_locations_geojson(std::ostream& out, std::span<const LocationStats> locations);

}  // namespace transdyn
