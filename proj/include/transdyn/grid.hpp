#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "transdyn/geo.hpp"
#include "transdyn/model.hpp"

namespace transdyn {

struct GridCell {
  CellIndex cell;
  /// Suppressed-edge arrivals binned here.
  std::uint64_t arrivals = 0;
  /// beta * arrivals.
  double transient_W = 0.0;
  std::uint64_t transient_persons = 0;
  std::optional<double> census_pop;
};

using Grid = std::map<CellIndex, GridCell>;

struct CensusBaseline {
  double cell_size = 0.0;
  std::map<CellIndex, double> population;
};

struct CellDiff {
  CellIndex cell;
  double transient_W = 0.0;
  std::uint64_t transient_persons = 0;
  std::optional<double> census_pop;
  bool flagged = false;
};

/// Bins every edge's arrival coordinates with the floor convention.
Grid grid_aggregate(std::span<const MovementEdge> edges, const ModelParams& params,
                    double cell_size);

/// Reads CSV `row,col,population` preceded by a `#cell_size=<degrees>` line.
/// Throws IoError/ConfigError.
CensusBaseline read_census(const std::string& path);
CensusBaseline parse_census(std::istream& in, const std::string& name = "census");

/// Flags cells carrying transient weight whose census population is absent or
/// at most `absent_threshold`. Returns every grid cell in (row, col) order.
/// Throws ConfigError when the census grid has a different cell size.
std::vector<CellDiff> census_diff(const Grid& grid, double grid_cell_size,
                                  const std::optional<CensusBaseline>& census,
                                  double absent_threshold);

/// CSV `row,col,transient_W,transient_persons,census_pop,flagged`; an absent
/// census value is an empty field.
void write_grid_diff_csv(std::ostream& out, std::span<const CellDiff> diff);
/// FeatureCollection of flagged cells as closed rectangular Polygons.
void write_flagged_cells_geojson(std::ostream& out, std::span<const CellDiff> diff,
                                 double cell_size);

}  // namespace transdyn
