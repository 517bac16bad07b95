#include "transdyn/geo.hpp"

#include <algorithm>
#include <cmath>

namespace transdyn {

std::int64_t floor_index(double value, double cell_size) {
  const double q = value / cell_size;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, std::abs(q)))
    return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(q));
}

CellIndex cell_of(double lat, double lon, double cell_size) {
  return {floor_index(lat, cell_size), floor_index(lon, cell_size)};
}

std::string cell_token(CellIndex cell) {
  return "c:" + std::to_string(cell.row) + ":" + std::to_string(cell.col);
}

std::string cell_token(double lat, double lon, double cell_size) {
  return cell_token(cell_of(lat, lon, cell_size));
}

bool valid_lat(double lat) { return std::isfinite(lat) && lat >= -90.0 && lat <= 90.0; }
bool valid_lon(double lon) { return std::isfinite(lon) && lon >= -180.0 && lon <= 180.0; }

}  // namespace transdyn
