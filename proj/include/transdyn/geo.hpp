#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace transdyn {

/// Floor-quantized lat/lon bin. Lower edges are inclusive.
struct CellIndex {
  std::int64_t row = 0;
  std::int64_t col = 0;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// floor(value / cell_size), snapping quotients within 1e-9 (relative) of an
/// integer onto it so decimal boundaries such as 0.15 / 0.05 land on the
/// upper cell.
std::int64_t floor_index(double value, double cell_size);

CellIndex cell_of(double lat, double lon, double cell_size);

/// "c:<row>:<col>".
std::string cell_token(double lat, double lon, double cell_size);
std::string cell_token(CellIndex cell);

bool valid_lat(double lat);
bool valid_lon(double lon);

}  // namespace transdyn
