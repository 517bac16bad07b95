#include "transdyn/grid.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "transdyn/csv.hpp"
#include "transdyn/error.hpp"

namespace transdyn {

Grid grid_aggregate(std::span<const MovementEdge> edges, const ModelParams& params,
                    double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("cell_size must be positive");
  Grid grid;
  std::set<std::pair<CellIndex, std::string_view>> persons;
  for (const auto& e : edges) {
    const CellIndex idx = cell_of(e.arrive_lat, e.arrive_lon, cell_size);
    auto& cell = grid[idx];
    cell.cell = idx;
    ++cell.arrivals;
    if (persons.emplace(idx, e.person_id).second) ++cell.transient_persons;
  }
  for (auto& [idx, cell] : grid) cell.transient_W = params.beta * static_cast<double>(cell.arrivals);
  return grid;
}

CensusBaseline parse_census(std::istream& in, const std::string& name) {
  CensusBaseline census;
  std::string line;
  std::size_t line_no = 0;
  bool have_size = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = name + ":" + std::to_string(line_no);
    if (line.front() == '#') {
      constexpr std::string_view key = "#cell_size=";
      if (line.rfind(key, 0) == 0) {
        try {
          census.cell_size = std::stod(line.substr(key.size()));
        } catch (const std::exception&) {
          throw ConfigError(where + ": bad cell_size");
        }
        if (!(census.cell_size > 0.0)) throw ConfigError(where + ": bad cell_size");
        have_size = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "row,col,population")
        throw ConfigError(where + ": expected header 'row,col,population'");
      have_header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string r, c, p;
    if (!std::getline(fields, r, ',') || !std::getline(fields, c, ',') ||
        !std::getline(fields, p))
      throw ConfigError(where + ": expected row,col,population");
    try {
      std::size_t used = 0;
      const CellIndex idx{std::stoll(r), std::stoll(c)};
      const double pop = std::stod(p, &used);
      if (used != p.size() || !std::isfinite(pop) || pop < 0.0)
        throw ConfigError(where + ": bad population");
      census.population[idx] += pop;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected integers row,col and a number population");
    }
  }
  if (!have_size) throw ConfigError(name + ": missing '#cell_size=<degrees>' line");
  return census;
}

CensusBaseline read_census(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open census file '" + path + "'");
  return parse_census(in, path);
}

std::vector<CellDiff> census_diff(const Grid& grid, double grid_cell_size,
                                  const std::optional<CensusBaseline>& census,
                                  double absent_threshold) {
  if (census && std::abs(census->cell_size - grid_cell_size) > 1e-12 * grid_cell_size)
    throw ConfigError("census cell_size " + format_real(census->cell_size) +
                      " does not match grid cell_size " + format_real(grid_cell_size));
  std::vector<CellDiff> out;
  out.reserve(grid.size());
  for (const auto& [idx, cell] : grid) {
    CellDiff d;
    d.cell = idx;
    d.transient_W = cell.transient_W;
    d.transient_persons = cell.transient_persons;
    if (census) {
      if (auto it = census->population.find(idx); it != census->population.end())
        d.census_pop = it->second;
    }
    d.flagged = d.transient_W > 0.0 && (!d.census_pop || *d.census_pop <= absent_threshold);
    out.push_back(d);
  }
  return out;
}

void write_grid_diff_csv(std::ostream& out, std::span<const CellDiff> diff) {
  out << "row,col,transient_W,transient_persons,census_pop,flagged\n";
  for (const auto& d : diff) {
    out << d.cell.row << ',' << d.cell.col << ',' << format_real(d.transient_W) << ','
        << d.transient_persons << ',' << (d.census_pop ? format_real(*d.census_pop) : "") << ','
        << (d.flagged ? 1 : 0) << '\n';
  }
}

void write_flagged_cells_geojson(std::ostream& out, std::span<const CellDiff> diff,
                                 double cell_size) {
  nlohmann::ordered_json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = nlohmann::ordered_json::array();
  for (const auto& d : diff) {
    if (!d.flagged) continue;
    const double s = static_cast<double>(d.cell.row) * cell_size;
    const double w = static_cast<double>(d.cell.col) * cell_size;
    const double n = s + cell_size;
    const double e = w + cell_size;
    nlohmann::ordered_json ring = {{w, s}, {e, s}, {e, n}, {w, n}, {w, s}};
    nlohmann::ordered_json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", {ring}}};
    f["properties"] = {{"row", d.cell.row},
                       {"col", d.cell.col},
                       {"transient_W", d.transient_W},
                       {"transient_persons", d.transient_persons},
                       {"census_pop", d.census_pop ? nlohmann::ordered_json(*d.census_pop)
                                                   : nlohmann::ordered_json(nullptr)}};
    fc["features"].push_back(std::move(f));
  }
  out << fc.dump(2) << '\n';
}

}  // namespace transdyn
