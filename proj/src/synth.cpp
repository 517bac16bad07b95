#include "transdyn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "transdyn/error.hpp"
#include "transdyn/geo.hpp"

namespace transdyn {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::int64_t kMinute = 60;
constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 86400;
constexpr double kOutbackLat = -25.34;
constexpr double kOutbackLon = 131.04;

/// Portable draws on top of mt19937_64 (the standard distributions are
/// implementation-defined, which would break cross-platform determinism).
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  /// Uniform integer in [lo, hi].
  template <typename A, typename B>
  std::int64_t between(A lo_in, B hi_in) {
    const auto lo = static_cast<std::int64_t>(lo_in);
    const auto hi = static_cast<std::int64_t>(hi_in);
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(between(0, static_cast<std::int64_t>(i) - 1))]);
  }

 private:
  std::mt19937_64 engine_;
};

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string padded(char prefix, std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(1, prefix) + digits;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Venue {
  std::string id;
  std::string category;
  double lat = 0.0;
  double lon = 0.0;
  bool outback = false;
  bool minor = false;
};

struct Person {
  std::string id;
  std::string home;
  double lat = 0.0;
  double lon = 0.0;
  bool designated_transient = false;
};

struct Sighting {
  std::int64_t ts = 0;
  std::string location;
  double lat = 0.0;
  double lon = 0.0;
  std::string category;
  bool venue_less = false;
};

/// Uniform point strictly inside a cell, away from its edges.
std::pair<double, double> inside_cell(Draw& draw, CellIndex cell, double size) {
  const double lat = (static_cast<double>(cell.row) + draw.uniform(0.1, 0.9)) * size;
  const double lon = (static_cast<double>(cell.col) + draw.uniform(0.1, 0.9)) * size;
  return {round6(lat), round6(lon)};
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError("synth config: " + field + " " + why);
  };
  if (n_persons == 0) fail("n_persons", "must be >= 1");
  if (!(transient_fraction >= 0.0 && transient_fraction <= 1.0))
    fail("transient_fraction", "must lie in [0, 1]");
  if (!(visit_probability >= 0.0 && visit_probability <= 1.0))
    fail("visit_probability", "must lie in [0, 1]");
  if (!(pingpong_injection_rate >= 0.0 && pingpong_injection_rate <= 1.0))
    fail("pingpong_injection_rate", "must lie in [0, 1]");
  if (!(noise >= 0.0 && noise <= 1.0)) fail("noise", "must lie in [0, 1]");
  if (!(outback_fraction >= 0.0 && outback_fraction <= 1.0))
    fail("outback_fraction", "must lie in [0, 1]");
  if (days == 0) fail("days", "must be >= 1");
  if (max_stops < 1 || max_stops > 3) fail("max_stops", "must lie in [1, 3]");
  if (attraction_min_visitors < 1) fail("attraction_min_visitors", "must be >= 1");
  if (!(cell_size > 0.0)) fail("cell_size", "must be > 0");
  if (!(city_radius > 0.0 && city_radius < 5.0)) fail("city_radius", "must lie in (0, 5)");
  if (!valid_lat(city_lat - city_radius) || !valid_lat(city_lat + city_radius))
    fail("city_lat", "puts the city outside [-90, 90]");
  if (!valid_lon(city_lon - city_radius) || !valid_lon(city_lon + city_radius))
    fail("city_lon", "puts the city outside [-180, 180]");
  if (!(census_per_home >= 0.0)) fail("census_per_home", "must be >= 0");
  double total_weight = 0.0;
  std::set<std::string> names;
  for (const auto& c : categories) {
    if (c.name.empty()) fail("categories", "entries need a name");
    if (!names.insert(c.name).second) fail("categories", "repeat '" + c.name + "'");
    if (!(c.weight >= 0.0)) fail("categories." + c.name + ".weight", "must be >= 0");
    if (c.n_venues > 0) total_weight += c.weight;
  }
  if (visit_probability > 0.0 && transient_fraction > 0.0 && total_weight <= 0.0 &&
      !categories.empty())
    fail("categories", "need a positive weight on some category with venues");
}

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  Draw draw(config.seed);
  const double cs = config.cell_size;

  // Population and homes.
  const std::size_t width = std::to_string(config.n_persons).size();
  std::vector<Person> persons(config.n_persons);
  for (std::size_t i = 0; i < persons.size(); ++i) {
    persons[i].id = padded('u', i, width);
    persons[i].home = padded('h', i, width);
    persons[i].lat = round6(config.city_lat + draw.uniform(-config.city_radius, config.city_radius));
    persons[i].lon = round6(config.city_lon + draw.uniform(-config.city_radius, config.city_radius));
  }
  std::vector<std::size_t> order(persons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  draw.shuffle(order);
  const auto n_transient =
      static_cast<std::size_t>(std::llround(config.transient_fraction * persons.size()));
  std::vector<std::size_t> transients(order.begin(), order.begin() + n_transient);
  std::sort(transients.begin(), transients.end());
  for (auto t : transients) persons[t].designated_transient = true;

  std::vector<CellIndex> home_cells;
  for (const auto& p : persons) home_cells.push_back(cell_of(p.lat, p.lon, cs));
  const std::set<CellIndex> inhabited(home_cells.begin(), home_cells.end());

  // Venues: category venues first, then minor ones.
  std::vector<Venue> venues;
  std::vector<std::vector<std::size_t>> by_category(config.categories.size());
  const CellIndex outback_origin = cell_of(kOutbackLat, kOutbackLon, cs);
  std::int64_t outback_slot = 0;
  for (std::size_t c = 0; c < config.categories.size(); ++c) {
    const auto& cat = config.categories[c];
    for (std::uint32_t n = 0; n < cat.n_venues; ++n) {
      Venue v;
      v.id = "v-" + lower(cat.name) + "-" + std::to_string(n);
      v.category = cat.name;
      v.outback = draw.chance(config.outback_fraction);
      CellIndex cell;
      if (v.outback) {
        do {
          cell = {outback_origin.row - 2 * outback_slot, outback_origin.col + 2 * outback_slot};
          ++outback_slot;
        } while (inhabited.contains(cell));
      } else {
        cell = home_cells[static_cast<std::size_t>(draw.between(0, std::int64_t(home_cells.size()) - 1))];
      }
      std::tie(v.lat, v.lon) = inside_cell(draw, cell, cs);
      by_category[c].push_back(venues.size());
      venues.push_back(std::move(v));
    }
  }
  const std::size_t n_category_venues = venues.size();
  for (std::uint32_t n = 0; n < config.n_minor_venues; ++n) {
    Venue v;
    v.id = "m-" + std::to_string(n);
    v.category = "Other";
    v.minor = true;
    const CellIndex cell =
        home_cells[static_cast<std::size_t>(draw.between(0, std::int64_t(home_cells.size()) - 1))];
    std::tie(v.lat, v.lon) = inside_cell(draw, cell, cs);
    venues.push_back(std::move(v));
  }

  // Forced visits guarantee the designated visitor counts.
  std::map<std::size_t, std::deque<std::size_t>> forced;  // person -> venue queue
  if (!transients.empty()) {
    if (transients.size() >= config.attraction_min_visitors) {
      for (std::size_t vi = 0; vi < n_category_venues; ++vi)
        for (std::size_t r = 0; r < config.attraction_min_visitors; ++r)
          forced[transients[(vi * config.attraction_min_visitors + r) % transients.size()]]
              .push_back(vi);
    }
    for (std::size_t mi = 0; mi < config.n_minor_venues; ++mi)
      forced[transients[mi % transients.size()]].push_back(n_category_venues + mi);
    for (const auto& [person, queue] : forced)
      if (queue.size() > std::size_t{config.days} * config.max_stops)
        throw ConfigError("synth config: days too few to schedule " +
                          std::to_string(queue.size()) + " seeded visits for one person");
  }

  double total_weight = 0.0;
  for (std::size_t c = 0; c < config.categories.size(); ++c)
    if (!by_category[c].empty()) total_weight += config.categories[c].weight;
  auto pick_category_venue = [&]() -> std::optional<std::size_t> {
    if (total_weight <= 0.0) return std::nullopt;
    double x = draw.unit() * total_weight;
    for (std::size_t c = 0; c < config.categories.size(); ++c) {
      if (by_category[c].empty()) continue;
      x -= config.categories[c].weight;
      if (x < 0.0 || c + 1 == config.categories.size()) {
        const auto& list = by_category[c];
        return list[static_cast<std::size_t>(draw.between(0, std::int64_t(list.size()) - 1))];
      }
    }
    return by_category.back().empty() ? std::nullopt : std::optional(by_category.back().back());
  };

  // Ground-truth bookkeeping.
  ojson homes = ojson::object();
  ojson true_edges = ojson::object();
  ojson true_dwell = ojson::object();
  ojson pingpong_per_person = ojson::object();
  ojson truth_transients = ojson::array();
  std::map<std::size_t, std::set<std::size_t>> venue_visitors;
  std::set<std::string> locations;
  std::uint64_t injected_total = 0;
  std::uint64_t pp_counter = 0;
  std::map<CellIndex, std::uint64_t> census_homes;
  for (const auto& cell : home_cells) ++census_homes[cell];

  std::ostringstream events;
  const std::int64_t t0 = config.start.time_since_epoch().count();

  for (std::size_t pi = 0; pi < persons.size(); ++pi) {
    const auto& person = persons[pi];
    std::vector<Sighting> trace;
    std::uint64_t edges = 0;
    std::int64_t dwell = 0;
    std::uint64_t injected = 0;
    auto home = [&](std::int64_t ts) {
      trace.push_back({ts, person.home, person.lat, person.lon, {}, false});
    };
    auto& queue = forced[pi];

    for (std::uint32_t d = 0; d < config.days; ++d) {
      const std::int64_t day = t0 + std::int64_t{d} * kDay;
      home(day + 1 * kHour + draw.between(0, 4 * kHour - 1));
      const std::int64_t morning = day + 7 * kHour + draw.between(0, kHour - 1);
      home(morning);

      std::vector<std::size_t> stops;
      if (person.designated_transient) {
        while (!queue.empty() && stops.size() < config.max_stops) {
          if (std::find(stops.begin(), stops.end(), queue.front()) != stops.end()) break;
          stops.push_back(queue.front());
          queue.pop_front();
        }
        if (stops.empty() && draw.chance(config.visit_probability)) {
          const auto want = draw.between(1, config.max_stops);
          for (std::int64_t k = 0; k < want; ++k) {
            for (int attempt = 0; attempt < 10; ++attempt) {
              auto v = pick_category_venue();
              if (!v) break;
              if (std::find(stops.begin(), stops.end(), *v) == stops.end()) {
                stops.push_back(*v);
                break;
              }
            }
          }
        }
      }

      std::int64_t evening_floor = day + 21 * kHour;
      if (!stops.empty()) {
        std::int64_t t = day + 9 * kHour + draw.between(0, 3 * kHour);
        const std::int64_t first_arrival = t;
        for (std::size_t s = 0; s < stops.size(); ++s) {
          const auto& v = venues[stops[s]];
          venue_visitors[stops[s]].insert(pi);
          const std::int64_t stay = draw.between(45 * kMinute, 150 * kMinute);
          trace.push_back({t, v.id, v.lat, v.lon, v.category, false});
          if (draw.chance(config.pingpong_injection_rate)) {
            const std::int64_t out_at = t + draw.between(60, 240);
            const std::int64_t back_at = out_at + draw.between(60, 300);
            const std::string spot = "pp-" + std::to_string(pp_counter++);
            trace.push_back({out_at, spot, round6(v.lat + 1e-4), round6(v.lon + 1e-4), {}, false});
            trace.push_back({back_at, v.id, v.lat, v.lon, v.category, false});
            ++injected;
          }
          trace.push_back({t + stay / 2, v.id, v.lat, v.lon, v.category, false});
          trace.push_back({t + stay, v.id, v.lat, v.lon, v.category, false});
          t += stay + draw.between(10 * kMinute, 40 * kMinute);
          ++edges;
        }
        home(t);
        ++edges;
        dwell += t - first_arrival;
        evening_floor = std::max(evening_floor, t + 30 * kMinute);
      }
      home(std::max(evening_floor, day + 21 * kHour + draw.between(0, 150 * kMinute)));

      if (draw.chance(config.noise)) {
        Sighting stray;
        stray.ts = day + draw.between(0, kDay - 1);
        stray.lat = round6(config.city_lat + draw.uniform(-config.city_radius, config.city_radius));
        stray.lon = round6(config.city_lon + draw.uniform(-config.city_radius, config.city_radius));
        stray.location = cell_token(stray.lat, stray.lon, cs);
        stray.venue_less = true;
        trace.push_back(std::move(stray));
      }
    }

    std::stable_sort(trace.begin(), trace.end(), [](const Sighting& a, const Sighting& b) {
      return std::tie(a.ts, a.location) < std::tie(b.ts, b.location);
    });
    for (const auto& s : trace) {
      locations.insert(s.location);
      ojson line;
      line["user"] = person.id;
      line["lat"] = s.lat;
      line["lon"] = s.lon;
      line["ts"] = format_timestamp(Timestamp{Seconds{s.ts}});
      if (!s.venue_less) line["venue"] = s.location;
      if (!s.category.empty()) line["category"] = s.category;
      events << line.dump() << '\n';
    }

    homes[person.id] = person.home;
    true_edges[person.id] = edges;
    true_dwell[person.id] = dwell;
    pingpong_per_person[person.id] = injected;
    injected_total += injected;
    if (edges > 0) truth_transients.push_back(person.id);
  }

  ojson attraction = ojson::array();
  ojson venue_categories = ojson::object();
  std::set<CellIndex> outback_cells;
  std::vector<std::string> attraction_ids;
  for (std::size_t vi = 0; vi < venues.size(); ++vi) {
    const auto& v = venues[vi];
    venue_categories[v.id] = v.category;
    const auto it = venue_visitors.find(vi);
    const std::size_t visitors = it == venue_visitors.end() ? 0 : it->second.size();
    if (visitors >= config.attraction_min_visitors) {
      attraction_ids.push_back(v.id);
      if (v.outback) outback_cells.insert(cell_of(v.lat, v.lon, cs));
    }
  }
  std::sort(attraction_ids.begin(), attraction_ids.end());
  for (const auto& id : attraction_ids) attraction.push_back(id);
  ojson outback = ojson::array();
  for (const auto& c : outback_cells) outback.push_back({c.row, c.col});

  ojson truth;
  truth["config"] = ojson::parse(synth_config_to_json(config));
  truth["n_persons"] = persons.size();
  truth["n_locations"] = locations.size();
  truth["observation_window"] = {
      {"start", format_timestamp(config.start)},
      {"end", format_timestamp(config.start + Seconds{std::int64_t{config.days} * kDay - 1})}};
  truth["homes"] = std::move(homes);
  truth["transients"] = std::move(truth_transients);
  truth["true_edges_per_person"] = std::move(true_edges);
  truth["true_dwell_seconds_per_person"] = std::move(true_dwell);
  truth["attraction_venues"] = std::move(attraction);
  truth["injected_pingpong_pairs"] = injected_total;
  truth["injected_pingpong_pairs_per_person"] = std::move(pingpong_per_person);
  truth["venue_categories"] = std::move(venue_categories);
  truth["outback_cells"] = std::move(outback);

  std::ostringstream census;
  census << "#cell_size=" << ojson(cs).dump() << "\nrow,col,population\n";
  for (const auto& [cell, n] : census_homes)
    census << cell.row << ',' << cell.col << ','
           << ojson(config.census_per_home * static_cast<double>(n)).dump() << '\n';

  return {events.str(), truth.dump(2) + "\n", census.str()};
}

SynthConfig synth_config_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("synth config: not a JSON object");
  SynthConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "n_persons") c.n_persons = value.get<std::uint32_t>();
      else if (key == "transient_fraction") c.transient_fraction = value.get<double>();
      else if (key == "n_minor_venues") c.n_minor_venues = value.get<std::uint32_t>();
      else if (key == "attraction_min_visitors") c.attraction_min_visitors = value.get<std::uint32_t>();
      else if (key == "days") c.days = value.get<std::uint32_t>();
      else if (key == "start") {
        auto ts = value.is_string() ? parse_timestamp(value.get<std::string>())
                                    : std::optional<Timestamp>(Timestamp{Seconds{value.get<std::int64_t>()}});
        if (!ts) throw ConfigError("synth config: start is not a timestamp");
        c.start = *ts;
      } else if (key == "visit_probability") c.visit_probability = value.get<double>();
      else if (key == "max_stops") c.max_stops = value.get<std::uint32_t>();
      else if (key == "pingpong_injection_rate") c.pingpong_injection_rate = value.get<double>();
      else if (key == "noise") c.noise = value.get<double>();
      else if (key == "city_lat") c.city_lat = value.get<double>();
      else if (key == "city_lon") c.city_lon = value.get<double>();
      else if (key == "city_radius") c.city_radius = value.get<double>();
      else if (key == "outback_fraction") c.outback_fraction = value.get<double>();
      else if (key == "cell_size") c.cell_size = value.get<double>();
      else if (key == "census_per_home") c.census_per_home = value.get<double>();
      else if (key == "categories") {
        c.categories.clear();
        for (const auto& cat : value)
          c.categories.push_back({cat.at("name").get<std::string>(),
                                  cat.at("n_venues").get<std::uint32_t>(),
                                  cat.value("weight", 1.0)});
      } else {
        throw ConfigError("synth config: unknown field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  ojson j;
  j["seed"] = c.seed;
  j["n_persons"] = c.n_persons;
  j["transient_fraction"] = c.transient_fraction;
  j["categories"] = ojson::array();
  for (const auto& cat : c.categories)
    j["categories"].push_back({{"name", cat.name}, {"n_venues", cat.n_venues}, {"weight", cat.weight}});
  j["n_minor_venues"] = c.n_minor_venues;
  j["attraction_min_visitors"] = c.attraction_min_visitors;
  j["days"] = c.days;
  j["start"] = format_timestamp(c.start);
  j["visit_probability"] = c.visit_probability;
  j["max_stops"] = c.max_stops;
  j["pingpong_injection_rate"] = c.pingpong_injection_rate;
  j["noise"] = c.noise;
  j["city_lat"] = c.city_lat;
  j["city_lon"] = c.city_lon;
  j["city_radius"] = c.city_radius;
  j["outback_fraction"] = c.outback_fraction;
  j["cell_size"] = c.cell_size;
  j["census_per_home"] = c.census_per_home;
  return j.dump();
}

}  // namespace transdyn
