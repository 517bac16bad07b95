#include "transdyn/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <variant>

#include "json.hpp"

#include "transdyn/error.hpp"
#include "transdyn/geo.hpp"
#include "transdyn/parallel.hpp"

namespace transdyn {
namespace {

using json = nlohmann::json;

struct RawLine {
  std::string_view text;
  std::size_t line = 0;
  /// Index into the per-file CSV column maps; unused for JSONL.
  std::size_t file = 0;
};

/// Column positions of user,lat,lon,ts,venue,category; venue/category may be absent.
struct CsvColumns {
  int user = -1, lat = -1, lon = -1, ts = -1, venue = -1, category = -1;
  std::size_t width = 0;
};

using Decoded = std::variant<MobilityEvent, RejectedRecord>;

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

RejectedRecord reject(std::size_t line, std::string reason) { return {line, std::move(reason)}; }

/// Shared field validation once the record has been pulled apart.
Decoded finish(std::size_t line, std::string user, std::optional<double> lat,
               std::optional<double> lon, std::optional<Timestamp> ts, std::string venue,
               std::string category) {
  if (user.empty()) return reject(line, "missing user");
  if (!lat) return reject(line, "bad lat");
  if (!lon) return reject(line, "bad lon");
  if (!valid_lat(*lat)) return reject(line, "lat out of range");
  if (!valid_lon(*lon)) return reject(line, "lon out of range");
  if (!ts) return reject(line, "bad timestamp");
  MobilityEvent e;
  e.person_id = std::move(user);
  e.location_id = std::move(venue);
  e.lat = *lat;
  e.lon = *lon;
  e.timestamp = *ts;
  e.category = std::move(category);
  e.source_line = line;
  return e;
}

Decoded decode_jsonl(const RawLine& raw) {
  json obj = json::parse(raw.text, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) return reject(raw.line, "malformed json");

  std::string user;
  if (auto it = obj.find("user"); it != obj.end()) {
    if (!it->is_string()) return reject(raw.line, "missing user");
    user = it->get<std::string>();
  }
  auto number = [&](const char* key) -> std::optional<double> {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) return std::nullopt;
    const double v = it->get<double>();
    return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
  };
  std::optional<Timestamp> ts;
  if (auto it = obj.find("ts"); it != obj.end()) {
    if (it->is_string()) {
      ts = parse_timestamp(it->get_ref<const std::string&>());
    } else if (it->is_number_integer()) {
      ts = Timestamp{Seconds{it->get<std::int64_t>()}};
    }
  }
  auto optional_string = [&](const char* key, std::string& out) -> bool {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return true;
    if (!it->is_string()) return false;
    out = it->get<std::string>();
    return true;
  };
  std::string venue, category;
  if (!optional_string("venue", venue)) return reject(raw.line, "bad venue");
  if (!optional_string("category", category)) return reject(raw.line, "bad category");
  return finish(raw.line, std::move(user), number("lat"), number("lon"), ts, std::move(venue),
                std::move(category));
}

Decoded decode_csv(const RawLine& raw, const CsvColumns& cols) {
  auto fields = split_csv(raw.text);
  if (fields.size() != cols.width) return reject(raw.line, "wrong field count");
  auto at = [&](int idx) -> std::string { return idx < 0 ? std::string{} : fields[idx]; };
  return finish(raw.line, at(cols.user), parse_double(at(cols.lat)), parse_double(at(cols.lon)),
                parse_timestamp(at(cols.ts)), at(cols.venue), at(cols.category));
}

CsvColumns read_csv_header(std::string_view header) {
  CsvColumns cols;
  auto names = split_csv(header);
  cols.width = names.size();
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto& n = names[i];
    while (!n.empty() && n.back() == ' ') n.pop_back();
    while (!n.empty() && n.front() == ' ') n.erase(n.begin());
    const int idx = static_cast<int>(i);
    if (n == "user") cols.user = idx;
    else if (n == "lat") cols.lat = idx;
    else if (n == "lon") cols.lon = idx;
    else if (n == "ts") cols.ts = idx;
    else if (n == "venue") cols.venue = idx;
    else if (n == "category") cols.category = idx;
  }
  if (cols.user < 0 || cols.lat < 0 || cols.lon < 0 || cols.ts < 0)
    throw ConfigError("csv header must name user,lat,lon,ts[,venue,category]; got '" +
                      std::string(header) + "'");
  return cols;
}

/// Identity used for exact-duplicate detection before and after location
/// assignment. Venue-less records compare by coordinates.
bool same_identity(const MobilityEvent& a, const MobilityEvent& b) {
  if (a.person_id != b.person_id || a.timestamp != b.timestamp || a.location_id != b.location_id)
    return false;
  if (a.location_id.empty()) return a.lat == b.lat && a.lon == b.lon;
  return true;
}

void sort_and_dedup(EventBatch& batch) {
  std::sort(batch.events.begin(), batch.events.end(),
            [](const MobilityEvent& a, const MobilityEvent& b) {
              const auto ka = a.ordering_key();
              const auto kb = b.ordering_key();
              if (ka != kb) return ka < kb;
              return a.source_line < b.source_line;
            });
  std::vector<MobilityEvent> kept;
  kept.reserve(batch.events.size());
  for (auto& e : batch.events) {
    if (!kept.empty() && same_identity(kept.back(), e)) {
      batch.rejected.push_back(reject(e.source_line, "duplicate"));
    } else {
      kept.push_back(std::move(e));
    }
  }
  batch.events = std::move(kept);
  std::sort(batch.rejected.begin(), batch.rejected.end(),
            [](const RejectedRecord& a, const RejectedRecord& b) {
              return std::tie(a.line, a.reason) < std::tie(b.line, b.reason);
            });
}

void collect_lines(const std::string& buffer, InputFormat format,
                   std::size_t& line_no, std::vector<RawLine>& out,
                   std::vector<CsvColumns>& headers) {
  bool need_header = format == InputFormat::csv;
  std::size_t pos = 0;
  while (pos < buffer.size()) {
    std::size_t nl = buffer.find('\n', pos);
    if (nl == std::string::npos) nl = buffer.size();
    std::string_view text(buffer.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (line_no == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (need_header) {
      headers.push_back(read_csv_header(text));
      need_header = false;
      continue;
    }
    out.push_back({text, line_no, headers.empty() ? 0 : headers.size() - 1});
  }
  if (need_header) headers.push_back(CsvColumns{});
}

EventBatch decode_all(const std::vector<RawLine>& lines, const std::vector<CsvColumns>& headers,
                      const ParseOptions& options) {
  std::vector<std::optional<Decoded>> decoded(lines.size());
  parallel_chunks(lines.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      decoded[i] = options.format == InputFormat::jsonl
                       ? decode_jsonl(lines[i])
                       : decode_csv(lines[i], headers[lines[i].file]);
    }
  });

  EventBatch batch;
  batch.source_count = lines.size();
  batch.events.reserve(lines.size());
  for (auto& d : decoded) {
    if (auto* e = std::get_if<MobilityEvent>(&*d)) {
      if (!options.window.contains(e->timestamp)) {
        batch.rejected.push_back(reject(e->source_line, "out of window"));
      } else {
        batch.events.push_back(std::move(*e));
      }
    } else {
      batch.rejected.push_back(std::get<RejectedRecord>(std::move(*d)));
    }
  }
  sort_and_dedup(batch);
  return batch;
}

std::string slurp(std::istream& in, const std::string& name) {
  std::string buffer{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("failed reading " + name);
  return buffer;
}

}  // namespace

InputFormat parse_format(std::string_view tag) {
  if (tag == "jsonl") return InputFormat::jsonl;
  if (tag == "csv") return InputFormat::csv;
  throw ConfigError("unknown input format '" + std::string(tag) + "' (expected jsonl or csv)");
}

std::string_view to_string(InputFormat format) {
  return format == InputFormat::jsonl ? "jsonl" : "csv";
}

std::vector<PersonEvents> split_by_person(const std::vector<MobilityEvent>& events) {
  std::vector<PersonEvents> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= events.size(); ++i) {
    if (i == events.size() || events[i].person_id != events[begin].person_id) {
      out.emplace_back(events.data() + begin, i - begin);
      begin = i;
    }
  }
  return out;
}

EventBatch parse_events(std::istream& input, const ParseOptions& options) {
  if (!input) throw IoError("input stream is not readable");
  const std::string buffer = slurp(input, "input stream");
  std::vector<RawLine> lines;
  std::vector<CsvColumns> headers;
  std::size_t line_no = 0;
  collect_lines(buffer, options.format, line_no, lines, headers);
  return decode_all(lines, headers, options);
}

EventBatch parse_event_files(const std::vector<std::string>& paths, const ParseOptions& options) {
  std::vector<std::string> buffers;
  buffers.reserve(paths.size());
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file '" + path + "'");
    buffers.push_back(slurp(in, path));
  }
  std::vector<RawLine> lines;
  std::vector<CsvColumns> headers;
  std::size_t line_no = 0;
  for (std::size_t f = 0; f < buffers.size(); ++f)
    collect_lines(buffers[f], options.format, line_no, lines, headers);
  return decode_all(lines, headers, options);
}

EventBatch canonicalize(EventBatch batch, double cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw ConfigError("cell_size must be positive");
  for (auto& e : batch.events)
    if (e.location_id.empty()) e.location_id = cell_token(e.lat, e.lon, cell_size);
  sort_and_dedup(batch);
  return batch;
}

void write_rejected_csv(std::ostream& out, const EventBatch& batch) {
  out << "line,reason\n";
  for (const auto& r : batch.rejected) out << r.line << ',' << r.reason << '\n';
}

void write_events_jsonl(std::ostream& out, const EventBatch& batch) {
  for (const auto& e : batch.events) {
    json j;
    j["user"] = e.person_id;
    j["lat"] = e.lat;
    j["lon"] = e.lon;
    j["ts"] = format_timestamp(e.timestamp);
    if (!e.location_id.empty()) j["venue"] = e.location_id;
    if (!e.category.empty()) j["category"] = e.category;
    out << j.dump() << '\n';
  }
}

}  // namespace transdyn
