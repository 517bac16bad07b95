#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "transdyn/event.hpp"

namespace transdyn {

enum class InputFormat { jsonl, csv };

/// Throws ConfigError for anything but "jsonl" or "csv".
InputFormat parse_format(std::string_view tag);
std::string_view to_string(InputFormat format);

struct ParseOptions {
  InputFormat format = InputFormat::jsonl;
  ObservationWindow window{};
  /// Worker threads for record decoding; 0 picks TRANSIENT_DYN_THREADS or 1.
  unsigned threads = 0;
};

/// Reads mobility records. Malformed, out-of-range, out-of-window and exact
/// duplicate records go to `rejected`; only stream failures throw (IoError).
EventBatch parse_events(std::istream& input, const ParseOptions& options);

/// Reads several files as one logical stream. Line numbers run on across
/// files; each CSV file carries its own header. Throws IoError when a file
/// cannot be opened.
EventBatch parse_event_files(const std::vector<std::string>& paths, const ParseOptions& options);

/// Assigns cell tokens to venue-less events, sorts per person by
/// (timestamp, location_id), and drops (person, location, timestamp)
/// collisions created by the assignment. Output is independent of input order.
EventBatch canonicalize(EventBatch batch, double cell_size);

/// Writes the rejected-record report: CSV `line,reason`.
void write_rejected_csv(std::ostream& out, const EventBatch& batch);

/// Writes accepted events back out in the JSONL input schema.
void write_events_jsonl(std::ostream& out, const EventBatch& batch);

}  // namespace transdyn
