#include <algorithm>
#include <random>
#include <set>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "transdyn/error.hpp"
#include "transdyn/geo.hpp"
#include "transdyn/ingest.hpp"

using namespace transdyn;
using namespace transdyn::testing;

namespace {

std::string jsonl_line(const std::string& user, double lat, double lon, const std::string& ts,
                       const std::string& venue = {}) {
  std::ostringstream s;
  s << R"({"user":")" << user << R"(","lat":)" << lat << R"(,"lon":)" << lon << R"(,"ts":")" << ts
    << '"';
  if (!venue.empty()) s << R"(,"venue":")" << venue << '"';
  s << "}";
  return s.str();
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string dump(const EventBatch& b) {
  std::ostringstream s;
  write_events_jsonl(s, b);
  return s.str();
}

/// Random mixture of valid, venue-less, duplicate and broken records.
std::vector<std::string> random_lines(std::mt19937& rng, std::size_t n) {
  std::vector<std::string> lines;
  std::uniform_int_distribution<int> person(0, 5), venue(0, 4), minute(0, 600), kind(0, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = kind(rng);
    const std::string ts = format_timestamp(hm(0) + Seconds{minute(rng) * 60});
    const std::string user = "p" + std::to_string(person(rng));
    if (k == 0) {
      lines.push_back("{not json");
    } else if (k == 1 && !lines.empty()) {
      lines.push_back(lines[std::uniform_int_distribution<std::size_t>(0, lines.size() - 1)(rng)]);
    } else if (k <= 3) {
      const double lat = -33.9 + 0.01 * venue(rng);
      lines.push_back(jsonl_line(user, lat, 151.2, ts));
    } else {
      lines.push_back(jsonl_line(user, -33.87, 151.21, ts, "v" + std::to_string(venue(rng))));
    }
  }
  return lines;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("single jsonl record") {
    auto b = parse_string(
        R"({"user":"u1","lat":-33.86,"lon":151.21,"ts":"2016-03-01T09:00:00Z","venue":"v1"})");
    REQUIRE(b.events.size() == 1);
    CHECK(b.rejected.empty());
    CHECK(b.source_count == 1);
    CHECK(b.events[0].person_id == "u1");
    CHECK(b.events[0].location_id == "v1");
    CHECK(b.events[0].timestamp == at("2016-03-01T09:00:00Z"));
  }

  TEST_CASE("latitude out of range is rejected, not fatal") {
    auto b = parse_string(R"({"user":"u1","lat":123.0,"lon":151.21,"ts":"2016-03-01T09:00:00Z"})");
    CHECK(b.events.empty());
    REQUIRE(b.rejected.size() == 1);
    CHECK(b.rejected[0] == RejectedRecord{1, "lat out of range"});
  }

  TEST_CASE("reject reasons") {
    const std::string text =
        "{\"user\":\"u1\",\"lat\":1,\"lon\":181,\"ts\":\"2016-03-01T09:00:00Z\"}\n"
        "{\"user\":\"u1\",\"lat\":1,\"lon\":1,\"ts\":\"yesterday\"}\n"
        "{\"lat\":1,\"lon\":1,\"ts\":1}\n"
        "[1,2]\n"
        "\n"
        "{\"user\":\"u1\",\"lat\":\"x\",\"lon\":1,\"ts\":1}\n"
        "{\"user\":\"u1\",\"lat\":1,\"lon\":1,\"ts\":1456822800,\"venue\":7}\n";
    auto b = parse_string(text);
    CHECK(b.events.empty());
    CHECK(b.source_count == 6);
    std::vector<RejectedRecord> expect = {{1, "lon out of range"}, {2, "bad timestamp"},
                                          {3, "missing user"},      {4, "malformed json"},
                                          {6, "bad lat"},           {7, "bad venue"}};
    CHECK(b.rejected == expect);
  }

  TEST_CASE("epoch timestamps and optional nulls") {
    auto b = parse_string(
        R"({"user":"u","lat":0,"lon":0,"ts":1456822800,"venue":null,"category":"Pub"})");
    REQUIRE(b.events.size() == 1);
    CHECK(b.events[0].timestamp == at("2016-03-01T09:00:00Z"));
    CHECK(b.events[0].location_id.empty());
    CHECK(b.events[0].category == "Pub");
  }

  TEST_CASE("observation window") {
    ObservationWindow w{at("2016-03-01T00:00:00Z"), at("2016-03-01T23:59:59Z")};
    auto b = parse_string(jsonl_line("u", 0, 0, "2016-03-01T09:00:00Z", "a") + "\n" +
                              jsonl_line("u", 0, 0, "2016-03-02T09:00:00Z", "a") + "\n",
                          InputFormat::jsonl, w);
    CHECK(b.events.size() == 1);
    REQUIRE(b.rejected.size() == 1);
    CHECK(b.rejected[0] == RejectedRecord{2, "out of window"});
  }

  TEST_CASE("csv schema with empty optional columns and quoting") {
    const std::string text =
        "user,lat,lon,ts,venue,category\n"
        "u1,-33.86,151.21,2016-03-01T09:00:00Z,v1,Restaurant\n"
        "u1,-33.86,151.21,2016-03-01T10:00:00Z,,\n"
        "\"u,2\",-33.86,151.21,1456822800,\"v \"\"q\"\"\",\n"
        "u3,-33.86,151.21\n";
    auto b = parse_string(text, InputFormat::csv);
    REQUIRE(b.events.size() == 3);
    // "u,2" sorts before "u1".
    CHECK(b.events[0].person_id == "u,2");
    CHECK(b.events[0].location_id == "v \"q\"");
    CHECK(b.events[1].category == "Restaurant");
    CHECK(b.events[2].location_id.empty());
    CHECK(b.rejected == std::vector<RejectedRecord>{{5, "wrong field count"}});
    CHECK(b.source_count == 4);
  }

  TEST_CASE("csv without the required header columns is a config error") {
    CHECK_THROWS_AS(parse_string("a,b,c\n1,2,3\n", InputFormat::csv), ConfigError);
  }

  TEST_CASE("format tags and unreadable streams") {
    CHECK(parse_format("csv") == InputFormat::csv);
    CHECK_THROWS_AS(parse_format("xml"), ConfigError);
    std::istringstream broken;
    broken.setstate(std::ios::badbit);
    CHECK_THROWS_AS(parse_events(broken, {}), IoError);
    CHECK_THROWS_AS(parse_event_files({"/nonexistent/events.jsonl"}, {}), IoError);
  }

  TEST_CASE("1000 lines with 10 exact duplicates") {
    std::mt19937 rng(7);
    std::vector<std::string> lines;
    for (int i = 0; i < 990; ++i)
      lines.push_back(jsonl_line("u" + std::to_string(i % 37), -33.8 + 0.001 * (i % 11), 151.2,
                                 format_timestamp(hm(0) + Seconds{i * 61}),
                                 "v" + std::to_string(i % 13)));
    for (int i = 0; i < 10; ++i) lines.push_back(lines[static_cast<std::size_t>(i * 97)]);
    std::shuffle(lines.begin(), lines.end(), rng);

    // Independent count: distinct raw lines.
    const std::set<std::string> distinct(lines.begin(), lines.end());
    const std::size_t expected_unique = distinct.size();
    REQUIRE(expected_unique == 990);

    auto b = parse_string(join(lines));
    CHECK(b.source_count == 1000);
    CHECK(b.events.size() == expected_unique);
    CHECK(b.rejected.size() == lines.size() - expected_unique);
    for (const auto& r : b.rejected) CHECK(r.reason == "duplicate");
  }

  TEST_CASE("canonicalize keeps venues and derives cell tokens") {
    EventBatch b;
    b.events = {event("u", "v9", hm(9)), event("u", "", hm(10), -33.8601, 151.2102)};
    b.source_count = 2;
    auto c = canonicalize(b, 0.05);
    REQUIRE(c.events.size() == 2);
    CHECK(c.events[0].location_id == "v9");
    CHECK(c.events[1].location_id == "c:-678:3024");
    CHECK_THROWS_AS(canonicalize(b, 0.0), ConfigError);
  }

  TEST_CASE("cell tokens follow the floor convention on exact boundaries") {
    CHECK(cell_token(0.15, 0.0, 0.05) == "c:3:0");
    CHECK(cell_token(-0.05, -180.0, 0.05) == "c:-1:-3600");
    CHECK(cell_token(-0.0499, 0.0499, 0.05) == "c:-1:0");
  }

  TEST_CASE("collisions created by cell assignment are dropped as duplicates") {
    EventBatch b;
    b.events = {event("u", "", hm(9), -33.861, 151.211), event("u", "", hm(9), -33.862, 151.212)};
    b.source_count = 2;
    b.events[0].source_line = 1;
    b.events[1].source_line = 2;
    auto c = canonicalize(b, 0.05);
    CHECK(c.events.size() == 1);
    CHECK(c.events[0].lat == -33.862);
    CHECK(c.rejected == std::vector<RejectedRecord>{{1, "duplicate"}});
    CHECK(c.accepted_count() + c.rejected.size() == c.source_count);
  }

  TEST_CASE("same-timestamp ties order by location id") {
    auto b = batch_of({event("u", "zeta", hm(9)), event("u", "alpha", hm(9)), event("u", "mid", hm(8))});
    REQUIRE(b.events.size() == 3);
    CHECK(b.events[0].location_id == "mid");
    CHECK(b.events[1].location_id == "alpha");
    CHECK(b.events[2].location_id == "zeta");
  }

  TEST_CASE("property: permutation invariance, conservation, idempotence") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
      auto lines = random_lines(rng, 120);
      auto shuffled = lines;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);

      const auto a = canonicalize(parse_string(join(lines)), 0.05);
      const auto b = canonicalize(parse_string(join(shuffled)), 0.05);
      CHECK(a.events == b.events);
      CHECK(dump(a) == dump(b));
      CHECK(a.accepted_count() + a.rejected.size() == a.source_count);
      CHECK(b.accepted_count() + b.rejected.size() == b.source_count);

      const auto again = canonicalize(a, 0.05);
      CHECK(again.events == a.events);
      CHECK(again.rejected == a.rejected);

      for (std::size_t i = 1; i < a.events.size(); ++i) {
        const auto& p = a.events[i - 1];
        const auto& q = a.events[i];
        CHECK_FALSE(p.location_id.empty());
        if (p.person_id == q.person_id) {
          CHECK(p.timestamp <= q.timestamp);
          CHECK_FALSE((p.timestamp == q.timestamp && p.location_id == q.location_id));
        }
      }
    }
  }

  TEST_CASE("rejected report") {
    auto b = parse_string("oops\n");
    std::ostringstream s;
    write_rejected_csv(s, b);
    CHECK(s.str() == "line,reason\n1,malformed json\n");
  }

  TEST_CASE("multi-file input numbers lines across files") {
    const std::string dir = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp");
    const std::string a = dir + "/transdyn_ingest_a.csv";
    const std::string c = dir + "/transdyn_ingest_b.csv";
    {
      std::ofstream(a) << "user,lat,lon,ts\nu1,0,0,10\n";
      std::ofstream(c) << "user,lat,lon,ts,venue\nu1,0,0,20,v\nbad\n";
    }
    ParseOptions o;
    o.format = InputFormat::csv;
    auto b = parse_event_files({a, c}, o);
    CHECK(b.events.size() == 2);
    CHECK(b.rejected == std::vector<RejectedRecord>{{5, "wrong field count"}});
  }
}
