#include <filesystem>
#include <fstream>
#include <random>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "transdyn/base_location.hpp"
#include "transdyn/error.hpp"

using namespace transdyn;
using namespace transdyn::testing;

TEST_SUITE("base_location") {
  TEST_CASE("single location gives full confidence") {
    std::vector<MobilityEvent> ev;
    for (int i = 0; i < 10; ++i) ev.push_back(event("u", "home1", hm(0) + Seconds{i * 7200}));
    auto b = batch_of(ev);
    auto a = infer_base(b.events);
    CHECK(a.base_location == "home1");
    CHECK(a.support == 10);
    CHECK(a.confidence == 1.0);
  }

  TEST_CASE("night modal rule") {
    std::vector<MobilityEvent> ev;
    for (int h : {22, 23, 0, 2, 4, 5}) ev.push_back(event("u", "A", hm(h)));
    for (int m : {0, 10, 20, 30}) ev.push_back(event("u", "B", hm(12, m)));
    auto b = batch_of(ev);
    auto a = infer_base(b.events, HourWindow{21, 6});
    CHECK(a.base_location == "A");
    CHECK(a.support == 6);
    CHECK(a.confidence == 0.6);
  }

  TEST_CASE("fallback to overall mode without night events") {
    auto b = batch_of({event("u", "A", hm(9)), event("u", "B", hm(10)), event("u", "B", hm(11))});
    auto a = infer_base(b.events);
    CHECK(a.base_location == "B");
    CHECK(a.support == 2);
  }

  TEST_CASE("ties go to longer dwell, then smaller id") {
    // A: one run spanning 1h; B: one run spanning 2h.
    auto b = batch_of({event("u", "A", hm(9)), event("u", "A", hm(10)), event("u", "B", hm(11)),
                       event("u", "B", hm(13))});
    CHECK(infer_base(b.events).base_location == "B");
    auto c = batch_of({event("u", "Z", hm(9)), event("u", "Y", hm(10))});
    CHECK(infer_base(c.events).base_location == "Y");
  }

  TEST_CASE("empty sequence") {
    CHECK_THROWS_WITH_AS(infer_base({}), "no events for person", DataError);
  }

  TEST_CASE("overrides win and recompute support") {
    auto b = batch_of({event("u", "A", hm(1)), event("u", "A", hm(2)), event("u", "B", hm(12)),
                       event("w", "C", hm(1))});
    auto bases = assign_bases(b, {}, BaseMap{{"u", "B"}});
    CHECK(bases.at("u").base_location == "B");
    CHECK(bases.at("u").support == 1);
    CHECK(bases.at("u").confidence == doctest::Approx(1.0 / 3.0));
    CHECK(bases.at("w").base_location == "C");
  }

  TEST_CASE("override file") {
    const std::string path = (std::filesystem::temp_directory_path() / "transdyn_bases_test.csv").string();
    std::ofstream(path) << "user,base_location\nu1,home1\r\nu2,c:1:2\n";
    auto m = read_base_overrides(path);
    CHECK(m.size() == 2);
    CHECK(m.at("u2") == "c:1:2");
    std::ofstream(path) << "person,base\n";
    CHECK_THROWS_AS(read_base_overrides(path), ConfigError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_base_overrides("/nonexistent.csv"), IoError);
  }

  TEST_CASE("property: determinism, exact confidence, monotone support") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> loc(0, 3), minute(0, 3 * 24 * 60);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<MobilityEvent> ev;
      const int n = 1 + trial % 25;
      for (int i = 0; i < n; ++i)
        ev.push_back(event("u", "L" + std::to_string(loc(rng)), hm(0) + Seconds{minute(rng) * 60}));
      auto b = batch_of(ev);
      const auto a = infer_base(b.events);
      CHECK(a == infer_base(b.events));
      CHECK(a.confidence == static_cast<double>(a.support) / static_cast<double>(b.events.size()));
      CHECK(a.confidence >= 0.0);
      CHECK(a.confidence <= 1.0);
      bool present = false;
      for (const auto& e : b.events) present = present || e.location_id == a.base_location;
      CHECK(present);

      auto grown = ev;
      for (int k = 0; k < 3; ++k)
        grown.push_back(event("u", a.base_location, hm(0) + Seconds{minute(rng) * 60 + 7}));
      auto g = batch_of(grown);
      CHECK(infer_base(g.events).base_location == a.base_location);
    }
  }
}
