#include <functional>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "transdyn/error.hpp"
#include "transdyn/ingest.hpp"
#include "transdyn/pipeline.hpp"
#include "transdyn/synth.hpp"

using namespace transdyn;

namespace {

EventBatch load(const SynthOutput& out) {
  std::istringstream in(out.events_jsonl);
  return canonicalize(parse_events(in, {}), 0.05);
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("same config and seed give byte-identical output") {
    SynthConfig c;
    c.n_persons = 30;
    c.pingpong_injection_rate = 0.3;
    c.noise = 0.2;
    const auto a = generate(c);
    const auto b = generate(c);
    CHECK(a.events_jsonl == b.events_jsonl);
    CHECK(a.ground_truth_json == b.ground_truth_json);
    CHECK(a.census_csv == b.census_csv);
  }

  TEST_CASE("distinct seeds give distinct event sets") {
    std::set<std::size_t> hashes;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SynthConfig c;
      c.seed = seed;
      c.n_persons = 20;
      hashes.insert(std::hash<std::string>{}(generate(c).events_jsonl));
    }
    CHECK(hashes.size() == 10);
  }

  TEST_CASE("no transients") {
    SynthConfig c;
    c.n_persons = 25;
    c.transient_fraction = 0.0;
    const auto out = generate(c);
    const auto truth = nlohmann::json::parse(out.ground_truth_json);
    CHECK(truth["transients"].empty());
    CHECK(truth["attraction_venues"].empty());
    auto r = run_pipeline(load(out), PipelineConfig{});
    CHECK(r.population.eta == 0);
    CHECK(r.W == 0.0);
    CHECK(r.population.N == 25);
  }

  TEST_CASE("injected ping-pong pairs are exactly the pairs the filter removes") {
    SynthConfig c;
    c.seed = 3;
    c.n_persons = 80;
    c.transient_fraction = 0.5;
    c.pingpong_injection_rate = 0.2;
    const auto out = generate(c);
    const auto truth = nlohmann::json::parse(out.ground_truth_json);
    const auto injected = truth["injected_pingpong_pairs"].get<std::uint64_t>();
    CHECK(injected > 0);

    PipelineConfig cfg;
    cfg.params.pingpong_window = Seconds{15 * 60};
    auto r = run_pipeline(load(out), cfg);
    std::uint64_t raw = 0, kept = 0;
    for (const auto& p : r.profiles) {
      raw += p.raw_edge_count;
      kept += p.suppressed_edge_count;
      CHECK(p.suppressed_edge_count == truth["true_edges_per_person"][p.person_id].get<std::uint64_t>());
      CHECK(p.raw_edge_count - p.suppressed_edge_count ==
            2 * truth["injected_pingpong_pairs_per_person"][p.person_id].get<std::uint64_t>());
    }
    CHECK((raw - kept) / 2 == injected);
  }

  TEST_CASE("ground truth is recoverable from the emitted events") {
    SynthConfig c;
    c.seed = 12;
    c.n_persons = 50;
    c.transient_fraction = 0.4;
    const auto out = generate(c);
    const auto truth = nlohmann::json::parse(out.ground_truth_json);
    PipelineConfig cfg;
    cfg.params.pingpong_window = Seconds{0};
    auto r = run_pipeline(load(out), cfg);
    for (const auto& p : r.profiles)
      CHECK(p.raw_edge_count == truth["true_edges_per_person"][p.person_id].get<std::uint64_t>());
    CHECK(r.population.gamma == truth["n_locations"].get<std::uint64_t>());
    CHECK(r.population.N == truth["n_persons"].get<std::uint64_t>());
  }

  TEST_CASE("invalid config names the field") {
    SynthConfig c;
    c.noise = 1.5;
    CHECK_THROWS_WITH_AS(generate(c), doctest::Contains("noise"), ConfigError);
    c = SynthConfig{};
    c.max_stops = 4;
    CHECK_THROWS_WITH_AS(generate(c), doctest::Contains("max_stops"), ConfigError);
    c = SynthConfig{};
    c.n_persons = 3;
    c.transient_fraction = 1.0;
    c.days = 1;
    CHECK_THROWS_WITH_AS(generate(c), doctest::Contains("days"), ConfigError);
    CHECK_THROWS_WITH_AS(synth_config_from_json(R"({"persons": 3})"), doctest::Contains("persons"),
                         ConfigError);
  }

  TEST_CASE("config json round trip") {
    SynthConfig c;
    c.seed = 99;
    c.categories = {{"Cafe", 2, 0.7}};
    c.noise = 0.25;
    const auto back = synth_config_from_json(synth_config_to_json(c));
    CHECK(back.seed == 99);
    REQUIRE(back.categories.size() == 1);
    CHECK(back.categories[0].name == "Cafe");
    CHECK(back.noise == 0.25);
    CHECK(synth_config_to_json(back) == synth_config_to_json(c));
  }

  TEST_CASE("census covers every home cell") {
    SynthConfig c;
    c.n_persons = 40;
    const auto out = generate(c);
    std::istringstream in(out.census_csv);
    const auto census = parse_census(in);
    CHECK(census.cell_size == 0.05);
    double total = 0.0;
    for (const auto& [cell, pop] : census.population) total += pop;
    CHECK(total == 40 * c.census_per_home);
  }
}
