#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "transdyn/cli.hpp"
#include "transdyn/synth.hpp"

using namespace transdyn;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("transdyn_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
  std::vector<const char*> argv{"transdyn"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("synth then run writes every report") {
    Scratch s("cli_run");
    REQUIRE(invoke({"synth", "--out", s / "synth", "--persons", "30", "--transient-fraction", "0.5"}) == 0);
    REQUIRE(invoke({"run", "--input", s / "synth/events.jsonl", "--census", s / "synth/census.csv",
                    "--out", s / "out"}) == 0);
    for (const auto& f : cli::run_output_files()) CHECK(fs::exists(s / ("out/" + f)));
    const auto summary = nlohmann::json::parse(slurp(s / "out/summary.json"));
    for (const char* key : {"N", "eta", "gamma", "W", "theta_seconds"}) CHECK(summary.contains(key));
    const auto manifest = nlohmann::json::parse(slurp(s / "out/run_manifest.json"));
    for (const char* key : {"input", "format", "beta", "pingpong_window_minutes", "max_dwell_cap_hours",
                            "cell_size", "night_window", "min_unique_visitors", "absent_threshold",
                            "census", "bases", "out", "seed"})
      CHECK(manifest["config"].contains(key));
    CHECK(slurp(s / "out/profiles.csv").rfind("user,base,raw_edges,suppressed_edges,M,is_transient\n", 0) == 0);
  }

  TEST_CASE("missing input exits 1 and leaves nothing behind") {
    Scratch s("cli_missing");
    CHECK(invoke({"run", "--input", s / "nope.jsonl", "--out", s / "out"}) == 1);
    CHECK_FALSE(fs::exists(s / "out"));
  }

  TEST_CASE("bad flags exit 1") {
    Scratch s("cli_flags");
    std::ofstream(s / "e.jsonl") << "{}\n";
    CHECK(invoke({"run", "--input", s / "e.jsonl", "--out", s / "o", "--beta", "0"}) == 1);
    CHECK(invoke({"run", "--input", s / "e.jsonl", "--out", s / "o", "--format", "xml"}) == 1);
    CHECK(invoke({"run", "--input", s / "e.jsonl", "--out", s / "o", "--night-window", "9"}) == 1);
    CHECK(invoke({"frobnicate"}) == 1);
    CHECK_FALSE(fs::exists(s / "o/summary.json"));
  }

  TEST_CASE("census with a different grid is fatal") {
    Scratch s("cli_census");
    REQUIRE(invoke({"synth", "--out", s / "synth", "--persons", "10", "--transient-fraction", "0.5"}) == 0);
    std::ofstream(s / "census.csv") << "#cell_size=0.1\nrow,col,population\n1,1,5\n";
    CHECK(invoke({"run", "--input", s / "synth/events.jsonl", "--census", s / "census.csv", "--out",
                  s / "out"}) == 1);
    CHECK_FALSE(fs::exists(s / "out/summary.json"));
  }

  TEST_CASE("empty accepted input exits 2") {
    Scratch s("cli_empty");
    std::ofstream(s / "e.jsonl") << "{\"user\":\"u\",\"lat\":99,\"lon\":0,\"ts\":1}\n";
    CHECK(invoke({"run", "--input", s / "e.jsonl", "--out", s / "o"}) == 2);
    CHECK(slurp(s / "o/rejected.csv") == "line,reason\n1,lat out of range\n");
    CHECK_FALSE(fs::exists(s / "o/summary.json"));
  }

  TEST_CASE("oracle size guard and empty input") {
    Scratch s("cli_oracle");
    REQUIRE(invoke({"synth", "--out", s / "big", "--persons", "1000", "--transient-fraction", "0.1"}) == 0);
    CHECK(invoke({"oracle", "--input", s / "big/events.jsonl"}) == 3);
    std::ofstream(s / "empty.jsonl") << "";
    std::string text;
    REQUIRE(invoke({"oracle", "--input", s / "empty.jsonl"}, &text) == 0);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["W"] == 0.0);
    CHECK(j["theta_seconds"] == 0);
  }

  TEST_CASE("oracle agrees with run on a 10-person instance") {
    Scratch s("cli_agree");
    REQUIRE(invoke({"synth", "--out", s / "syn", "--persons", "10", "--transient-fraction", "0.6",
                    "--pingpong-rate", "0.3", "--seed", "4"}) == 0);
    REQUIRE(invoke({"run", "--input", s / "syn/events.jsonl", "--out", s / "out"}) == 0);
    REQUIRE(invoke({"oracle", "--input", s / "syn/events.jsonl", "--out", s / "oracle.json"}) == 0);
    CHECK(nlohmann::json::parse(slurp(s / "out/summary.json")) ==
          nlohmann::json::parse(slurp(s / "oracle.json")));
  }

  TEST_CASE("csv input and base overrides") {
    Scratch s("cli_csv");
    std::ofstream(s / "e.csv") << "user,lat,lon,ts,venue,category\n"
                                  "u1,-33.86,151.21,2016-03-01T02:00:00Z,home,\n"
                                  "u1,-33.80,151.20,2016-03-01T10:00:00Z,,\n"
                                  "u1,-33.86,151.21,2016-03-01T12:00:00Z,home,\n";
    std::ofstream(s / "b.csv") << "user,base_location\nu1,c:-676:3024\n";
    REQUIRE(invoke({"run", "--input", s / "e.csv", "--format", "csv", "--bases", s / "b.csv", "--out",
                    s / "out"}) == 0);
    CHECK(slurp(s / "out/profiles.csv") ==
          "user,base,raw_edges,suppressed_edges,M,is_transient\nu1,c:-676:3024,2,2,2,1\n");
  }
}
