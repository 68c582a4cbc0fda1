#include <doctest.h>

#include <sstream>

#include "lipwidth/json_io.hpp"
#include "lipwidth/metric.hpp"
#include "lipwidth/report.hpp"

using namespace lipwidth;
using nlohmann::json;

namespace {

json small_set() {
  return {{"space", {{"norm", "l2"}, {"dim", 2}}},
          {"points", {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}}}};
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("unknown fields are rejected") {
    CHECK_THROWS_AS(parse_config({{"command", "entropy"}, {"target", small_set()}, {"bogus", 1}}),
                    PreconditionError);
    CHECK_THROWS_AS(parse_config({{"command", "entropy"}, {"target", small_set()}, {"params", {{"k", 1}}}}),
                    PreconditionError);
    CHECK_THROWS_AS(parse_config({{"command", "entropy"}, {"target", small_set()}, {"output", {{"where", "x"}}}}),
                    PreconditionError);
    json bad_set = small_set();
    bad_set["extra"] = true;
    CHECK_THROWS_AS(set_from_json(bad_set), PreconditionError);
  }

  TEST_CASE("empty and malformed configs are errors") {
    CHECK_THROWS_AS(parse_config(json::object()), PreconditionError);
    CHECK_THROWS_AS(parse_config(json::array()), PreconditionError);
    CHECK_THROWS_AS(parse_config({{"command", "fly"}}), PreconditionError);
    CHECK_THROWS_AS(parse_config({{"command", "entropy"}}), PreconditionError);
    CHECK_THROWS_AS(parse_config({{"command", "case-study"}, {"target", 3}}), PreconditionError);
  }

  TEST_CASE("config echo") {
    const auto c = parse_config({{"command", "entropy"}, {"target", small_set()}, {"seed", 9}, {"workers", 2}});
    CHECK(c.seed == 9);
    CHECK(c.workers == 2);
    const json echo = c.to_json();
    CHECK(echo["command"] == "entropy");
    CHECK(echo["seed"] == 9);
  }

  TEST_CASE("entropy run is canonical and deterministic") {
    const auto c = parse_config({{"command", "entropy"}, {"target", small_set()}, {"params", {{"n_max", 2}}}});
    const auto a = run(c), b = run(c);
    CHECK(a.pass());
    CHECK(a.exit_code() == ExitCode::Pass);
    CHECK(canonical_dump(a.canonical()) == canonical_dump(b.canonical()));
    CHECK_FALSE(a.canonical().contains("wall_clock_seconds"));
    CHECK(a.to_json().contains("wall_clock_seconds"));
    CHECK(a.results["entropy"].size() == 3);
  }

  TEST_CASE("CSV table") {
    const auto c = parse_config({{"command", "entropy"}, {"target", small_set()}, {"params", {{"n_max", 1}}}});
    const std::string csv = run(c).csv();
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "n,reference,computed_lower,computed_upper");
    std::size_t rows = 0;
    while (std::getline(in, row))
      if (!row.empty()) ++rows;
    CHECK(rows == 2);
  }

  TEST_CASE("a failing audit yields the violation exit code") {
    RunReport r;
    r.audits.push_back({{"name", "x"}, {"pass", false}});
    CHECK(r.exit_code() == ExitCode::Violation);
    r.failure = "boom";
    CHECK(r.exit_code() == ExitCode::Numeric);
  }

  TEST_CASE("canonical doubles") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(json::parse(canonical_dump(json{{"b", 1}, {"a", 0.25}})) == json{{"a", 0.25}, {"b", 1}});
  }

  TEST_CASE("sets round trip") {
    const FiniteSet s = set_from_json(small_set());
    CHECK(set_to_json(s)["points"] == small_set()["points"]);
    CHECK(s.size() == 5);
  }

  TEST_CASE("every known command has a runner") {
    for (const auto& name : known_commands()) CHECK_FALSE(name.empty());
    CHECK(known_commands().size() == 8);
  }
}
