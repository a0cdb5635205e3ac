#include <doctest.h>

#include <cmath>
#include <string>

#include "landing/scenario.hpp"

using namespace landing;
using namespace landing::sim;

namespace {

const char* kBase = R"({
  "schema_version": 1,
  "id": "unit",
  "seed": 7,
  "duration_s": 30,
  "world": {"min_m": [-50, -50], "max_m": [50, 50]},
  "camera": {"focal_px": 400, "width_px": 320, "height_px": 240, "fps": 15},
  "drone": {"position_m": [1, 2], "altitude_m": 12},
  "obstacles": [{"footprint_m": [[0, 0], [2, 0], [2, 3], [0, 3]], "height_m": 4}],
  "movers": [{"start_m": [5, 5], "speed_kmh": 3.6, "heading_deg": 90, "radius_m": 0.6}],
  "mission": {"margin_rule": "signed", "velocity_window": 12}
})";

std::string field_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.field;
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("parses a full document") {
    const Scenario s = parse_scenario(kBase);
    CHECK(s.id == "unit");
    CHECK(s.seed == 7);
    CHECK(s.camera.width_px == 320);
    CHECK(s.camera.fps == 15);
    CHECK(s.drone.position_m.x == 1);
    CHECK(s.drone.altitude_m == 12);
    REQUIRE(s.obstacles.size() == 1);
    CHECK(s.obstacles[0].footprint_m.size() == 4);
    CHECK(s.obstacles[0].border_contrast == 90);
    CHECK(s.mission.margin_rule == decision::MarginRule::Signed);
    CHECK(s.mission.velocity_window == 12);
    CHECK(s.mission.margin_s == 20.0);
  }

  TEST_CASE("speed and heading become a velocity") {
    const Scenario s = parse_scenario(kBase);
    REQUIRE(s.movers.size() == 1);
    CHECK(s.movers[0].velocity_mps.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.movers[0].velocity_mps.y == doctest::Approx(1.0));
    CHECK(s.movers[0].speed_mps() * 3.6 == doctest::Approx(3.6));
  }

  TEST_CASE("errors name the offending field") {
    CHECK(field_of(replace(kBase, R"("radius_m": 0.6)", R"("radius_m": -1)")) == "movers[0].radius_m");
    CHECK(field_of(replace(kBase, R"("altitude_m": 12)", R"("altitude_m": "high")")) == "drone.altitude_m");
    CHECK(field_of(replace(kBase, R"("altitude_m": 12)", R"("height_m_": 1)")) == "drone.altitude_m");
    CHECK(field_of(replace(kBase, R"("schema_version": 1)", R"("schema_version": 2)")) == "schema_version");
    CHECK(field_of(replace(kBase, R"("margin_rule": "signed")", R"("margin_rule": "loose")")) ==
          "mission.margin_rule");
    CHECK(field_of(replace(kBase, R"("height_m": 4)", R"("height_m": 40)")) == "obstacles[0].height_m");
    CHECK(field_of(replace(kBase, R"("speed_kmh": 3.6)", R"("speed_kmh": 36)")) == "movers[0]");
    CHECK(field_of("[1, 2]") == "$");
    CHECK(field_of("{not json") == "$");
  }

  TEST_CASE("to_json round-trips") {
    const Scenario a = parse_scenario(kBase);
    const std::string text = to_json(a);
    const Scenario b = parse_scenario(text);
    CHECK(to_json(b) == text);
    CHECK(b.movers[0].velocity_mps.y == doctest::Approx(a.movers[0].velocity_mps.y));
    CHECK(b.obstacles[0].footprint_m == a.obstacles[0].footprint_m);
    CHECK(b.mission.margin_rule == a.mission.margin_rule);
  }

  TEST_CASE("shipped scenarios are valid") {
    for (const char* name : {"flat_empty", "speed_5kmh", "speed_10kmh", "speed_16kmh", "crossing"}) {
      CAPTURE(name);
      CHECK_NOTHROW(load_scenario(std::string(LANDING_SCENARIO_DIR) + "/" + name + ".json"));
    }
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ScenarioError);
  }
}
