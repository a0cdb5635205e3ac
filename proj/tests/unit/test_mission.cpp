#include <doctest.h>

#include <set>
#include <string>

#include "landing/mission.hpp"

using namespace landing;
using namespace landing::mission;

namespace {

sim::Scenario scenario(const char* name) {
  return sim::load_scenario(std::string(LANDING_SCENARIO_DIR) + "/" + name + ".json");
}

}  // namespace

TEST_SUITE("mission") {
  TEST_CASE("empty field lands under the start position") {
    const MissionResult r = run_mission(scenario("flat_empty"));
    CHECK(r.outcome == Outcome::Landed);
    CHECK(exit_code(r.outcome) == 0);
    REQUIRE(r.touchdown_m);
    CHECK(distance(*r.touchdown_m, Vec2{0, 0}) < 0.5);
    CHECK(r.touchdown_inside_target);
    CHECK(r.touchdown_footprint_clear);
    REQUIRE_FALSE(r.descent.empty());
    CHECK(r.descent.back().maneuver == descent::Maneuver::Touchdown);
  }

  TEST_CASE("a mover keeps one track id through the scan") {
    const MissionResult r = run_mission(scenario("speed_10kmh"));
    REQUIRE(r.movers.size() == 1);
    std::set<int> ids;
    for (const TrackRow& t : r.tracks) ids.insert(t.track_id);
    CHECK(ids.size() == 1);
    CHECK(r.movers[0].samples >= r.scenario.mission.velocity_window);
  }

  TEST_CASE("reports are deterministic") {
    const sim::Scenario s = scenario("flat_empty");
    const MissionResult a = run_mission(s);
    const MissionResult b = run_mission(s);
    CHECK(report_json(a) == report_json(b));
    CHECK(decision_csv(a) == decision_csv(b));
    CHECK(descent_csv(a) == descent_csv(b));
  }

  TEST_CASE("no zone large enough ends without landing") {
    Overrides o;
    o.min_area_m2 = 1000.0;
    const MissionResult r = run_mission(apply(scenario("flat_empty"), o));
    CHECK(r.outcome == Outcome::NoPlz);
    CHECK(exit_code(r.outcome) == 2);
    CHECK_FALSE(r.touchdown_m);
  }

  TEST_CASE("overrides replace scenario values") {
    Overrides o;
    o.seed = 99;
    o.margin_s = 5.0;
    o.fps = 10.0;
    const sim::Scenario s = apply(scenario("flat_empty"), o);
    CHECK(s.seed == 99);
    CHECK(s.mission.margin_s == 5.0);
    CHECK(s.camera.fps == 10.0);
  }

  TEST_CASE("CSV headers") {
    const MissionResult r = run_mission(scenario("flat_empty"));
    CHECK(decision_csv(r).rfind("frame_index,phase,target_plz_id,t_d,min_margin,verdict,truth_margin\n", 0) == 0);
    CHECK(descent_csv(r).rfind("tick,altitude,x,y,q0,q1,q2,q3,chosen,tof_range,consistency,maneuver\n", 0) == 0);
    CHECK(plz_csv(r).rfind("frame_id,center_row,center_col,diameter_px,diameter_m,area_m2,admitted\n", 0) == 0);
  }
}
