#include "landing/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace landing::sim {

using nlohmann::json;
using nlohmann::ordered_json;

ScenarioError::ScenarioError(std::string field_path, const std::string& message)
    : std::runtime_error(field_path + ": " + message), field(std::move(field_path)) {}

namespace {

// Walks a JSON document while keeping the path for error messages.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  bool has(const char* key) const { return node_.contains(key); }

  Reader child(const char* key) const {
    if (!node_.contains(key)) throw ScenarioError(join(key), "missing required field");
    return {node_.at(key), join(key)};
  }

  double number(const char* key) const {
    const Reader c = child(key);
    if (!c.node_.is_number()) throw ScenarioError(c.path_, "expected a number");
    return c.node_.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  long long integer(const char* key) const {
    const Reader c = child(key);
    if (!c.node_.is_number_integer()) throw ScenarioError(c.path_, "expected an integer");
    return c.node_.get<long long>();
  }
  long long integer(const char* key, long long fallback) const { return has(key) ? integer(key) : fallback; }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Reader c = child(key);
    if (!c.node_.is_string()) throw ScenarioError(c.path_, "expected a string");
    return c.node_.get<std::string>();
  }

  Vec2 vec2(const char* key) const {
    const Reader c = child(key);
    return c.as_vec2();
  }
  Vec2 vec2(const char* key, Vec2 fallback) const { return has(key) ? vec2(key) : fallback; }

  Vec2 as_vec2() const {
    if (!node_.is_array() || node_.size() != 2 || !node_[0].is_number() || !node_[1].is_number()) {
      throw ScenarioError(path_, "expected [x, y] in meters");
    }
    return {node_[0].get<double>(), node_[1].get<double>()};
  }

  std::vector<Reader> items(const char* key) const {
    std::vector<Reader> out;
    if (!has(key)) return out;
    const Reader c = child(key);
    if (!c.node_.is_array()) throw ScenarioError(c.path_, "expected an array");
    for (std::size_t i = 0; i < c.node_.size(); ++i) {
      out.emplace_back(c.node_[i], c.path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  const std::string& path() const { return path_; }
  std::string join(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
};

void require(bool ok, const std::string& field, const char* message) {
  if (!ok) throw ScenarioError(field, message);
}

}  // namespace

void validate(const Scenario& s) {
  require(s.schema_version == kScenarioSchemaVersion, "schema_version", "unsupported schema version");
  require(s.duration_s > 0, "duration_s", "must be positive");
  require(s.world.min_m.x < s.world.max_m.x && s.world.min_m.y < s.world.max_m.y, "world", "empty extent");
  require(s.world.ground_intensity >= 0 && s.world.ground_intensity <= 255, "world.ground_intensity",
          "must be in [0, 255]");
  require(s.world.texture_amplitude >= 0, "world.texture_amplitude", "must be non-negative");
  require(s.world.texel_m > 0, "world.texel_m", "must be positive");
  require(s.camera.focal_px > 0, "camera.focal_px", "must be positive");
  require(s.camera.width_px >= 3 && s.camera.height_px >= 3, "camera", "image must be at least 3x3");
  require(s.camera.fps > 0, "camera.fps", "must be positive");
  require(s.camera.depth_scale > 0 && s.camera.depth_scale <= 1, "camera.depth_scale", "must be in (0, 1]");
  require(s.camera.depth_noise_m >= 0, "camera.depth_noise_m", "must be non-negative");
  require(s.drone.altitude_m > 0, "drone.altitude_m", "must be positive");
  require(s.drone.cruise_speed_mps > 0, "drone.cruise_speed_mps", "must be positive");
  require(s.drone.descent_speed_mps > 0, "drone.descent_speed_mps", "must be positive");
  require(s.drone.body_radius_m >= 0, "drone.body_radius_m", "must be non-negative");
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    const std::string p = "obstacles[" + std::to_string(i) + "]";
    require(s.obstacles[i].footprint_m.size() >= 3, p + ".footprint_m", "needs at least 3 vertices");
    require(s.obstacles[i].height_m >= 0, p + ".height_m", "must be non-negative");
    require(s.obstacles[i].height_m < s.drone.altitude_m, p + ".height_m", "must be below the drone");
  }
  for (std::size_t i = 0; i < s.movers.size(); ++i) {
    const std::string p = "movers[" + std::to_string(i) + "]";
    const Mover& m = s.movers[i];
    require(m.radius_m > 0, p + ".radius_m", "must be positive");
    for (double t : {0.0, s.duration_s}) {
      const Vec2 pos = m.start_m + m.velocity_mps * t;
      require(pos.x >= s.world.min_m.x && pos.x <= s.world.max_m.x && pos.y >= s.world.min_m.y &&
                  pos.y <= s.world.max_m.y,
              p, "leaves the world extent within duration_s");
    }
  }
  const MissionSpec& m = s.mission;
  require(m.scan_s > 0, "mission.scan_s", "must be positive");
  require(m.margin_s > 0, "mission.margin_s", "must be positive");
  require(m.min_area_m2 >= 0, "mission.min_area_m2", "must be non-negative");
  require(m.cluster_radius_px > 0, "mission.cluster_radius_px", "must be positive");
  require(m.diff_threshold > 0 && m.diff_threshold < 255, "mission.diff_threshold", "must be in (0, 255)");
  require(m.min_blob_px >= 1, "mission.min_blob_px", "must be at least 1");
  require(m.bridge_px >= 0, "mission.bridge_px", "must be non-negative");
  require(m.gate_px > 0, "mission.gate_px", "must be positive");
  require(m.velocity_window >= 2, "mission.velocity_window", "must be at least 2");
  require(m.slow_factor > 0 && m.slow_factor <= 1, "mission.slow_factor", "must be in (0, 1]");
  require(m.tof_rel_tol > 0 && m.tof_rel_tol < 1, "mission.tof_rel_tol", "must be in (0, 1)");
  require(m.touchdown_altitude_m >= 0, "mission.touchdown_altitude_m", "must be non-negative");
}

Scenario parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("$", "scenario must be a JSON object");
  const Reader root(doc, "");

  Scenario s;
  s.schema_version = static_cast<int>(root.integer("schema_version"));
  if (s.schema_version != kScenarioSchemaVersion) {
    throw ScenarioError("schema_version", "unsupported schema version " + std::to_string(s.schema_version));
  }
  s.id = root.string("id", s.id);
  {
    const long long seed = root.integer("seed", 0);
    require(seed >= 0, "seed", "must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  s.duration_s = root.number("duration_s", s.duration_s);

  if (root.has("world")) {
    const Reader w = root.child("world");
    s.world.min_m = w.vec2("min_m", s.world.min_m);
    s.world.max_m = w.vec2("max_m", s.world.max_m);
    s.world.ground_intensity = static_cast<int>(w.integer("ground_intensity", s.world.ground_intensity));
    s.world.texture_amplitude = w.number("texture_amplitude", s.world.texture_amplitude);
    s.world.texel_m = w.number("texel_m", s.world.texel_m);
  }
  if (root.has("camera")) {
    const Reader c = root.child("camera");
    s.camera.focal_px = c.number("focal_px", s.camera.focal_px);
    s.camera.width_px = static_cast<int>(c.integer("width_px", s.camera.width_px));
    s.camera.height_px = static_cast<int>(c.integer("height_px", s.camera.height_px));
    s.camera.fps = c.number("fps", s.camera.fps);
    s.camera.depth_scale = c.number("depth_scale", s.camera.depth_scale);
    s.camera.depth_noise_m = c.number("depth_noise_m", s.camera.depth_noise_m);
  }
  {
    const Reader d = root.child("drone");
    s.drone.position_m = d.vec2("position_m", s.drone.position_m);
    s.drone.altitude_m = d.number("altitude_m");
    s.drone.cruise_speed_mps = d.number("cruise_speed_mps", s.drone.cruise_speed_mps);
    s.drone.descent_speed_mps = d.number("descent_speed_mps", s.drone.descent_speed_mps);
    s.drone.body_radius_m = d.number("body_radius_m", s.drone.body_radius_m);
  }
  for (const Reader& o : root.items("obstacles")) {
    Obstacle ob;
    for (const Reader& v : o.items("footprint_m")) ob.footprint_m.push_back(v.as_vec2());
    if (!o.has("footprint_m")) throw ScenarioError(o.join("footprint_m"), "missing required field");
    ob.height_m = o.number("height_m", 0.0);
    ob.border_contrast = static_cast<int>(o.integer("border_contrast", ob.border_contrast));
    s.obstacles.push_back(std::move(ob));
  }
  for (const Reader& m : root.items("movers")) {
    Mover mv;
    mv.start_m = m.vec2("start_m");
    if (m.has("velocity_mps")) {
      mv.velocity_mps = m.vec2("velocity_mps");
    } else if (m.has("speed_kmh")) {
      const double speed = m.number("speed_kmh") / 3.6;
      const double heading = m.number("heading_deg", 0.0) * std::numbers::pi / 180.0;
      mv.velocity_mps = {speed * std::cos(heading), speed * std::sin(heading)};
    } else {
      throw ScenarioError(m.join("velocity_mps"), "missing velocity_mps or speed_kmh");
    }
    mv.radius_m = m.number("radius_m", mv.radius_m);
    mv.contrast = static_cast<int>(m.integer("contrast", mv.contrast));
    s.movers.push_back(mv);
  }
  if (root.has("mission")) {
    const Reader m = root.child("mission");
    MissionSpec& ms = s.mission;
    ms.scan_s = m.number("scan_s", ms.scan_s);
    ms.margin_s = m.number("margin_s", ms.margin_s);
    const std::string rule = m.string("margin_rule", "absolute");
    if (rule == "absolute") {
      ms.margin_rule = decision::MarginRule::Absolute;
    } else if (rule == "signed") {
      ms.margin_rule = decision::MarginRule::Signed;
    } else {
      throw ScenarioError(m.join("margin_rule"), "expected \"absolute\" or \"signed\"");
    }
    ms.min_area_m2 = m.number("min_area_m2", ms.min_area_m2);
    ms.cluster_radius_px = m.number("cluster_radius_px", ms.cluster_radius_px);
    ms.diff_threshold = static_cast<int>(m.integer("diff_threshold", ms.diff_threshold));
    ms.min_blob_px = static_cast<int>(m.integer("min_blob_px", ms.min_blob_px));
    ms.bridge_px = static_cast<int>(m.integer("bridge_px", ms.bridge_px));
    ms.gate_px = m.number("gate_px", ms.gate_px);
    ms.velocity_window = static_cast<int>(m.integer("velocity_window", ms.velocity_window));
    ms.static_floor_mps = m.number("static_floor_mps", ms.static_floor_mps);
    ms.slow_factor = m.number("slow_factor", ms.slow_factor);
    ms.descent_hold_floor_m = m.number("descent_hold_floor_m", ms.descent_hold_floor_m);
    ms.tof_rel_tol = m.number("tof_rel_tol", ms.tof_rel_tol);
    ms.touchdown_altitude_m = m.number("touchdown_altitude_m", ms.touchdown_altitude_m);
    ms.nudge_speed_mps = m.number("nudge_speed_mps", ms.nudge_speed_mps);
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("$", "cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string to_json(const Scenario& s) {
  auto v2 = [](Vec2 v) { return ordered_json::array({v.x, v.y}); };
  ordered_json j;
  j["schema_version"] = s.schema_version;
  j["id"] = s.id;
  j["seed"] = s.seed;
  j["duration_s"] = s.duration_s;
  j["world"] = {{"min_m", v2(s.world.min_m)},
                {"max_m", v2(s.world.max_m)},
                {"ground_intensity", s.world.ground_intensity},
                {"texture_amplitude", s.world.texture_amplitude},
                {"texel_m", s.world.texel_m}};
  j["camera"] = {{"focal_px", s.camera.focal_px}, {"width_px", s.camera.width_px},
                 {"height_px", s.camera.height_px}, {"fps", s.camera.fps},
                 {"depth_scale", s.camera.depth_scale}, {"depth_noise_m", s.camera.depth_noise_m}};
  j["drone"] = {{"position_m", v2(s.drone.position_m)},
                {"altitude_m", s.drone.altitude_m},
                {"cruise_speed_mps", s.drone.cruise_speed_mps},
                {"descent_speed_mps", s.drone.descent_speed_mps},
                {"body_radius_m", s.drone.body_radius_m}};
  j["obstacles"] = ordered_json::array();
  for (const Obstacle& o : s.obstacles) {
    ordered_json fp = ordered_json::array();
    for (Vec2 v : o.footprint_m) fp.push_back(v2(v));
    j["obstacles"].push_back(
        {{"footprint_m", fp}, {"height_m", o.height_m}, {"border_contrast", o.border_contrast}});
  }
  j["movers"] = ordered_json::array();
  for (const Mover& m : s.movers) {
    j["movers"].push_back({{"start_m", v2(m.start_m)},
                           {"velocity_mps", v2(m.velocity_mps)},
                           {"radius_m", m.radius_m},
                           {"contrast", m.contrast}});
  }
  const MissionSpec& m = s.mission;
  j["mission"] = {{"scan_s", m.scan_s},
                  {"margin_s", m.margin_s},
                  {"margin_rule", m.margin_rule == decision::MarginRule::Absolute ? "absolute" : "signed"},
                  {"min_area_m2", m.min_area_m2},
                  {"cluster_radius_px", m.cluster_radius_px},
                  {"diff_threshold", m.diff_threshold},
                  {"min_blob_px", m.min_blob_px},
                  {"bridge_px", m.bridge_px},
                  {"gate_px", m.gate_px},
                  {"velocity_window", m.velocity_window},
                  {"static_floor_mps", m.static_floor_mps},
                  {"slow_factor", m.slow_factor},
                  {"descent_hold_floor_m", m.descent_hold_floor_m},
                  {"tof_rel_tol", m.tof_rel_tol},
                  {"touchdown_altitude_m", m.touchdown_altitude_m},
                  {"nudge_speed_mps", m.nudge_speed_mps}};
  return j.dump(2) + "\n";
}

}  // namespace landing::sim
