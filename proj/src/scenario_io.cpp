#include "motm/scenario_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace motm {

using nlohmann::json;

namespace {

json point(Vec2 p) { return json::array({p.x, p.y}); }

Vec2 read_point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::runtime_error(std::string("scenario: '") + what + "' must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("scenario: missing '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json obstacles = json::array();
  for (const auto& o : s.world.obstacles) {
    if (const auto* d = std::get_if<DiscObstacle>(&o)) {
      obstacles.push_back({{"type", "disc"}, {"center", point(d->center)}, {"radius", d->radius}});
    } else {
      const auto& r = std::get<RectObstacle>(o);
      obstacles.push_back({{"type", "rect"},
                           {"center", point(r.center)},
                           {"size", json::array({r.width, r.height})}});
    }
  }
  json j = {{"name", s.name},
            {"start", json::array({s.start_pose.x(), s.start_pose.y(), rad2deg(s.start_pose.theta())})},
            {"object", point(s.world.object_position)},
            {"drop", point(s.world.drop_position)},
            {"obstacles", obstacles}};
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("scenario: top level must be an object");
  const json& name = field(j, "name");
  if (!name.is_string()) throw std::runtime_error("scenario: 'name' must be a string");
  const json& start = field(j, "start");
  if (!start.is_array() || start.size() != 3) {
    throw std::runtime_error("scenario: 'start' must be [x, y, theta_deg]");
  }
  for (const auto& v : start) {
    if (!v.is_number()) throw std::runtime_error("scenario: 'start' entries must be numbers");
  }
  const Pose2D start_pose(start[0].get<double>(), start[1].get<double>(),
                          deg2rad(start[2].get<double>()));

  std::vector<Obstacle> obstacles;
  const json& obs = field(j, "obstacles");
  if (!obs.is_array()) throw std::runtime_error("scenario: 'obstacles' must be an array");
  for (const auto& o : obs) {
    const std::string type = field(o, "type").get<std::string>();
    const Vec2 center = read_point(field(o, "center"), "center");
    if (type == "disc") {
      const double r = field(o, "radius").get<double>();
      if (!(r > 0.0)) throw std::runtime_error("scenario: disc radius must be positive");
      obstacles.push_back(DiscObstacle{center, r});
    } else if (type == "rect") {
      const Vec2 size = read_point(field(o, "size"), "size");
      if (!(size.x > 0.0 && size.y > 0.0)) throw std::runtime_error("scenario: rect size must be positive");
      obstacles.push_back(RectObstacle{center, size.x, size.y});
    } else {
      throw std::runtime_error("scenario: unknown obstacle type '" + type + "'");
    }
  }
  return make_scenario(name.get<std::string>(), start_pose, read_point(field(j, "object"), "object"),
                       read_point(field(j, "drop"), "drop"), std::move(obstacles));
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario_file(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << scenario_to_json(scenario);
}

Scenario resolve_scenario(const std::string& name_or_path) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name_or_path) return s;
  }
  if (std::filesystem::exists(name_or_path)) return load_scenario_file(name_or_path);
  throw std::runtime_error("unknown scenario: " + name_or_path);
}

}  // namespace motm
