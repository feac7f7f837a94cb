#include "wrenchgrasp/scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wrenchgrasp/errors.hpp"

namespace wrenchgrasp {

using nlohmann::json;

void Scenario::validate() const {
  if (name.empty()) throw InvalidInput("scenario name is empty");
  tool.validate();
  contact.validate();
  if (trials == 0) throw InvalidInput("trials must be positive");
  if (cloud_points < 10) throw InvalidInput("cloud needs at least 10 points");
  if (!(sampler.jaw_max > 0.0) || sampler.count == 0) throw InvalidInput("invalid sampler settings");
  if (!(body.mass_scale > 0.0)) throw InvalidInput("mass_scale must be positive");
  if (!(body.restitution >= 0.0 && body.restitution <= 1.0)) throw InvalidInput("restitution outside [0, 1]");
  if (!(body.friction >= 0.0)) throw InvalidInput("friction must be non-negative");
  if (!(cost.dt_s > 0.0)) throw InvalidInput("cost dt must be positive");
  cost.weights.validate();
  sim.validate();
}

RigidBodyModel make_body(const Scenario& s) {
  RigidBodyModel b = compose_inertia(s.tool);
  b.mass *= s.body.mass_scale;
  b.inertia *= s.body.mass_scale;
  b.restitution = s.body.restitution;
  b.friction = s.body.friction;
  b.validate();
  return b;
}

namespace {

// Cursor into a JSON document that remembers its field path for errors.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  Node at(const std::string& key) const {
    if (!j_.is_object()) throw ParseError(path_, "expected an object");
    if (!j_.contains(key)) throw ParseError(child(key), "missing required field");
    return {j_.at(key), child(key)};
  }

  Node at(std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  double number() const {
    if (!j_.is_number()) throw ParseError(path_, "expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) throw ParseError(path_, "expected a finite number");
    return v;
  }

  std::uint64_t integer() const {
    if (!j_.is_number_integer() || j_.get<long long>() < 0) throw ParseError(path_, "expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }

  std::string string() const {
    if (!j_.is_string()) throw ParseError(path_, "expected a string");
    return j_.get<std::string>();
  }

  bool boolean() const {
    if (!j_.is_boolean()) throw ParseError(path_, "expected a boolean");
    return j_.get<bool>();
  }

  std::size_t array_size() const {
    if (!j_.is_array()) throw ParseError(path_, "expected an array");
    return j_.size();
  }

  Vec3 vec3() const {
    if (array_size() != 3) throw ParseError(path_, "expected 3 numbers");
    return {at(std::size_t{0}).number(), at(std::size_t{1}).number(), at(std::size_t{2}).number()};
  }

  Mat3 mat3() const {
    if (array_size() != 3) throw ParseError(path_, "expected 3 rows");
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r) m.row(static_cast<Eigen::Index>(r)) = at(r).vec3().transpose();
    return m;
  }

  // Optional fields: leave the default in place when absent.
  void get(const std::string& key, double& out) const {
    if (has(key)) out = at(key).number();
  }
  void get(const std::string& key, std::size_t& out) const {
    if (has(key)) out = static_cast<std::size_t>(at(key).integer());
  }
  void get(const std::string& key, Vec3& out) const {
    if (has(key)) out = at(key).vec3();
  }
  void get(const std::string& key, bool& out) const {
    if (has(key)) out = at(key).boolean();
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

Primitive parse_primitive(const Node& n) {
  Primitive p;
  try {
    p.shape = shape_from_string(n.at("shape").string());
  } catch (const Error& e) {
    throw ParseError(n.path() + ".shape", e.what());
  }
  p.dims = n.at("dims_m").vec3();
  p.density = n.at("density_kg_m3").number();
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  if (n.has("rotation")) r = n.at("rotation").mat3();
  n.get("translation_m", t);
  try {
    p.pose = Pose(r, t);
    p.validate();
  } catch (const Error& e) {
    throw ParseError(n.path(), e.what());
  }
  return p;
}

// Runs a validation step and reports failures against `path`.
template <typename F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  if (!doc.is_object()) throw ParseError("", "expected a JSON object");
  if (root.at("schema_version").integer() != static_cast<std::uint64_t>(kScenarioSchemaVersion)) {
    throw ParseError("schema_version", "unsupported schema version");
  }

  Scenario s;
  s.name = root.at("name").string();
  checked("task", [&] { s.task = task_from_string(root.at("task").string()); });
  s.motion = MotionParams::defaults(s.task);

  const Node tool = root.at("tool");
  if (tool.has("category")) s.tool.category = tool.at("category").string();
  const Node prims = tool.at("primitives");
  for (std::size_t i = 0; i < prims.array_size(); ++i) s.tool.primitives.push_back(parse_primitive(prims.at(i)));
  checked("tool.primitives", [&] { s.tool.validate(); });

  if (root.has("body")) {
    const Node b = root.at("body");
    b.get("restitution", s.body.restitution);
    b.get("friction", s.body.friction);
    b.get("mass_scale", s.body.mass_scale);
  }

  const Node c = root.at("contact");
  s.contact.c_tool = c.at("c_tool_m").vec3();
  s.contact.c_obj = c.at("c_obj_m").vec3();
  s.contact.n = c.at("normal").vec3();
  s.contact.d = c.at("direction").vec3();
  checked("contact", [&] { s.contact.validate(); });

  if (root.has("motion")) {
    const Node m = root.at("motion");
    auto& mp = s.motion;
    m.get("horizon_s", mp.horizon_s);
    m.get("samples", mp.samples);
    m.get("speed_mps", mp.speed_mps);
    m.get("event_time_s", mp.event_time_s);
    m.get("ramp_s", mp.ramp_s);
    m.get("decel_s", mp.decel_s);
    m.get("pre_cruise_s", mp.pre_cruise_s);
    m.get("post_cruise_s", mp.post_cruise_s);
    m.get("arc_radius_m", mp.arc_radius_m);
    m.get("sweep_count", mp.sweep_count);
    m.get("sweep_spacing_m", mp.sweep_spacing_m);
    if (m.has("object_masses_kg")) {
      const Node om = m.at("object_masses_kg");
      mp.object_masses_kg.clear();
      for (std::size_t i = 0; i < om.array_size(); ++i) mp.object_masses_kg.push_back(om.at(i).number());
    }
    if (m.has("tool_rotation")) {
      mp.tool_rotation = m.at("tool_rotation").mat3();
      checked("motion.tool_rotation", [&] { validate_rotation(mp.tool_rotation); });
    }
  }

  if (root.has("cloud")) root.at("cloud").get("points", s.cloud_points);

  if (root.has("grasp_region")) {
    const Node g = root.at("grasp_region");
    GraspRegion r;
    r.min = g.at("min_m").vec3();
    r.max = g.at("max_m").vec3();
    if ((r.min.array() > r.max.array()).any()) throw ParseError("grasp_region", "min_m exceeds max_m");
    s.grasp_region = r;
  }

  if (root.has("sampler")) {
    const Node g = root.at("sampler");
    g.get("jaw_max_m", s.sampler.jaw_max);
    g.get("count", s.sampler.count);
    g.get("clamp_force_n", s.sampler.clamp_force);
    g.get("antipodal_deg", s.sampler.antipodal_deg);
    g.get("min_width_m", s.sampler.min_width);
    g.get("attempts_per_candidate", s.sampler.attempts_per_candidate);
  }

  if (root.has("cost")) {
    const Node k = root.at("cost");
    k.get("w_tau_per_nm", s.cost.weights.w_tau);
    k.get("w_s_per_n", s.cost.weights.w_s);
    k.get("w_alpha_per_rad", s.cost.weights.w_alpha);
    k.get("dt_s", s.cost.dt_s);
  }

  if (root.has("sim")) {
    const Node m = root.at("sim");
    auto& sc = s.sim;
    m.get("dt_s", sc.dt_sim);
    m.get("mu_g", sc.mu_g);
    if (m.has("clamp_force_n") && m.at("clamp_force_n").raw().is_null()) {
      sc.clamp_force = std::numeric_limits<double>::infinity();
    } else {
      m.get("clamp_force_n", sc.clamp_force);
    }
    m.get("a_patch_m", sc.a_patch);
    m.get("slip_limit_m", sc.slip_limit);
    m.get("rotation_limit_rad", sc.rotation_limit);
    m.get("impulse_dt_s", sc.impulse_dt);
    m.get("k_t_m_per_ns", sc.k_t);
    m.get("k_r_rad_per_nms", sc.k_r);
    m.get("mu_sigma", sc.mu_sigma);
    m.get("clamp_sigma", sc.clamp_sigma);
    m.get("gravity_mps2", sc.gravity);
  }

  if (root.has("seeds")) {
    const Node k = root.at("seeds");
    if (k.has("base")) s.seed = k.at("base").integer();
    k.get("trials", s.trials);
  }

  checked("", [&] { s.validate(); });
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["name"] = s.name;
  j["task"] = to_string(s.task);

  json prims = json::array();
  for (const auto& p : s.tool.primitives) {
    prims.push_back({{"shape", to_string(p.shape)},
                     {"dims_m", vec(p.dims)},
                     {"density_kg_m3", p.density},
                     {"rotation", mat(p.pose.rotation())},
                     {"translation_m", vec(p.pose.translation())}});
  }
  j["tool"] = {{"category", s.tool.category}, {"primitives", prims}};
  j["body"] = {{"restitution", s.body.restitution}, {"friction", s.body.friction}, {"mass_scale", s.body.mass_scale}};
  j["contact"] = {{"c_tool_m", vec(s.contact.c_tool)},
                  {"c_obj_m", vec(s.contact.c_obj)},
                  {"normal", vec(s.contact.n)},
                  {"direction", vec(s.contact.d)}};

  const auto& m = s.motion;
  j["motion"] = {{"horizon_s", m.horizon_s},
                 {"samples", m.samples},
                 {"speed_mps", m.speed_mps},
                 {"event_time_s", m.event_time_s},
                 {"ramp_s", m.ramp_s},
                 {"decel_s", m.decel_s},
                 {"pre_cruise_s", m.pre_cruise_s},
                 {"post_cruise_s", m.post_cruise_s},
                 {"arc_radius_m", m.arc_radius_m},
                 {"sweep_count", m.sweep_count},
                 {"sweep_spacing_m", m.sweep_spacing_m},
                 {"object_masses_kg", m.object_masses_kg},
                 {"tool_rotation", mat(m.tool_rotation)}};
  j["cloud"] = {{"points", s.cloud_points}};
  if (s.grasp_region) j["grasp_region"] = {{"min_m", vec(s.grasp_region->min)}, {"max_m", vec(s.grasp_region->max)}};
  j["sampler"] = {{"jaw_max_m", s.sampler.jaw_max},
                  {"count", s.sampler.count},
                  {"clamp_force_n", s.sampler.clamp_force},
                  {"antipodal_deg", s.sampler.antipodal_deg},
                  {"min_width_m", s.sampler.min_width},
                  {"attempts_per_candidate", s.sampler.attempts_per_candidate}};
  j["cost"] = {{"w_tau_per_nm", s.cost.weights.w_tau},
               {"w_s_per_n", s.cost.weights.w_s},
               {"w_alpha_per_rad", s.cost.weights.w_alpha},
               {"dt_s", s.cost.dt_s}};
  const auto& c = s.sim;
  j["sim"] = {{"dt_s", c.dt_sim},
              {"mu_g", c.mu_g},
              {"clamp_force_n", std::isfinite(c.clamp_force) ? json(c.clamp_force) : json(nullptr)},
              {"a_patch_m", c.a_patch},
              {"slip_limit_m", c.slip_limit},
              {"rotation_limit_rad", c.rotation_limit},
              {"impulse_dt_s", c.impulse_dt},
              {"k_t_m_per_ns", c.k_t},
              {"k_r_rad_per_nms", c.k_r},
              {"mu_sigma", c.mu_sigma},
              {"clamp_sigma", c.clamp_sigma},
              {"gravity_mps2", vec(c.gravity)}};
  j["seeds"] = {{"base", s.seed}, {"trials", s.trials}};
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write scenario file: " + path);
  out << scenario_to_json(s);
}

}  // namespace wrenchgrasp
