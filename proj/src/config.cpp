#include "anguilla/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace anguilla {

using nlohmann::json;

namespace {

/// Reads fields from one JSON object, recording type errors and unknown
/// keys under a dotted path instead of throwing.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<FieldError>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    if (!j_.is_object()) fail("", "must be an object");
  }

  template <typename T>
  bool read(const std::string& key, T& out) {
    const json* v = find(key);
    if (!v) return false;
    try {
      out = v->get<T>();
      return true;
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
      return false;
    }
  }

  bool read_angle(const std::string& key, double& out) {
    const bool has_rad = j_.is_object() && j_.contains(key);
    const bool has_deg = j_.is_object() && j_.contains(key + "_deg");
    if (has_rad && has_deg) {
      fail(key, "given both in radians and degrees");
      return false;
    }
    if (has_deg) {
      double deg = 0.0;
      if (!read(key + "_deg", deg)) return false;
      out = deg_to_rad(deg);
      return true;
    }
    return read(key, out);
  }

  bool read_angles(const std::string& key, std::vector<double>& out) {
    if (j_.is_object() && j_.contains(key + "_deg")) {
      std::vector<double> deg;
      if (!read(key + "_deg", deg)) return false;
      out.clear();
      for (double d : deg) out.push_back(deg_to_rad(d));
      return true;
    }
    return read(key, out);
  }

  const json* child(const std::string& key) { return find(key); }

  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void fail(const std::string& key, const std::string& message) {
    errors_.push_back({key.empty() ? path_ : path(key), message});
  }

  /// Reports keys never looked up.
  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

  std::vector<FieldError>& errors() { return errors_; }

 private:
  const json* find(const std::string& key) {
    seen_.insert(key);
    if (!j_.is_object()) return nullptr;
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::string path_;
  std::vector<FieldError>& errors_;
  std::set<std::string> seen_;
};

void read_geometry(ObjectReader& r, RobotGeometry& g) {
  r.read("cable_lateral_offset_Lc", g.cable_lateral_offset_Lc);
  r.read("joint_half_length_Lj", g.joint_half_length_Lj);
  r.read("module_length", g.module_length);
  r.read("module_diameter", g.module_diameter);
  r.read("module_count", g.module_count);
  r.read("body_length", g.body_length);
  r.read("total_mass", g.total_mass);
  r.read("neutral_fill", g.neutral_fill);
  r.read("syringe_volume", g.syringe_volume);
  r.read("syringes_per_module", g.syringes_per_module);
  r.read("syringe_inner_diameter", g.syringe_inner_diameter);
  r.read("gear_ratio", g.gear_ratio);
  r.read("lead_primary", g.lead_primary);
  r.read("lead_secondary", g.lead_secondary);
  r.read("drag_normal_Cn", g.drag_normal_Cn);
  r.read("drag_tangent_Ct", g.drag_tangent_Ct);
  r.read("heave_drag_cz", g.heave_drag_cz);
  r.read("metacentric_height_h", g.metacentric_height_h);
  r.read("pitch_time_constant", g.pitch_time_constant);
  r.read_angle("joint_limit", g.joint_limit);
  r.read("joint_inertia_Ij", g.joint_inertia_Ij);
  r.read("joint_damping_bj", g.joint_damping_bj);
  r.finish();
}

void read_gait(ObjectReader& r, GaitParams& p) {
  r.read_angle("amplitude_A", p.amplitude_A);
  r.read("spatial_freq_xi", p.spatial_freq_xi);
  r.read("temporal_freq_omega", p.temporal_freq_omega);
  r.read_angle("offset_phi", p.offset_phi);
  r.read("joint_count_N", p.joint_count_N);
  r.finish();
}

void read_compliance(ObjectReader& r, ComplianceParams& c) {
  if (const json* g = r.child("G")) {
    if (g->is_number()) {
      c.G = {g->get<double>()};
    } else if (g->is_array() && std::all_of(g->begin(), g->end(),
                                            [](const json& v) { return v.is_number(); })) {
      c.G = g->get<std::vector<double>>();
    } else {
      r.fail("G", "must be a number or an array of numbers");
    }
  }
  r.read("slack_gain_l0", c.slack_gain_l0);
  r.finish();
}

void read_contact(ObjectReader& r, ContactParams& c) {
  r.read("stiffness_kc", c.stiffness_kc);
  r.read("damping", c.damping);
  r.read("friction_mu", c.friction_mu);
  r.read("slip_velocity", c.slip_velocity);
  r.finish();
}

bool read_vec2(ObjectReader& r, const std::string& key, Vec2& out) {
  std::vector<double> v;
  if (!r.read(key, v)) return false;
  if (v.size() != 2) {
    r.fail(key, "must be [x, y]");
    return false;
  }
  out = Vec2(v[0], v[1]);
  return true;
}

void read_obstacles(ObjectReader& r, ObstacleField& field) {
  if (const json* lat = r.child("lattice")) {
    ObjectReader lr(*lat, r.path("lattice"), r.errors());
    LatticeRecipe recipe;
    lr.read("spacing", recipe.spacing);
    lr.read("post_diameter", recipe.post_diameter);
    lr.read("rows", recipe.rows);
    lr.read("cols", recipe.cols);
    read_vec2(lr, "origin", recipe.origin);
    lr.finish();
    try {
      field = build_hex_lattice(recipe);
    } catch (const Error& e) {
      lr.fail("", e.what());
    }
  }
  if (const json* posts = r.child("posts")) {
    if (!posts->is_array()) r.fail("posts", "must be an array");
    int k = 0;
    for (const auto& p : posts->is_array() ? *posts : json::array()) {
      ObjectReader pr(p, r.path("posts[" + std::to_string(k++) + "]"), r.errors());
      Post post;
      double x = 0.0, y = 0.0;
      pr.read("x", x);
      pr.read("y", y);
      pr.read("radius", post.radius);
      pr.finish();
      post.center = Vec2(x, y);
      field.posts.push_back(post);
    }
  }
  if (const json* bars = r.child("lateral_barriers")) {
    if (!bars->is_array()) r.fail("lateral_barriers", "must be an array");
    int k = 0;
    for (const auto& b : bars->is_array() ? *bars : json::array()) {
      ObjectReader br(b, r.path("lateral_barriers[" + std::to_string(k++) + "]"), r.errors());
      LateralBarrier bar;
      br.read("z_lo", bar.z_lo);
      br.read("z_hi", bar.z_hi);
      br.read("x_min", bar.x_min);
      br.read("x_max", bar.x_max);
      br.finish();
      field.lateral_barriers.push_back(bar);
    }
  }
  if (const json* b = r.child("bounds")) {
    ObjectReader br(*b, r.path("bounds"), r.errors());
    Bounds bounds;
    br.read("x_min", bounds.x_min);
    br.read("x_max", bounds.x_max);
    br.read("y_min", bounds.y_min);
    br.read("y_max", bounds.y_max);
    br.finish();
    field.bounds = bounds;
  } else if (!field.posts.empty()) {
    field.bounds = post_extent(field.posts);
  } else {
    field.bounds.reset();
  }
  r.finish();
}

void read_initial(ObjectReader& r, InitialConditions& init) {
  if (const json* pose = r.child("head_pose")) {
    ObjectReader pr(*pose, r.path("head_pose"), r.errors());
    pr.read("x", init.head_pose.x);
    pr.read("y", init.head_pose.y);
    pr.read_angle("heading", init.head_pose.heading);
    pr.finish();
  }
  r.read("depth_z", init.depth_z);
  r.read("fills", init.fills);
  std::vector<double> q;
  if (r.read_angles("joint_angles", q)) init.joint_angles = q;
  r.finish();
}

void read_outcome(ObjectReader& r, OutcomeSettings& o) {
  r.read("progress_eps", o.progress_eps);
  r.read("stuck_window_cycles", o.stuck_window_cycles);
  r.read("tau_max", o.tau_max);
  r.read("t_over", o.t_over);
  r.read("detect_stuck", o.detect_stuck);
  r.read("stop_on_outcome", o.stop_on_outcome);
  r.finish();
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace

RobotGeometry geometry_from_json(const json& j) {
  std::vector<FieldError> errors;
  ObjectReader r(j, "geometry", errors);
  RobotGeometry g;
  read_geometry(r, g);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return g;
}

json geometry_to_json(const RobotGeometry& g) {
  return {
      {"cable_lateral_offset_Lc", g.cable_lateral_offset_Lc},
      {"joint_half_length_Lj", g.joint_half_length_Lj},
      {"module_length", g.module_length},
      {"module_diameter", g.module_diameter},
      {"module_count", g.module_count},
      {"body_length", g.body_length},
      {"total_mass", g.total_mass},
      {"neutral_fill", g.neutral_fill},
      {"syringe_volume", g.syringe_volume},
      {"syringes_per_module", g.syringes_per_module},
      {"syringe_inner_diameter", g.syringe_inner_diameter},
      {"gear_ratio", g.gear_ratio},
      {"lead_primary", g.lead_primary},
      {"lead_secondary", g.lead_secondary},
      {"drag_normal_Cn", g.drag_normal_Cn},
      {"drag_tangent_Ct", g.drag_tangent_Ct},
      {"heave_drag_cz", g.heave_drag_cz},
      {"metacentric_height_h", g.metacentric_height_h},
      {"pitch_time_constant", g.pitch_time_constant},
      {"joint_limit", g.joint_limit},
      {"joint_inertia_Ij", g.joint_inertia_Ij},
      {"joint_damping_bj", g.joint_damping_bj},
  };
}

GaitParams gait_from_json(const json& j, const GaitParams& base) {
  std::vector<FieldError> errors;
  ObjectReader r(j, "gait", errors);
  GaitParams p = base;
  read_gait(r, p);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return p;
}

json gait_to_json(const GaitParams& p) {
  return {{"amplitude_A", p.amplitude_A},
          {"spatial_freq_xi", p.spatial_freq_xi},
          {"temporal_freq_omega", p.temporal_freq_omega},
          {"offset_phi", p.offset_phi},
          {"joint_count_N", p.joint_count_N}};
}

ScenarioConfig scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  std::vector<FieldError> errors;
  ObjectReader r(j, "", errors);
  ScenarioConfig c;
  r.read("name", c.name);
  if (const json* g = r.child("geometry")) {
    if (g->is_string()) {
      const json file = read_json_file(base_dir / g->get<std::string>());
      ObjectReader gr(file, "geometry", errors);
      read_geometry(gr, c.geometry);
    } else {
      ObjectReader gr(*g, "geometry", errors);
      read_geometry(gr, c.geometry);
    }
  }
  if (const json* g = r.child("gait")) {
    ObjectReader gr(*g, "gait", errors);
    read_gait(gr, c.gait);
  }
  c.gait.joint_count_N = j.contains("gait") && j["gait"].contains("joint_count_N")
                             ? c.gait.joint_count_N
                             : c.geometry.joint_count();
  if (const json* g = r.child("compliance")) {
    ObjectReader cr(*g, "compliance", errors);
    read_compliance(cr, c.compliance);
  }
  if (const json* g = r.child("contact")) {
    ObjectReader cr(*g, "contact", errors);
    read_contact(cr, c.contact);
  }
  if (const json* g = r.child("initial")) {
    ObjectReader ir(*g, "initial", errors);
    read_initial(ir, c.initial);
  }
  if (const json* fs = r.child("fill_schedule")) {
    if (!fs->is_array()) r.fail("fill_schedule", "must be an array");
    int k = 0;
    for (const auto& key : fs->is_array() ? *fs : json::array()) {
      ObjectReader kr(key, "fill_schedule[" + std::to_string(k++) + "]", errors);
      FillKeyframe f;
      kr.read("t", f.time);
      kr.read("fills", f.fills);
      kr.finish();
      c.fill_schedule.push_back(f);
    }
  }
  if (const json* o = r.child("obstacles")) {
    ObjectReader orr(*o, "obstacles", errors);
    read_obstacles(orr, c.obstacles);
  }
  double floor = 0.0;
  if (r.read("floor_depth", floor)) c.floor_depth = floor;
  r.read("duration", c.duration);
  r.read("dt", c.dt);
  if (const json* o = r.child("outcome")) {
    ObjectReader orr(*o, "outcome", errors);
    read_outcome(orr, c.outcome);
  }
  r.read("seed", c.seed);
  r.finish();
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = geometry_to_json(c.geometry);
  j["gait"] = gait_to_json(c.gait);
  j["compliance"] = {{"G", c.compliance.G}, {"slack_gain_l0", c.compliance.slack_gain_l0}};
  j["contact"] = {{"stiffness_kc", c.contact.stiffness_kc},
                  {"damping", c.contact.damping},
                  {"friction_mu", c.contact.friction_mu},
                  {"slip_velocity", c.contact.slip_velocity}};
  json initial = {{"head_pose",
                   {{"x", c.initial.head_pose.x},
                    {"y", c.initial.head_pose.y},
                    {"heading", c.initial.head_pose.heading}}},
                  {"depth_z", c.initial.depth_z}};
  if (!c.initial.fills.empty()) initial["fills"] = c.initial.fills;
  if (c.initial.joint_angles) initial["joint_angles"] = *c.initial.joint_angles;
  j["initial"] = initial;
  json schedule = json::array();
  for (const auto& k : c.fill_schedule) schedule.push_back({{"t", k.time}, {"fills", k.fills}});
  j["fill_schedule"] = schedule;

  json obstacles = json::object();
  std::size_t first_post = 0;
  if (c.obstacles.lattice) {
    const auto& l = *c.obstacles.lattice;
    obstacles["lattice"] = {{"spacing", l.spacing},
                            {"post_diameter", l.post_diameter},
                            {"rows", l.rows},
                            {"cols", l.cols},
                            {"origin", {l.origin.x(), l.origin.y()}}};
    first_post = static_cast<std::size_t>(l.rows) * static_cast<std::size_t>(l.cols);
  }
  json posts = json::array();
  for (std::size_t k = first_post; k < c.obstacles.posts.size(); ++k) {
    const auto& p = c.obstacles.posts[k];
    posts.push_back({{"x", p.center.x()}, {"y", p.center.y()}, {"radius", p.radius}});
  }
  obstacles["posts"] = posts;
  json bars = json::array();
  for (const auto& b : c.obstacles.lateral_barriers) {
    bars.push_back({{"z_lo", b.z_lo}, {"z_hi", b.z_hi}, {"x_min", b.x_min}, {"x_max", b.x_max}});
  }
  obstacles["lateral_barriers"] = bars;
  if (c.obstacles.bounds) {
    const auto& b = *c.obstacles.bounds;
    obstacles["bounds"] = {{"x_min", b.x_min}, {"x_max", b.x_max}, {"y_min", b.y_min},
                           {"y_max", b.y_max}};
  }
  j["obstacles"] = obstacles;
  if (c.floor_depth) j["floor_depth"] = *c.floor_depth;
  j["duration"] = c.duration;
  j["dt"] = c.dt;
  j["outcome"] = {{"progress_eps", c.outcome.progress_eps},
                  {"stuck_window_cycles", c.outcome.stuck_window_cycles},
                  {"tau_max", c.outcome.tau_max},
                  {"t_over", c.outcome.t_over},
                  {"detect_stuck", c.outcome.detect_stuck},
                  {"stop_on_outcome", c.outcome.stop_on_outcome}};
  j["seed"] = c.seed;
  return j;
}

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return scenario_from_json(j, base_dir);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIo, "SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string config_hash(const ScenarioConfig& config) {
  return sha256_hex(scenario_to_json(config).dump());
}

}  // namespace anguilla
