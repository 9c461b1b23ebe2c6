#include "volwarp/skeleton.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "volwarp/error.hpp"

namespace volwarp {

namespace {

using ordered_json = nlohmann::ordered_json;

CoordinateSpace space_from_string(const std::string& s) {
  if (s == "voxel") return CoordinateSpace::kVoxel;
  if (s == "millimeter") return CoordinateSpace::kMillimeter;
  throw Error("pose: unknown space \"" + s + "\"");
}

ordered_json parse_json(std::string_view text, const char* what,
                        bool reject_duplicate_keys) {
  std::vector<std::set<std::string>> seen;
  bool duplicate = false;
  std::string duplicate_name;
  auto callback = [&](int /*depth*/, nlohmann::json::parse_event_t event,
                      ordered_json& parsed) {
    using E = nlohmann::json::parse_event_t;
    if (event == E::object_start) {
      seen.emplace_back();
    } else if (event == E::object_end) {
      seen.pop_back();
    } else if (event == E::key && !seen.empty()) {
      const auto key = parsed.get<std::string>();
      if (!seen.back().insert(key).second && !duplicate) {
        duplicate = true;
        duplicate_name = key;
      }
    }
    return true;
  };
  ordered_json out;
  try {
    out = reject_duplicate_keys ? ordered_json::parse(text.begin(), text.end(), callback)
                                : ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string(what) + ": parse error: " + e.what());
  }
  if (duplicate) throw Error(std::string(what) + ": duplicate key \"" + duplicate_name + "\"");
  return out;
}

double finite_number(const ordered_json& j, const char* what) {
  if (!j.is_number()) throw Error(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(std::string(what) + ": non-finite value");
  return v;
}

}  // namespace

const char* to_string(CoordinateSpace space) {
  return space == CoordinateSpace::kVoxel ? "voxel" : "millimeter";
}

Pose::Pose(CoordinateSpace space, std::vector<Joint> joints)
    : space_(space), joints_(std::move(joints)) {
  if (joints_.empty()) throw Error("pose: at least one joint is required");
  std::set<std::string_view> names;
  for (const auto& j : joints_) {
    if (!names.insert(j.name).second) throw Error("pose: duplicate joint \"" + j.name + "\"");
    if (!j.position.allFinite()) throw Error("pose: joint \"" + j.name + "\" is not finite");
  }
}

bool Pose::contains(std::string_view name) const {
  return std::any_of(joints_.begin(), joints_.end(),
                     [&](const Joint& j) { return j.name == name; });
}

const Vec3& Pose::at(std::string_view name) const {
  for (const auto& j : joints_) {
    if (j.name == name) return j.position;
  }
  throw Error("pose: missing joint \"" + std::string(name) + "\"");
}

Pose Pose::reordered(const std::vector<std::string>& names) const {
  std::vector<Joint> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back({n, at(n)});
  return Pose(space_, std::move(out));
}

bool operator==(const Pose& a, const Pose& b) {
  if (a.space_ != b.space_ || a.joints_.size() != b.joints_.size()) return false;
  for (std::size_t i = 0; i < a.joints_.size(); ++i) {
    if (a.joints_[i].name != b.joints_[i].name ||
        a.joints_[i].position != b.joints_[i].position) {
      return false;
    }
  }
  return true;
}

double RadiusRule::radius(double bone_length) const {
  if (kind == Kind::kFixed) return value;
  return std::max(minimum, value * bone_length);
}

void SkeletonConfig::validate() const {
  std::set<std::string_view> names;
  for (const auto& n : joint_names) {
    if (!names.insert(n).second) throw Error("skeleton: duplicate joint \"" + n + "\"");
  }
  if (parts.size() != 10) {
    throw Error("skeleton: expected exactly 10 parts, found " + std::to_string(parts.size()));
  }
  std::set<std::string_view> part_names;
  auto require_joint = [&](const std::string& part, const std::string& joint) {
    if (!names.contains(joint)) {
      throw Error("skeleton: part \"" + part + "\" references unknown joint \"" + joint + "\"");
    }
  };
  for (const auto& p : parts) {
    if (!part_names.insert(p.name).second) {
      throw Error("skeleton: duplicate part \"" + p.name + "\"");
    }
    if (p.joints.size() != 2 && p.joints.size() != 4) {
      throw Error("skeleton: part \"" + p.name + "\" must have 2 or 4 joints");
    }
    if (p.anchor.has_value() != (p.joints.size() == 2)) {
      throw Error("skeleton: part \"" + p.name + "\" needs an anchor iff it has 2 joints");
    }
    for (const auto& j : p.joints) require_joint(p.name, j);
    if (p.anchor) {
      if (*p.anchor == kShoulderMidpoint) {
        require_joint(p.name, "l_shoulder");
        require_joint(p.name, "r_shoulder");
      } else {
        require_joint(p.name, *p.anchor);
      }
    }
    if (!(p.radius.value > 0.0) || p.radius.minimum < 0.0) {
      throw Error("skeleton: part \"" + p.name + "\" has an invalid radius rule");
    }
  }
}

const PartDefinition& SkeletonConfig::part(std::string_view name) const {
  for (const auto& p : parts) {
    if (p.name == name) return p;
  }
  throw Error("skeleton: unknown part \"" + std::string(name) + "\"");
}

SkeletonConfig default_skeleton() {
  SkeletonConfig cfg;
  cfg.joint_names = {"head_top", "neck",    "l_shoulder", "r_shoulder", "l_elbow",
                     "r_elbow",  "l_wrist", "r_wrist",    "l_hip",      "r_hip",
                     "l_knee",   "r_knee",  "l_ankle",    "r_ankle"};
  const RadiusRule limb = RadiusRule::fraction(0.25, 2.0);
  auto two = [&](std::string name, std::string a, std::string b, std::string anchor) {
    return PartDefinition{std::move(name), {std::move(a), std::move(b)}, std::move(anchor), limb};
  };
  cfg.parts = {
      two("head", "neck", "head_top", std::string(kShoulderMidpoint)),
      PartDefinition{"torso", {"l_shoulder", "r_shoulder", "l_hip", "r_hip"}, std::nullopt, limb},
      two("l_upper_arm", "l_shoulder", "l_elbow", "l_wrist"),
      two("r_upper_arm", "r_shoulder", "r_elbow", "r_wrist"),
      two("l_lower_arm", "l_elbow", "l_wrist", "l_shoulder"),
      two("r_lower_arm", "r_elbow", "r_wrist", "r_shoulder"),
      two("l_upper_leg", "l_hip", "l_knee", "l_ankle"),
      two("r_upper_leg", "r_hip", "r_knee", "r_ankle"),
      two("l_lower_leg", "l_knee", "l_ankle", "l_hip"),
      two("r_lower_leg", "r_knee", "r_ankle", "r_hip"),
  };
  return cfg;
}

std::string save_pose(const Pose& pose) {
  ordered_json j;
  j["space"] = to_string(pose.space());
  ordered_json joints = ordered_json::object();
  for (const auto& joint : pose.joints()) {
    joints[joint.name] = {joint.position[0], joint.position[1], joint.position[2]};
  }
  j["joints"] = std::move(joints);
  return j.dump(2) + "\n";
}

Pose load_pose(std::string_view text) {
  const ordered_json j = parse_json(text, "pose", true);
  if (!j.is_object()) throw Error("pose: top level must be an object");
  if (!j.contains("space") || !j["space"].is_string()) throw Error("pose: missing \"space\"");
  if (!j.contains("joints") || !j["joints"].is_object()) throw Error("pose: missing \"joints\"");
  std::vector<Joint> joints;
  for (const auto& [name, value] : j["joints"].items()) {
    if (!value.is_array() || value.size() != 3) {
      throw Error("pose: joint \"" + name + "\" must be a 3-element array");
    }
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = finite_number(value[k], "pose");
    joints.push_back({name, p});
  }
  return Pose(space_from_string(j["space"].get<std::string>()), std::move(joints));
}

std::string save_skeleton(const SkeletonConfig& cfg) {
  ordered_json j;
  j["joints"] = cfg.joint_names;
  ordered_json parts = ordered_json::array();
  for (const auto& p : cfg.parts) {
    ordered_json part;
    part["name"] = p.name;
    part["joints"] = p.joints;
    part["anchor"] = p.anchor ? ordered_json(*p.anchor) : ordered_json(nullptr);
    if (p.radius.kind == RadiusRule::Kind::kFixed) {
      part["radius"] = p.radius.value;
    } else {
      part["radius"] = {{"fraction", p.radius.value}, {"min", p.radius.minimum}};
    }
    parts.push_back(std::move(part));
  }
  j["parts"] = std::move(parts);
  return j.dump(2) + "\n";
}

SkeletonConfig load_skeleton(std::string_view text) {
  const ordered_json j = parse_json(text, "skeleton", true);
  SkeletonConfig cfg;
  try {
    cfg.joint_names = j.at("joints").get<std::vector<std::string>>();
    for (const auto& part : j.at("parts")) {
      PartDefinition p;
      p.name = part.at("name").get<std::string>();
      p.joints = part.at("joints").get<std::vector<std::string>>();
      if (part.contains("anchor") && !part["anchor"].is_null()) {
        p.anchor = part["anchor"].get<std::string>();
      }
      if (part.contains("radius")) {
        const auto& r = part["radius"];
        if (r.is_number()) {
          p.radius = RadiusRule::fixed(finite_number(r, "skeleton radius"));
        } else {
          p.radius = RadiusRule::fraction(finite_number(r.at("fraction"), "skeleton radius"),
                                          finite_number(r.value("min", ordered_json(2.0)),
                                                        "skeleton radius"));
        }
      }
      cfg.parts.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("skeleton: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

Vec3 resolve_point(const Pose& pose, std::string_view name) {
  if (name == kShoulderMidpoint) {
    return 0.5 * (pose.at("l_shoulder") + pose.at("r_shoulder"));
  }
  return pose.at(name);
}

Correspondences correspondences(const PartDefinition& part, const Pose& pose_in,
                                const Pose& pose_tgt) {
  if (pose_in.space() != pose_tgt.space()) {
    throw Error("correspondences: poses are in different coordinate spaces");
  }
  Correspondences out;
  auto add = [&](std::string_view name) {
    out.src.push_back(resolve_point(pose_in, name));
    out.dst.push_back(resolve_point(pose_tgt, name));
  };
  for (const auto& j : part.joints) add(j);
  if (part.anchor) add(*part.anchor);
  return out;
}

}  // namespace volwarp
