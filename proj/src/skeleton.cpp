#include "posecal/skeleton.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "posecal/errors.hpp"

namespace posecal {

namespace {

const std::vector<std::string> kKinect25Names = {
    "spine_base",    "spine_mid",     "neck",           "head",
    "shoulder_left", "elbow_left",    "wrist_left",     "hand_left",
    "shoulder_right","elbow_right",   "wrist_right",    "hand_right",
    "hip_left",      "knee_left",     "ankle_left",     "foot_left",
    "hip_right",     "knee_right",    "ankle_right",    "foot_right",
    "spine_shoulder","hand_tip_left", "thumb_left",     "hand_tip_right",
    "thumb_right"};

const std::vector<std::string> kSmpl24Names = {
    "pelvis",        "hip_left",      "hip_right",      "spine1",
    "knee_left",     "knee_right",    "spine2",         "ankle_left",
    "ankle_right",   "spine3",        "foot_left",      "foot_right",
    "neck",          "collar_left",   "collar_right",   "head",
    "shoulder_left", "shoulder_right","elbow_left",     "elbow_right",
    "wrist_left",    "wrist_right",   "hand_left",      "hand_right"};

const std::vector<std::string> kCommonNames = {
    "head",       "neck",        "shoulder_left", "shoulder_right",
    "elbow_left", "elbow_right", "wrist_left",    "wrist_right",
    "spine_mid",  "hip_center"};

JointMap make_map(std::vector<JointMapEntry> entries) {
  JointMap map;
  map.entries = std::move(entries);
  return map;
}

void validate_map(const JointMap& map) {
  std::set<std::string> targets;
  for (const auto& entry : map.entries) {
    if (entry.target.empty()) {
      throw InvalidInputError("joint map entry with empty target");
    }
    if (!targets.insert(entry.target).second) {
      throw InvalidInputError("duplicate joint map target: " + entry.target);
    }
    if (entry.sources.empty() || entry.sources.size() > 2) {
      throw InvalidInputError("joint map entry " + entry.target +
                              " must have 1 or 2 sources");
    }
  }
}

}  // namespace

std::string convention_name(Convention c) {
  switch (c) {
    case Convention::Kinect25: return "kinect25";
    case Convention::Smpl24: return "smpl24";
    case Convention::Bev: return "bev";
    case Convention::Common: return "common";
  }
  return "?";
}

Convention parse_convention(const std::string& name) {
  if (name == "kinect25") return Convention::Kinect25;
  if (name == "smpl24") return Convention::Smpl24;
  if (name == "bev") return Convention::Bev;
  if (name == "common") return Convention::Common;
  throw InvalidInputError("unknown skeleton convention: " + name);
}

const std::vector<std::string>& convention_joint_names(Convention c) {
  switch (c) {
    case Convention::Kinect25: return kKinect25Names;
    case Convention::Smpl24: return kSmpl24Names;
    case Convention::Bev: return kSmpl24Names;
    case Convention::Common: return kCommonNames;
  }
  return kCommonNames;
}

std::string role_name(Role r) {
  return r == Role::Therapist ? "therapist" : "child";
}

Role parse_role(const std::string& name) {
  if (name == "therapist") return Role::Therapist;
  if (name == "child") return Role::Child;
  throw InvalidInputError("unknown role: " + name);
}

void JointRegressor::validate(std::vector<std::string>* warnings) const {
  if (static_cast<Eigen::Index>(joint_names.size()) != weights.rows()) {
    throw InvalidInputError("joint regressor has " +
                            std::to_string(weights.rows()) + " rows but " +
                            std::to_string(joint_names.size()) + " names");
  }
  for (Eigen::Index k = 0; k < weights.rows(); ++k) {
    double row_sum = 0.0;
    int nonzeros = 0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(weights, k);
         it; ++it) {
      if (it.value() != 0.0) ++nonzeros;
      row_sum += it.value();
    }
    if (nonzeros == 0) {
      throw InvalidInputError("joint regressor row " + std::to_string(k) +
                              " has no nonzero weights");
    }
    if (warnings && std::abs(row_sum - 1.0) > 1e-6) {
      warnings->push_back("regressor row " + std::to_string(k) + " (" +
                          joint_names[static_cast<std::size_t>(k)] +
                          ") sums to " + std::to_string(row_sum));
    }
  }
}

Skeleton regress_joints(const Mesh& mesh, const JointRegressor& regressor) {
  if (regressor.weights.cols() != mesh.vertices.rows()) {
    throw DimensionMismatchError(
        "regressor expects " + std::to_string(regressor.weights.cols()) +
        " vertices, mesh has " + std::to_string(mesh.vertices.rows()));
  }
  regressor.validate();
  Eigen::Matrix<double, Eigen::Dynamic, 3> joints =
      regressor.weights * mesh.vertices;
  Skeleton skel;
  skel.convention = regressor.convention;
  for (Eigen::Index k = 0; k < joints.rows(); ++k) {
    skel.joints[regressor.joint_names[static_cast<std::size_t>(k)]] =
        Joint{joints.row(k).transpose(), std::nullopt};
  }
  return skel;
}

Skeleton map_to_common(const Skeleton& skel, const JointMap& map,
                       std::vector<std::string>* warnings) {
  validate_map(map);
  Skeleton out;
  out.convention = Convention::Common;
  for (const auto& entry : map.entries) {
    bool complete = true;
    for (const auto& source : entry.sources) {
      if (!skel.has(source)) {
        if (warnings) {
          warnings->push_back("joint " + entry.target + " omitted: source " +
                              source + " missing");
        }
        complete = false;
      }
    }
    if (!complete) continue;

    Joint joint;
    if (entry.sources.size() == 1) {
      joint = skel.joints.at(entry.sources[0]);
    } else {
      const Joint& a = skel.joints.at(entry.sources[0]);
      const Joint& b = skel.joints.at(entry.sources[1]);
      joint.p = (a.p + b.p) / 2.0;
      if (a.confidence && b.confidence) {
        joint.confidence = std::min(*a.confidence, *b.confidence);
      } else if (a.confidence) {
        joint.confidence = a.confidence;
      } else if (b.confidence) {
        joint.confidence = b.confidence;
      }
    }
    out.joints[entry.target] = joint;
  }
  if (out.joints.empty()) {
    throw InvalidInputError("joint map produced an empty skeleton");
  }
  return out;
}

namespace {

Eigen::Vector3d translation_delta(const BoundingBox& bbox,
                                  const WeakPerspectiveCam& wp,
                                  const CameraIntrinsics& cam_old,
                                  const CameraIntrinsics& cam_new) {
  if (cam_old.w != cam_new.w || cam_old.h != cam_new.h ||
      cam_old.mu != cam_new.mu) {
    throw InvalidInputError(
        "retranslate requires intrinsics with identical w, h and mu");
  }
  const TranslationVector t_old = translation_vector(cam_old, bbox, wp);
  const TranslationVector t_new = translation_vector(cam_new, bbox, wp);
  return t_new.t - t_old.t;
}

}  // namespace

Skeleton retranslate(const Skeleton& skel, const BoundingBox& bbox,
                     const WeakPerspectiveCam& wp,
                     const CameraIntrinsics& cam_old,
                     const CameraIntrinsics& cam_new) {
  const Eigen::Vector3d delta = translation_delta(bbox, wp, cam_old, cam_new);
  Skeleton out = skel;
  for (auto& [name, joint] : out.joints) {
    joint.p += delta;
  }
  return out;
}

Mesh retranslate(const Mesh& mesh, const BoundingBox& bbox,
                 const WeakPerspectiveCam& wp, const CameraIntrinsics& cam_old,
                 const CameraIntrinsics& cam_new) {
  const Eigen::Vector3d delta = translation_delta(bbox, wp, cam_old, cam_new);
  Mesh out = mesh;
  out.vertices.rowwise() += delta.transpose();
  return out;
}

std::vector<Role> assign_roles(const std::vector<RoleFeatures>& features) {
  if (features.size() != 2) {
    throw UnsupportedCardinalityError(
        "role assignment expects exactly 2 detections, got " +
        std::to_string(features.size()));
  }
  for (const auto& f : features) {
    if (!(f.suit_score >= 0.0) || !(f.suit_score <= 1.0)) {
      throw InvalidInputError("suit_score must be in [0, 1]");
    }
  }
  if (features[0].suit_score == features[1].suit_score) {
    throw AmbiguousRoleError("equal suit scores; cannot separate roles");
  }
  if (features[0].suit_score > features[1].suit_score) {
    return {Role::Therapist, Role::Child};
  }
  return {Role::Child, Role::Therapist};
}

Skeleton apply_tilt(const Skeleton& skel, const TiltModel& model) {
  Skeleton out = skel;
  for (auto& [name, joint] : out.joints) {
    joint.p.y() -= model.slope_m * joint.p.z() + model.offset_b;
  }
  return out;
}

const JointMap& default_map_to_common(Convention source) {
  static const JointMap kinect = make_map({
      {"head", {"head"}},
      {"neck", {"neck"}},
      {"shoulder_left", {"shoulder_left"}},
      {"shoulder_right", {"shoulder_right"}},
      {"elbow_left", {"elbow_left"}},
      {"elbow_right", {"elbow_right"}},
      {"wrist_left", {"wrist_left"}},
      {"wrist_right", {"wrist_right"}},
      {"spine_mid", {"spine_mid"}},
      {"hip_center", {"spine_base"}},
  });
  static const JointMap smpl = make_map({
      {"head", {"head"}},
      {"neck", {"neck"}},
      {"shoulder_left", {"shoulder_left"}},
      {"shoulder_right", {"shoulder_right"}},
      {"elbow_left", {"elbow_left"}},
      {"elbow_right", {"elbow_right"}},
      {"wrist_left", {"wrist_left"}},
      {"wrist_right", {"wrist_right"}},
      {"spine_mid", {"spine1", "spine3"}},
      {"hip_center", {"hip_left", "hip_right"}},
  });
  static const JointMap identity = make_map({
      {"head", {"head"}},
      {"neck", {"neck"}},
      {"shoulder_left", {"shoulder_left"}},
      {"shoulder_right", {"shoulder_right"}},
      {"elbow_left", {"elbow_left"}},
      {"elbow_right", {"elbow_right"}},
      {"wrist_left", {"wrist_left"}},
      {"wrist_right", {"wrist_right"}},
      {"spine_mid", {"spine_mid"}},
      {"hip_center", {"hip_center"}},
  });
  switch (source) {
    case Convention::Kinect25: return kinect;
    case Convention::Smpl24: return smpl;
    case Convention::Bev: return smpl;
    case Convention::Common: return identity;
  }
  return identity;
}

JointRegressor load_joint_regressor(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open joint regressor file: " + path);
  }
  std::string line;
  long line_no = 0;
  Eigen::Index rows = 0, cols = 0;
  std::vector<Eigen::Triplet<double>> triplets;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    if (!have_header) {
      if (!(ss >> rows >> cols)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("expected 'K N' header in regressor file", line_no);
      }
      if (rows < 1 || cols < 1) {
        throw ParseError("regressor dimensions must be positive", line_no);
      }
      have_header = true;
      continue;
    }
    Eigen::Index row, col;
    double weight;
    if (!(ss >> row >> col >> weight)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError("expected 'row col weight' triplet", line_no);
    }
    if (row < 0 || row >= rows || col < 0 || col >= cols) {
      throw ParseError("triplet index out of range", line_no);
    }
    triplets.emplace_back(row, col, weight);
  }
  if (!have_header) {
    throw ParseError("empty joint regressor file: " + path);
  }
  JointRegressor regressor;
  regressor.weights.resize(rows, cols);
  regressor.weights.setFromTriplets(triplets.begin(), triplets.end());
  const auto& smpl_names = convention_joint_names(Convention::Smpl24);
  if (static_cast<std::size_t>(rows) == smpl_names.size()) {
    regressor.joint_names = smpl_names;
  } else {
    for (Eigen::Index k = 0; k < rows; ++k) {
      regressor.joint_names.push_back("joint_" + std::to_string(k));
    }
    regressor.convention = Convention::Common;
  }
  regressor.validate();
  return regressor;
}

void save_joint_regressor(const JointRegressor& regressor,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write joint regressor file: " + path);
  }
  out << regressor.weights.rows() << " " << regressor.weights.cols() << "\n";
  out.precision(17);
  for (Eigen::Index k = 0; k < regressor.weights.rows(); ++k) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator
             it(regressor.weights, k);
         it; ++it) {
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
}

JointMap load_joint_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open joint map file: " + path);
  }
  JointMap map;
  std::string line;
  long line_no = 0;
  auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return std::string();
    return s.substr(begin, end - begin + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto arrow = line.find("<-");
    if (arrow == std::string::npos) {
      throw ParseError("expected 'target <- source[,source]'", line_no);
    }
    JointMapEntry entry;
    entry.target = trim(line.substr(0, arrow));
    std::string rhs = line.substr(arrow + 2);
    std::size_t start = 0;
    while (start <= rhs.size()) {
      const auto comma = rhs.find(',', start);
      const std::string source =
          trim(rhs.substr(start, comma == std::string::npos ? std::string::npos
                                                            : comma - start));
      if (!source.empty()) entry.sources.push_back(source);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (entry.target.empty() || entry.sources.empty()) {
      throw ParseError("malformed joint map entry", line_no);
    }
    map.entries.push_back(std::move(entry));
  }
  validate_map(map);
  return map;
}

void save_joint_map(const JointMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write joint map file: " + path);
  }
  for (const auto& entry : map.entries) {
    out << entry.target << " <- " << entry.sources[0];
    if (entry.sources.size() > 1) out << "," << entry.sources[1];
    out << "\n";
  }
}

}  // namespace posecal
