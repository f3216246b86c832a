#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posecal/camera.hpp"

namespace posecal {

/// Joint-naming convention of a skeleton.
enum class Convention { Kinect25, Smpl24, Bev, Common };

std::string convention_name(Convention c);
Convention parse_convention(const std::string& name);

/// Known joint names of a convention. Bev shares the Smpl24 vocabulary.
const std::vector<std::string>& convention_joint_names(Convention c);

struct Joint {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();  // meters, camera frame
  std::optional<double> confidence;             // in [0,1] when present
};

/// Named 3D joints under one convention. Joint names are unique by
/// construction (map keys).
struct Skeleton {
  Convention convention = Convention::Common;
  std::map<std::string, Joint> joints;

  bool has(const std::string& name) const { return joints.count(name) > 0; }
};

/// Triangle-soup-free body mesh: just the vertex positions.
struct Mesh {
  Eigen::Matrix<double, Eigen::Dynamic, 3> vertices;
};

/// Linear map from mesh vertices to skeleton joints (rows are joints).
struct JointRegressor {
  Eigen::SparseMatrix<double, Eigen::RowMajor> weights;  // K x N
  std::vector<std::string> joint_names;                  // K labels
  Convention convention = Convention::Smpl24;

  /// Throws InvalidInputError if any row is empty or joint_names does not
  /// match the row count. Rows whose weights do not sum to 1 within 1e-6
  /// only produce a warning: regressors in the wild are convex combinations
  /// but that is not guaranteed.
  void validate(std::vector<std::string>* warnings = nullptr) const;
};

/// Correspondence from a source convention into the Common joint set.
/// Entries with two sources map to the midpoint of the two source joints.
struct JointMapEntry {
  std::string target;
  std::vector<std::string> sources;  // 1 or 2 names
};

struct JointMap {
  std::vector<JointMapEntry> entries;
};

enum class Role { Therapist, Child };

std::string role_name(Role r);
Role parse_role(const std::string& name);

/// Per-detection features used to tell the two participants apart. The
/// therapist wears the marker suit, so the detection with the strictly
/// greater suit score is the therapist.
struct RoleFeatures {
  double suit_score = 0.0;     // in [0, 1]
  double bbox_height_px = 0.0;
};

/// joints[k] = sum_n weights(k, n) * vertices(n).
/// Throws DimensionMismatchError when the regressor column count differs
/// from the vertex count.
Skeleton regress_joints(const Mesh& mesh, const JointRegressor& regressor);

/// Maps a skeleton into the Common convention. Missing source joints drop
/// the corresponding target with a warning; an empty result is an error.
Skeleton map_to_common(const Skeleton& skel, const JointMap& map,
                       std::vector<std::string>* warnings = nullptr);

/// Replaces the translation component computed under cam_old with the one
/// under cam_new: p' = p - t(cam_old) + t(cam_new). Both intrinsics must
/// share w, h and mu.
Skeleton retranslate(const Skeleton& skel, const BoundingBox& bbox,
                     const WeakPerspectiveCam& wp,
                     const CameraIntrinsics& cam_old,
                     const CameraIntrinsics& cam_new);
Mesh retranslate(const Mesh& mesh, const BoundingBox& bbox,
                 const WeakPerspectiveCam& wp, const CameraIntrinsics& cam_old,
                 const CameraIntrinsics& cam_new);

/// Labels exactly two detections. Throws UnsupportedCardinalityError unless
/// given 2 feature records and AmbiguousRoleError on equal suit scores.
std::vector<Role> assign_roles(const std::vector<RoleFeatures>& features);

/// Subtracts the fitted y-vs-depth offset from every joint:
/// y' = y - (slope_m * z + offset_b); x and z are untouched.
Skeleton apply_tilt(const Skeleton& skel, const TiltModel& model);

/// Built-in correspondence tables matching the files under data/.
const JointMap& default_map_to_common(Convention source);

/// Joint regressor file: "K N" header line, then "row col weight" triplets.
/// Joint names are taken from the Smpl24 vocabulary when K matches it,
/// otherwise generated as joint_<row>.
JointRegressor load_joint_regressor(const std::string& path);
void save_joint_regressor(const JointRegressor& regressor,
                          const std::string& path);

/// Joint map file: one "target <- source1[,source2]" line per entry.
/// '#' starts a comment.
JointMap load_joint_map(const std::string& path);
void save_joint_map(const JointMap& map, const std::string& path);

}  // namespace posecal
