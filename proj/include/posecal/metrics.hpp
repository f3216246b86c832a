#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posecal/mask.hpp"
#include "posecal/skeleton.hpp"

namespace posecal {

/// Undirected bone list used to draw a skeleton as a silhouette.
struct BoneGraph {
  std::vector<std::pair<std::string, std::string>> edges;

  /// Throws InvalidInputError on self-edges.
  void validate() const;
};

/// Upper-body bones of the Common convention.
const BoneGraph& default_bone_graph();

/// Bone graph file: one "joint_a joint_b" pair per line, '#' comments.
BoneGraph load_bone_graph(const std::string& path);

/// Root-mean-square 3D error over the joints named in both skeletons:
/// sqrt(1/N * sum over common joints of squared coordinate differences).
/// Throws InvalidInputError when no joint name is shared.
double frame_rmse(const Skeleton& gt, const Skeleton& est);

/// Arithmetic mean over the frames where the value exists.
double mean_over_valid(std::span<const std::optional<double>> series);

/// Projected joint positions in pixels, keyed by joint name.
using Joints2d = std::map<std::string, Eigen::Vector2d>;

/// Draws each bone segment with integer line stepping (plus a pixel for
/// every joint), then dilates by a disk of the given radius: a pixel is set
/// iff its squared distance to some drawn pixel is <= radius^2. Joints
/// falling outside the canvas are clipped, never errors.
SilhouetteMask rasterize_skeleton(const Joints2d& joints, const BoneGraph& bones,
                                  double radius, int width, int height);

/// Mean coordinates of the set pixels. Throws InvalidInputError on an empty
/// mask.
Eigen::Vector2d centroid(const SilhouetteMask& mask);

/// Translates `est` by the rounded centroid difference so its centroid
/// matches `ref`; pixels shifted off-canvas are dropped.
SilhouetteMask align_centroids(const SilhouetteMask& est,
                               const SilhouetteMask& ref);

/// Dice similarity 2|A∩B| / (|A|+|B|); 0 when both masks are empty.
double dice(const SilhouetteMask& a, const SilhouetteMask& b);

}  // namespace posecal
