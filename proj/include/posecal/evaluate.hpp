#pragma once

#include <optional>
#include <string>
#include <vector>

#include "posecal/metrics.hpp"
#include "posecal/session.hpp"

namespace posecal {

struct EvalOptions {
  double default_neck_radius = 6.0;  // pixels, when the gt record has none
  BoneGraph bones = default_bone_graph();
  bool tilt_correct = false;  // fit + remove the linear y-vs-depth offset
  std::optional<JointMap> gt_map;   // applied when gt skeletons are not Common
  std::optional<JointMap> est_map;  // likewise for the estimate
};

/// Per-frame evaluation of an estimated session against ground truth,
/// aligned by frame index. Dice values exist only where the ground truth
/// has a silhouette and the estimate a skeleton; RMSE only where both sides
/// have skeletons for at least one shared person.
struct EvalReport {
  std::vector<long> frames;  // gt frame indices
  std::vector<std::optional<double>> rmse;            // meters
  std::vector<std::optional<double>> dice_therapist;  // [0,1]
  std::vector<std::optional<double>> dice_child;
  std::vector<bool> detected_both;  // both roles estimated in this frame

  std::optional<double> mean_rmse;
  std::optional<double> mean_dice_therapist;
  std::optional<double> mean_dice_child;
  /// 100 * (gt frames with both roles where the estimate also has both) /
  /// (gt frames with both roles); empty when the denominator is zero.
  std::optional<double> detection_rate_pct;
  std::optional<TiltModel> tilt;  // the correction that was applied
};

EvalReport evaluate(const SessionDataset& gt, const SessionDataset& est,
                    const EvalOptions& opts = {},
                    std::vector<std::string>* warnings = nullptr);

/// Percentage of ground-truth frames with both roles present in which the
/// estimate also produced both skeletons. Frames are aligned by index.
/// Throws InvalidInputError when the ground truth has no such frame.
double detection_rate(const SessionDataset& gt, const SessionDataset& est);

/// Depth (z) of one joint of one person across the frames of a session;
/// frames without the person or the joint are absent. The joint name must
/// belong to the convention of the person's skeletons.
std::vector<std::optional<double>> depth_trace(const SessionDataset& dataset,
                                               const std::string& person_id,
                                               const std::string& joint_name);

/// CSV with header frame,rmse_m,dice_therapist,dice_child,detected_both;
/// missing values are empty fields, numbers use fixed 6-decimal formatting.
void write_eval_csv(const EvalReport& report, const std::string& path);

void write_trace_csv(const std::vector<long>& frames,
                     const std::vector<std::optional<double>>& trace,
                     const std::string& path);

/// Minimal SVG polyline of a depth trace (frame index vs depth).
void write_trace_svg(const std::vector<long>& frames,
                     const std::vector<std::optional<double>>& trace,
                     const std::string& path);

}  // namespace posecal
