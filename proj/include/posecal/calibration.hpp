#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posecal/camera.hpp"

namespace posecal {

/// One person as seen by the detector in one frame.
struct Detection {
  BoundingBox bbox;
  WeakPerspectiveCam wp;
};

/// Focal length measured for one person over a window of frames at a known
/// depth.
struct FocalSample {
  std::string person_id;
  double known_depth = 0.0;  // meters
  double measured_f = 0.0;   // pixels
  int window_start = 0;
  int window_end = 0;  // inclusive frame indices
};

/// One (height, focal length) observation with its regression weight.
struct HeightFocalPoint {
  double height = 0.0;  // meters
  double f = 0.0;       // pixels
  double weight = 1.0;
};

/// Fitted height -> focal-length line.
struct LinearModel {
  double slope = 0.0;      // pixels per meter
  double intercept = 0.0;  // pixels
  double r2 = 0.0;
  std::vector<std::size_t> inliers;  // indices into the fitted points

  double predict(double height) const { return slope * height + intercept; }
};

enum class Sampling {
  Auto,        ///< exhaustive pairs for n <= 12, random otherwise
  Exhaustive,  ///< all C(n,2) minimal samples
  Random,      ///< max_iterations seeded pair draws
};

struct RansacConfig {
  double inlier_threshold = 20.0;  // pixels
  int max_iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t min_points = 2;  // minimal consensus size for a line
  Sampling sampling = Sampling::Auto;
};

/// Median focal length over a window of detections at one known depth.
/// Frames with a non-positive scale or a degenerate box are skipped (with a
/// warning); if every frame is skipped or the window is empty this throws
/// InvalidInputError.
FocalSample focal_sample_from_window(std::span<const Detection> frames,
                                     double known_depth, double mu,
                                     const std::string& person_id = {},
                                     int window_start = 0,
                                     std::vector<std::string>* warnings =
                                         nullptr);

/// Perspective-uncertainty weight of a measurement at depth Z: the depth
/// uncertainty grows as Z^2, so w = 1/sigma^2 = Z^-4 (the proportionality
/// constant cancels out of every weighted fit).
double weight_from_depth(double z);

/// Weighted mean squared residual: sum w_i (f_i - f̂_i)^2 / sum w_i.
/// Requires a non-empty point set with strictly positive weights.
double weighted_loss(std::span<const HeightFocalPoint> points,
                     const LinearModel& model);

/// Weighted coefficient of determination. Zero-weight points are ignored;
/// throws InvalidInputError when the weighted variance of f is zero.
double weighted_r2(std::span<const HeightFocalPoint> points,
                   const LinearModel& model);

/// Closed-form weighted least squares line through the given points.
LinearModel weighted_least_squares(std::span<const HeightFocalPoint> points);

/// RANSAC over 2-point minimal samples. Candidates are ranked by consensus
/// size, then by the weighted loss of the candidate line over its consensus
/// set, then by lexicographically smallest inlier index set; the winner is
/// refit on its consensus with weighted least squares. Deterministic for a
/// given seed; in Random mode with max_iterations >= C(n,2) the enumeration
/// is exhaustive.
LinearModel ransac_fit(std::span<const HeightFocalPoint> points,
                       const RansacConfig& cfg);

/// Personalized focal length for a height: slope * height + intercept.
double predict_focal(const LinearModel& model, double height);

}  // namespace posecal
