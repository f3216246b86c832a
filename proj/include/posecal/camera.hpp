#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>

namespace posecal {

/// Pinhole intrinsics of the reconstruction pipeline. The principal point is
/// fixed at the image center (w/2, h/2); `mu` is the multiplicative factor
/// of the depth-from-scale relation (default 2).
struct CameraIntrinsics {
  double f = 0.0;  ///< focal length in pixels, > 0
  int w = 0;       ///< image width in pixels
  int h = 0;       ///< image height in pixels
  double mu = 2.0;

  /// Throws InvalidInputError unless f > 0, w >= 1, h >= 1, mu > 0.
  void validate() const;
};

/// Axis-aligned pixel box. Valid when x_max > x_min and y_max > y_min.
struct BoundingBox {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// Center and size of a bounding box: alpha is the larger side length.
struct BoxGeometry {
  double c_x = 0.0;
  double c_y = 0.0;
  double alpha = 0.0;
};

/// Per-detection weak-perspective parameters predicted by the detector:
/// scale s and normalized 2D body-center offsets (x, y).
struct WeakPerspectiveCam {
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Metric translation of one person, camera frame, +z away from the camera.
struct TranslationVector {
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  double depth() const { return t.z(); }
};

/// Linear y-offset-vs-depth correction for a tilted camera:
/// y_error = slope_m * z + offset_b.
struct TiltModel {
  double slope_m = 0.0;
  double offset_b = 0.0;
};

/// Center and size of a box. Throws InvalidInputError on a degenerate box.
BoxGeometry bbox_geometry(const BoundingBox& bbox);

/// Depth of a person from the weak-perspective scale: mu * f / (s * alpha).
double depth_from_scale(const CameraIntrinsics& cam, double s, double alpha);

/// Focal length from a known depth: d * s * alpha / mu (the algebraic
/// inverse of depth_from_scale).
double focal_from_known_depth(double depth, double s, double alpha, double mu);

/// Batched focal inversion over per-frame (s, alpha) pairs at one known
/// depth. Routed through the active SIMD kernel.
void focal_from_known_depth_batch(double depth, std::span<const double> s,
                                  std::span<const double> alpha, double mu,
                                  std::span<double> out);

/// Metric translation of the person described by (bbox, wp) under `cam`:
///   t = [ d*(x*alpha + c_x - w/2)/f, d*(y*alpha + c_y - h/2)/f, d ]
/// with d = depth_from_scale(cam, wp.s, alpha).
TranslationVector translation_vector(const CameraIntrinsics& cam,
                                     const BoundingBox& bbox,
                                     const WeakPerspectiveCam& wp);

/// Pinhole projection with the principal point at the image center.
/// Throws BehindCameraError when p.z() <= 0.
Eigen::Vector2d project_point(const CameraIntrinsics& cam,
                              const Eigen::Vector3d& p);

/// Ordinary least squares line through (z, y_error) samples.
/// Throws UnderdeterminedError with fewer than 2 distinct z values.
TiltModel fit_tilt(std::span<const std::pair<double, double>> samples);

}  // namespace posecal
