#include "posecal/camera.hpp"

#include <cmath>

#include "posecal/errors.hpp"
#include "posecal/kernels.hpp"

namespace posecal {

void CameraIntrinsics::validate() const {
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw InvalidInputError("camera focal length must be positive");
  }
  if (w < 1 || h < 1) {
    throw InvalidInputError("image dimensions must be >= 1");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw InvalidInputError("mu must be positive");
  }
}

BoxGeometry bbox_geometry(const BoundingBox& bbox) {
  const double width = bbox.x_max - bbox.x_min;
  const double height = bbox.y_max - bbox.y_min;
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InvalidInputError("degenerate bounding box");
  }
  BoxGeometry g;
  g.c_x = (bbox.x_min + bbox.x_max) / 2.0;
  g.c_y = (bbox.y_min + bbox.y_max) / 2.0;
  g.alpha = std::max(width, height);
  return g;
}

double depth_from_scale(const CameraIntrinsics& cam, double s, double alpha) {
  cam.validate();
  if (!(s > 0.0) || !(alpha > 0.0)) {
    throw InvalidInputError("scale and box size must be positive");
  }
  return cam.mu * cam.f / (s * alpha);
}

double focal_from_known_depth(double depth, double s, double alpha,
                              double mu) {
  if (!(depth > 0.0) || !(s > 0.0) || !(alpha > 0.0) || !(mu > 0.0)) {
    throw InvalidInputError("focal inversion requires positive inputs");
  }
  return ((depth * s) * alpha) / mu;
}

void focal_from_known_depth_batch(double depth, std::span<const double> s,
                                  std::span<const double> alpha, double mu,
                                  std::span<double> out) {
  if (s.size() != alpha.size() || s.size() != out.size()) {
    throw DimensionMismatchError("batch spans must have equal length");
  }
  if (!(depth > 0.0) || !(mu > 0.0)) {
    throw InvalidInputError("focal inversion requires positive inputs");
  }
  kernels::active().batch_focal_from_depth(depth, mu, s.data(), alpha.data(),
                                           out.data(), s.size());
}

TranslationVector translation_vector(const CameraIntrinsics& cam,
                                     const BoundingBox& bbox,
                                     const WeakPerspectiveCam& wp) {
  const BoxGeometry g = bbox_geometry(bbox);
  const double d = depth_from_scale(cam, wp.s, g.alpha);
  TranslationVector tv;
  tv.t.x() = d * (wp.x * g.alpha + g.c_x - cam.w / 2.0) / cam.f;
  tv.t.y() = d * (wp.y * g.alpha + g.c_y - cam.h / 2.0) / cam.f;
  tv.t.z() = d;
  return tv;
}

Eigen::Vector2d project_point(const CameraIntrinsics& cam,
                              const Eigen::Vector3d& p) {
  cam.validate();
  if (!(p.z() > 0.0)) {
    throw BehindCameraError("point is behind the camera");
  }
  return {cam.f * p.x() / p.z() + cam.w / 2.0,
          cam.f * p.y() / p.z() + cam.h / 2.0};
}

TiltModel fit_tilt(std::span<const std::pair<double, double>> samples) {
  const auto n = samples.size();
  if (n < 2) {
    throw UnderdeterminedError("tilt fit needs at least 2 samples");
  }
  double sum_z = 0.0, sum_y = 0.0, sum_zz = 0.0, sum_zy = 0.0;
  for (const auto& [z, y] : samples) {
    sum_z += z;
    sum_y += y;
    sum_zz += z * z;
    sum_zy += z * y;
  }
  const double denom = static_cast<double>(n) * sum_zz - sum_z * sum_z;
  if (denom == 0.0) {
    throw UnderdeterminedError("tilt fit needs at least 2 distinct depths");
  }
  TiltModel model;
  model.slope_m = (static_cast<double>(n) * sum_zy - sum_z * sum_y) / denom;
  model.offset_b = (sum_zz * sum_y - sum_z * sum_zy) / denom;
  return model;
}

}  // namespace posecal
