#pragma once

// Brute-force reference implementations used as independent oracles by the
// unit and acceptance suites. Everything here is deliberately the dumbest
// possible formulation and must stay independent of the library internals
// it checks.

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "posecal/mask.hpp"
#include "posecal/skeleton.hpp"

namespace oracles {

inline double dice_bruteforce(const posecal::SilhouetteMask& a,
                              const posecal::SilhouetteMask& b) {
  std::uint64_t size_a = 0, size_b = 0, inter = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) {
    const bool in_a = a.bits[i] != 0;
    const bool in_b = b.bits[i] != 0;
    size_a += in_a;
    size_b += in_b;
    inter += in_a && in_b;
  }
  if (size_a + size_b == 0) return 0.0;
  return 2.0 * static_cast<double>(inter) /
         static_cast<double>(size_a + size_b);
}

inline std::pair<double, double> centroid_bruteforce(
    const posecal::SilhouetteMask& mask) {
  double sum_x = 0.0, sum_y = 0.0;
  std::uint64_t count = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sum_x += x;
        sum_y += y;
        ++count;
      }
    }
  }
  return {sum_x / static_cast<double>(count),
          sum_y / static_cast<double>(count)};
}

/// Dilates `marks` by a closed disk: per output pixel, scan every marked
/// pixel and test the squared Euclidean distance.
inline posecal::SilhouetteMask dilate_bruteforce(
    const posecal::SilhouetteMask& marks, double radius) {
  posecal::SilhouetteMask out =
      posecal::SilhouetteMask::zeros(marks.width, marks.height);
  std::vector<std::pair<int, int>> marked;
  for (int y = 0; y < marks.height; ++y) {
    for (int x = 0; x < marks.width; ++x) {
      if (marks.at(x, y)) marked.emplace_back(x, y);
    }
  }
  const double r_sq = radius * radius;
  for (int y = 0; y < marks.height; ++y) {
    for (int x = 0; x < marks.width; ++x) {
      for (const auto& [mx, my] : marked) {
        const double dx = x - mx;
        const double dy = y - my;
        if (dx * dx + dy * dy <= r_sq) {
          out.set(x, y);
          break;
        }
      }
    }
  }
  return out;
}

/// Eq.-style RMSE recomputed with explicit coordinate differences.
inline double rmse_bruteforce(const posecal::Skeleton& gt,
                              const posecal::Skeleton& est) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [name, joint] : gt.joints) {
    const auto it = est.joints.find(name);
    if (it == est.joints.end()) continue;
    const double dx = joint.p.x() - it->second.p.x();
    const double dy = joint.p.y() - it->second.p.y();
    const double dz = joint.p.z() - it->second.p.z();
    sum += dx * dx + dy * dy + dz * dz;
    ++n;
  }
  return std::sqrt(sum / n);
}

/// Triple-loop dense regressor multiply.
inline std::map<std::string, Eigen::Vector3d> regress_bruteforce(
    const Eigen::MatrixXd& dense_weights,
    const std::vector<std::string>& names,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& vertices) {
  std::map<std::string, Eigen::Vector3d> joints;
  for (Eigen::Index k = 0; k < dense_weights.rows(); ++k) {
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    for (Eigen::Index n = 0; n < dense_weights.cols(); ++n) {
      for (int c = 0; c < 3; ++c) {
        acc[c] += dense_weights(k, n) * vertices(n, c);
      }
    }
    joints[names[static_cast<std::size_t>(k)]] = acc;
  }
  return joints;
}

}  // namespace oracles
