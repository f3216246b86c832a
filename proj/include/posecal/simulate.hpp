#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "posecal/calibration.hpp"
#include "posecal/camera.hpp"
#include "posecal/mask.hpp"
#include "posecal/session.hpp"
#include "posecal/skeleton.hpp"

namespace posecal {

struct SimPerson {
  std::string id;
  Role role = Role::Child;
  double height = 0.0;  // meters
};

/// Synthetic two-person session under the exact pinhole/weak-perspective
/// model: the detector records satisfy the depth-from-scale relation for
/// each person's true focal length (slope * height + intercept) before any
/// noise is injected.
struct SimConfig {
  double slope = 164.47;      // true height -> f law
  double intercept = 135.23;
  std::vector<SimPerson> persons;
  std::vector<double> waypoint_depths = {1.3, 1.9, 2.2, 2.5, 3.0};
  int frames_per_waypoint = 30;
  CameraIntrinsics camera{365.6, 512, 424, 2.0};
  double noise_s = 0.0;        // multiplicative stddev on the scale s
  double noise_bbox_px = 0.0;  // additive stddev on each box corner
  double outlier_fraction = 0.0;  // chance a frame's s is replaced by junk
  std::uint64_t seed = 0;
  bool emit_masks = false;  // rasterize ground-truth silhouettes

  void validate() const;
};

/// One simulated person in one frame.
struct SimPersonFrame {
  Detection det;         // noisy detector record
  Skeleton gt_skeleton;  // exact ground truth, Common convention
  Skeleton est_skeleton; // reconstruction translated with the global camera f
  std::optional<SilhouetteMask> gt_mask;
  double neck_radius_px = 0.0;
  double suit_score = 0.0;
  bool outlier = false;
};

struct SimFrame {
  long frame = 0;
  double waypoint_depth = 0.0;
  std::vector<SimPersonFrame> persons;  // parallel to SimConfig::persons
};

struct Simulation {
  SimConfig config;
  std::vector<SimFrame> frames;
  std::vector<WindowRecord> windows;  // known-position calibration windows

  /// Detector records plus exact ground-truth skeletons (and masks when
  /// emitted).
  SessionDataset gt_session() const;
  /// Detector records plus skeletons translated with the global camera
  /// focal length, i.e. what the unpersonalized pipeline would output.
  SessionDataset est_session() const;
};

/// Deterministic for a given config; every draw comes from one seeded
/// generator consumed in frame order.
Simulation simulate(const SimConfig& cfg);

/// Removes the skeletons of both persons from frames picked by a seeded
/// Bernoulli draw; models a depth camera losing track.
SessionDataset inject_kinect_dropout(const SessionDataset& dataset,
                                     double fraction, std::uint64_t seed);

}  // namespace posecal
