#include "posecal/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "posecal/errors.hpp"
#include "posecal/metrics.hpp"
#include "posecal/rng.hpp"

namespace posecal {

namespace {

// Body proportions as fractions of standing height, measured up from the
// floor; lateral offsets as fractions of height. Enough articulation to
// exercise every upper-body metric without a body model.
struct JointSpec {
  const char* name;
  double up_fraction;
  double lateral_fraction;  // signed, fraction of height
};

constexpr JointSpec kBodyJoints[] = {
    {"head", 0.93, 0.0},          {"neck", 0.87, 0.0},
    {"shoulder_left", 0.82, -0.115}, {"shoulder_right", 0.82, 0.115},
    {"elbow_left", 0.63, -0.13},  {"elbow_right", 0.63, 0.13},
    {"wrist_left", 0.49, -0.14},  {"wrist_right", 0.49, 0.14},
    {"spine_mid", 0.70, 0.0},     {"hip_center", 0.53, 0.0},
};

constexpr double kFloorY = 1.0;         // meters below the optical axis
constexpr double kBodyHalfWidth = 0.14; // fraction of height
constexpr double kNeckFraction = 0.04;  // neck radius as fraction of height
constexpr double kPersonSpacing = 0.8;  // meters between body centers
constexpr double kTherapistSuitScore = 0.85;
constexpr double kChildSuitScore = 0.15;

Skeleton body_at(double height, double center_x, double depth) {
  Skeleton skel;
  skel.convention = Convention::Common;
  for (const JointSpec& spec : kBodyJoints) {
    Joint joint;
    joint.p = {center_x + spec.lateral_fraction * height,
               kFloorY - spec.up_fraction * height, depth};
    skel.joints[spec.name] = joint;
  }
  return skel;
}

}  // namespace

void SimConfig::validate() const {
  camera.validate();
  if (persons.empty()) {
    throw InvalidInputError("simulation needs at least one person");
  }
  std::set<std::string> ids;
  for (const auto& person : persons) {
    if (person.id.empty()) {
      throw InvalidInputError("simulated person needs an id");
    }
    if (!ids.insert(person.id).second) {
      throw InvalidInputError("duplicate simulated person id: " + person.id);
    }
    if (!(person.height > 0.0)) {
      throw InvalidInputError("simulated person height must be positive");
    }
    if (!(slope * person.height + intercept > 0.0)) {
      throw InvalidInputError("height->f law gives non-positive focal for " +
                              person.id);
    }
  }
  if (waypoint_depths.empty()) {
    throw InvalidInputError("simulation needs at least one waypoint depth");
  }
  for (double depth : waypoint_depths) {
    if (!(depth > 0.0)) {
      throw InvalidInputError("waypoint depths must be positive");
    }
  }
  if (frames_per_waypoint < 1) {
    throw InvalidInputError("frames_per_waypoint must be >= 1");
  }
  if (noise_s < 0.0 || noise_bbox_px < 0.0) {
    throw InvalidInputError("noise levels must be >= 0");
  }
  if (outlier_fraction < 0.0 || outlier_fraction >= 1.0) {
    throw InvalidInputError("outlier fraction must be in [0, 1)");
  }
}

Simulation simulate(const SimConfig& cfg) {
  cfg.validate();
  Simulation sim;
  sim.config = cfg;

  Rng rng(cfg.seed);
  const auto person_count = cfg.persons.size();
  const double mid = (static_cast<double>(person_count) - 1.0) / 2.0;

  long frame_index = 0;
  for (std::size_t wi = 0; wi < cfg.waypoint_depths.size(); ++wi) {
    const double depth = cfg.waypoint_depths[wi];
    for (int rep = 0; rep < cfg.frames_per_waypoint; ++rep, ++frame_index) {
      SimFrame frame;
      frame.frame = frame_index;
      frame.waypoint_depth = depth;

      for (std::size_t pi = 0; pi < person_count; ++pi) {
        const SimPerson& person = cfg.persons[pi];
        const double height = person.height;
        const double f_true = cfg.slope * height + cfg.intercept;
        const double center_x = (static_cast<double>(pi) - mid) * kPersonSpacing;
        const double center_y = kFloorY - height / 2.0;

        // Exact detector record: project the body extents, then choose
        // (s, x, y) so that the translation equations reproduce the body
        // center under the person's true focal length.
        const double fc = cfg.camera.f;
        BoundingBox bbox;
        bbox.x_min = fc * (center_x - kBodyHalfWidth * height) / depth +
                     cfg.camera.w / 2.0;
        bbox.x_max = fc * (center_x + kBodyHalfWidth * height) / depth +
                     cfg.camera.w / 2.0;
        bbox.y_min = fc * (kFloorY - height) / depth + cfg.camera.h / 2.0;
        bbox.y_max = fc * kFloorY / depth + cfg.camera.h / 2.0;
        const BoxGeometry geo = bbox_geometry(bbox);
        const double s_exact = cfg.camera.mu * f_true / (depth * geo.alpha);

        WeakPerspectiveCam wp;
        wp.s = s_exact;
        wp.x = (center_x * f_true / depth - geo.c_x + cfg.camera.w / 2.0) /
               geo.alpha;
        wp.y = (center_y * f_true / depth - geo.c_y + cfg.camera.h / 2.0) /
               geo.alpha;

        SimPersonFrame out;
        out.gt_skeleton = body_at(height, center_x, depth);
        out.neck_radius_px = fc * kNeckFraction * height / depth;
        out.suit_score = person.role == Role::Therapist ? kTherapistSuitScore
                                                        : kChildSuitScore;

        // Noise and outliers go on top of the exact record.
        Detection det{bbox, wp};
        if (cfg.noise_s > 0.0) {
          const double factor = 1.0 + cfg.noise_s * rng.normal();
          det.wp.s = std::max(s_exact * factor, 0.05 * s_exact);
        }
        if (cfg.noise_bbox_px > 0.0) {
          det.bbox.x_min += cfg.noise_bbox_px * rng.normal();
          det.bbox.x_max += cfg.noise_bbox_px * rng.normal();
          det.bbox.y_min += cfg.noise_bbox_px * rng.normal();
          det.bbox.y_max += cfg.noise_bbox_px * rng.normal();
          det.bbox.x_max = std::max(det.bbox.x_max, det.bbox.x_min + 1.0);
          det.bbox.y_max = std::max(det.bbox.y_max, det.bbox.y_min + 1.0);
        }
        if (cfg.outlier_fraction > 0.0 && rng.bernoulli(cfg.outlier_fraction)) {
          out.outlier = true;
          det.wp.s = rng.uniform(0.2 * s_exact, 5.0 * s_exact);
        }
        out.det = det;

        // What the unpersonalized pipeline reconstructs: the true local
        // body shape placed at the translation implied by the global f.
        const Eigen::Vector3d t_true(center_x, center_y, depth);
        const TranslationVector t_global =
            translation_vector(cfg.camera, det.bbox, det.wp);
        out.est_skeleton = out.gt_skeleton;
        for (auto& [name, joint] : out.est_skeleton.joints) {
          joint.p += t_global.t - t_true;
        }

        if (cfg.emit_masks) {
          Joints2d joints2d;
          for (const auto& [name, joint] : out.gt_skeleton.joints) {
            joints2d[name] = project_point(cfg.camera, joint.p);
          }
          out.gt_mask = rasterize_skeleton(joints2d, default_bone_graph(),
                                           out.neck_radius_px, cfg.camera.w,
                                           cfg.camera.h);
        }
        frame.persons.push_back(std::move(out));
      }
      sim.frames.push_back(std::move(frame));
    }
  }

  for (const SimPerson& person : cfg.persons) {
    for (std::size_t wi = 0; wi < cfg.waypoint_depths.size(); ++wi) {
      WindowRecord window;
      window.person_id = person.id;
      window.start_frame = static_cast<long>(wi) * cfg.frames_per_waypoint;
      window.end_frame = window.start_frame + cfg.frames_per_waypoint - 1;
      window.depth = cfg.waypoint_depths[wi];
      sim.windows.push_back(window);
    }
  }
  return sim;
}

namespace {

SessionDataset to_session(const Simulation& sim, bool ground_truth) {
  SessionDataset dataset;
  dataset.camera = sim.config.camera;
  for (const SimPerson& person : sim.config.persons) {
    PersonMeta meta;
    meta.id = person.id;
    meta.role = person.role;
    meta.height = person.height;
    dataset.persons.push_back(meta);
  }
  for (const SimFrame& frame : sim.frames) {
    FrameRecord record;
    record.frame = frame.frame;
    record.timestamp = static_cast<double>(frame.frame) / 30.0;
    for (std::size_t pi = 0; pi < frame.persons.size(); ++pi) {
      const SimPersonFrame& sp = frame.persons[pi];
      PersonEntry entry;
      entry.person_id = sim.config.persons[pi].id;
      entry.bbox = sp.det.bbox;
      entry.wp = sp.det.wp;
      entry.skeleton = ground_truth ? sp.gt_skeleton : sp.est_skeleton;
      entry.suit_score = sp.suit_score;
      entry.neck_radius = sp.neck_radius_px;
      if (ground_truth && sp.gt_mask) {
        entry.mask = std::make_shared<SilhouetteMask>(*sp.gt_mask);
      }
      record.persons.push_back(std::move(entry));
    }
    dataset.frames.push_back(std::move(record));
  }
  return dataset;
}

}  // namespace

SessionDataset Simulation::gt_session() const { return to_session(*this, true); }

SessionDataset Simulation::est_session() const {
  return to_session(*this, false);
}

SessionDataset inject_kinect_dropout(const SessionDataset& dataset,
                                     double fraction, std::uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) {
    throw InvalidInputError("dropout fraction must be in [0, 1]");
  }
  SessionDataset out = dataset;
  Rng rng(seed);
  for (FrameRecord& frame : out.frames) {
    std::size_t with_skeleton = 0;
    for (const PersonEntry& entry : frame.persons) {
      if (entry.skeleton) ++with_skeleton;
    }
    if (with_skeleton < 2) continue;
    if (rng.bernoulli(fraction)) {
      for (PersonEntry& entry : frame.persons) {
        entry.skeleton.reset();
      }
    }
  }
  return out;
}

}  // namespace posecal
