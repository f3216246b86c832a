#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "posecal/calibration.hpp"
#include "posecal/camera.hpp"
#include "posecal/mask.hpp"
#include "posecal/skeleton.hpp"

namespace posecal {

/// One person listed in the session metadata.
struct PersonMeta {
  std::string id;
  std::optional<Role> role;
  double height = 0.0;  // meters
  std::optional<double> personalized_f;
};

/// One person in one frame. Detector fields (bbox, weak-perspective params)
/// may be missing: the record then loads fine but is unusable for the
/// depth-from-scale operations.
struct PersonEntry {
  std::string person_id;
  std::optional<BoundingBox> bbox;
  std::optional<WeakPerspectiveCam> wp;
  std::optional<Skeleton> skeleton;
  std::optional<std::string> mask_path;  // relative to the session file
  std::shared_ptr<const SilhouetteMask> mask;  // in-memory, not serialized
  std::optional<double> suit_score;
  std::optional<double> neck_radius;  // pixels

  bool usable_for_depth() const { return bbox.has_value() && wp.has_value(); }
  std::optional<Detection> detection() const {
    if (!usable_for_depth()) return std::nullopt;
    return Detection{*bbox, *wp};
  }
};

struct FrameRecord {
  long frame = 0;
  std::optional<double> timestamp;  // seconds
  std::vector<PersonEntry> persons;

  const PersonEntry* find(const std::string& person_id) const;
};

struct SessionDataset {
  CameraIntrinsics camera;
  std::vector<PersonMeta> persons;
  std::vector<FrameRecord> frames;
  std::string base_dir;  // directory of the file this dataset came from

  const PersonMeta* find_person(const std::string& id) const;
  const PersonMeta* find_role(Role role) const;
};

/// Loads a line-delimited session: a header object (camera + persons)
/// followed by one frame object per line. Frame indices must be strictly
/// increasing, every person id referenced by a frame must appear in the
/// metadata, and every referenced mask file must exist; violations raise
/// ParseError with the offending line number. Unknown fields are ignored
/// with a warning.
SessionDataset load_session(const std::string& path,
                            std::vector<std::string>* warnings = nullptr);

/// Writes the session next to any in-memory masks (stored as PBM files
/// referenced by relative path). load_session(save_session(x)) is the
/// identity on the data model.
void save_session(const SessionDataset& dataset, const std::string& path);

/// Serializes a session to the same line format without touching the
/// filesystem (in-memory masks are skipped); used for byte-level
/// determinism checks.
std::string session_to_string(const SessionDataset& dataset);

/// Resolves and loads the silhouette of an entry: the in-memory mask when
/// present, otherwise the referenced PBM file.
std::optional<SilhouetteMask> entry_mask(const SessionDataset& dataset,
                                         const PersonEntry& entry);

/// Fitted model persisted together with the configuration that produced it.
struct ModelFile {
  LinearModel model;
  RansacConfig config;
};

void save_linear_model(const ModelFile& file, const std::string& path);
std::string linear_model_to_string(const ModelFile& file);
ModelFile load_linear_model(const std::string& path);

/// One row of a height/focal points CSV.
struct PointRecord {
  std::string person_id;
  HeightFocalPoint point;
  std::optional<double> depth;  // meters, when known
};

/// CSV with header person_id,height_m,focal_px,depth_m,weight. The weight
/// column may be empty: it is then derived from the depth (Z^-4), or 1 when
/// the depth is missing too.
std::vector<PointRecord> load_points_csv(const std::string& path);
void save_points_csv(const std::vector<PointRecord>& records,
                     const std::string& path);

/// Calibration windows CSV with header person_id,start_frame,end_frame,depth_m.
struct WindowRecord {
  std::string person_id;
  long start_frame = 0;
  long end_frame = 0;
  double depth = 0.0;
};

std::vector<WindowRecord> load_windows_csv(const std::string& path);
void save_windows_csv(const std::vector<WindowRecord>& records,
                      const std::string& path);

}  // namespace posecal
