#include "posecal/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "posecal/errors.hpp"

namespace posecal {

namespace {

std::map<long, const FrameRecord*> index_frames(const SessionDataset& ds) {
  std::map<long, const FrameRecord*> byIndex;
  for (const auto& frame : ds.frames) {
    byIndex[frame.frame] = &frame;
  }
  return byIndex;
}

bool has_both_roles(const SessionDataset& ds, const FrameRecord& frame) {
  bool therapist = false, child = false;
  for (const auto& entry : frame.persons) {
    if (!entry.skeleton) continue;
    const PersonMeta* meta = ds.find_person(entry.person_id);
    if (!meta || !meta->role) continue;
    if (*meta->role == Role::Therapist) therapist = true;
    if (*meta->role == Role::Child) child = true;
  }
  return therapist && child;
}

Skeleton to_common(const Skeleton& skel, const std::optional<JointMap>& map,
                   std::vector<std::string>* warnings) {
  if (skel.convention == Convention::Common) return skel;
  const JointMap& m = map ? *map : default_map_to_common(skel.convention);
  return map_to_common(skel, m, warnings);
}

std::string fmt6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

std::optional<double> silhouette_dice(const SessionDataset& gt_ds,
                                      const PersonEntry& gt_entry,
                                      const SessionDataset& est_ds,
                                      const Skeleton& est_common,
                                      const EvalOptions& opts,
                                      std::vector<std::string>* warnings) {
  const std::optional<SilhouetteMask> gt_mask = entry_mask(gt_ds, gt_entry);
  if (!gt_mask) return std::nullopt;

  Joints2d joints2d;
  for (const auto& [name, joint] : est_common.joints) {
    if (!(joint.p.z() > 0.0)) continue;  // behind-camera joints are dropped
    joints2d[name] = project_point(est_ds.camera, joint.p);
  }
  if (joints2d.empty()) {
    if (warnings) {
      warnings->push_back("no projectable joints for person " +
                          gt_entry.person_id);
    }
    return std::nullopt;
  }
  const double radius =
      gt_entry.neck_radius.value_or(opts.default_neck_radius);
  SilhouetteMask est_mask = rasterize_skeleton(
      joints2d, opts.bones, radius, gt_mask->width, gt_mask->height);
  if (std::all_of(est_mask.bits.begin(), est_mask.bits.end(),
                  [](std::uint8_t b) { return b == 0; })) {
    return 0.0;  // estimate projects entirely off-canvas
  }
  est_mask = align_centroids(est_mask, *gt_mask);
  return dice(est_mask, *gt_mask);
}

}  // namespace

double detection_rate(const SessionDataset& gt, const SessionDataset& est) {
  const auto est_frames = index_frames(est);
  long valid = 0, detected = 0;
  for (const auto& gt_frame : gt.frames) {
    if (!has_both_roles(gt, gt_frame)) continue;
    ++valid;
    const auto it = est_frames.find(gt_frame.frame);
    if (it != est_frames.end() && has_both_roles(est, *it->second)) {
      ++detected;
    }
  }
  if (valid == 0) {
    throw InvalidInputError(
        "ground truth has no frame with both skeletons present");
  }
  return 100.0 * static_cast<double>(detected) / static_cast<double>(valid);
}

std::vector<std::optional<double>> depth_trace(const SessionDataset& dataset,
                                               const std::string& person_id,
                                               const std::string& joint_name) {
  if (!dataset.find_person(person_id)) {
    throw InvalidInputError("unknown person id: " + person_id);
  }
  // The name must belong to the convention the person's skeletons use.
  std::optional<Convention> convention;
  for (const auto& frame : dataset.frames) {
    if (const PersonEntry* entry = frame.find(person_id)) {
      if (entry->skeleton) {
        convention = entry->skeleton->convention;
        break;
      }
    }
  }
  const auto& vocabulary =
      convention_joint_names(convention.value_or(Convention::Common));
  if (std::find(vocabulary.begin(), vocabulary.end(), joint_name) ==
      vocabulary.end()) {
    throw InvalidInputError("joint '" + joint_name +
                            "' is not part of the skeleton convention");
  }

  std::vector<std::optional<double>> trace;
  trace.reserve(dataset.frames.size());
  for (const auto& frame : dataset.frames) {
    std::optional<double> z;
    if (const PersonEntry* entry = frame.find(person_id)) {
      if (entry->skeleton) {
        const auto it = entry->skeleton->joints.find(joint_name);
        if (it != entry->skeleton->joints.end()) {
          z = it->second.p.z();
        }
      }
    }
    trace.push_back(z);
  }
  return trace;
}

EvalReport evaluate(const SessionDataset& gt, const SessionDataset& est,
                    const EvalOptions& opts,
                    std::vector<std::string>* warnings) {
  opts.bones.validate();
  const auto est_frames = index_frames(est);

  // Common-convention skeletons per (frame, person), gt and est sides.
  struct FramePair {
    const FrameRecord* gt_frame;
    const FrameRecord* est_frame;  // may be null
  };
  std::vector<FramePair> pairs;
  pairs.reserve(gt.frames.size());
  for (const auto& gt_frame : gt.frames) {
    const auto it = est_frames.find(gt_frame.frame);
    pairs.push_back(
        {&gt_frame, it == est_frames.end() ? nullptr : it->second});
  }

  auto common_skeleton = [&](const PersonEntry* entry,
                             const std::optional<JointMap>& map)
      -> std::optional<Skeleton> {
    if (entry == nullptr || !entry->skeleton) return std::nullopt;
    return to_common(*entry->skeleton, map, warnings);
  };

  std::optional<TiltModel> tilt;
  if (opts.tilt_correct) {
    std::vector<std::pair<double, double>> samples;
    for (const auto& [gt_frame, est_frame] : pairs) {
      if (est_frame == nullptr) continue;
      for (const auto& gt_entry : gt_frame->persons) {
        const auto gt_skel = common_skeleton(&gt_entry, opts.gt_map);
        const auto est_skel =
            common_skeleton(est_frame->find(gt_entry.person_id), opts.est_map);
        if (!gt_skel || !est_skel) continue;
        for (const auto& [name, gt_joint] : gt_skel->joints) {
          const auto it = est_skel->joints.find(name);
          if (it == est_skel->joints.end()) continue;
          samples.emplace_back(it->second.p.z(),
                               it->second.p.y() - gt_joint.p.y());
        }
      }
    }
    if (samples.size() >= 2) {
      try {
        tilt = fit_tilt(samples);
      } catch (const UnderdeterminedError&) {
        if (warnings) warnings->push_back("tilt fit underdetermined; skipped");
      }
    } else if (warnings) {
      warnings->push_back("tilt fit skipped: not enough paired joints");
    }
  }

  EvalReport report;
  report.tilt = tilt;
  long both_valid = 0, both_detected = 0;

  for (const auto& [gt_frame, est_frame] : pairs) {
    report.frames.push_back(gt_frame->frame);

    std::optional<double> frame_rmse_value;
    std::optional<double> frame_dice_therapist;
    std::optional<double> frame_dice_child;

    double rmse_sum = 0.0;
    int rmse_count = 0;
    for (const auto& gt_entry : gt_frame->persons) {
      const auto gt_skel = common_skeleton(&gt_entry, opts.gt_map);
      if (!gt_skel) continue;
      const PersonEntry* est_entry =
          est_frame ? est_frame->find(gt_entry.person_id) : nullptr;
      auto est_skel = common_skeleton(est_entry, opts.est_map);
      if (est_skel && tilt) {
        est_skel = apply_tilt(*est_skel, *tilt);
      }

      if (est_skel) {
        try {
          rmse_sum += frame_rmse(*gt_skel, *est_skel);
          ++rmse_count;
        } catch (const InvalidInputError&) {
          // no shared joints; skip this person in this frame
        }

        const std::optional<double> d = silhouette_dice(
            gt, gt_entry, est, *est_skel, opts, warnings);
        if (d) {
          const PersonMeta* meta = gt.find_person(gt_entry.person_id);
          if (meta && meta->role && *meta->role == Role::Therapist) {
            frame_dice_therapist = d;
          } else if (meta && meta->role && *meta->role == Role::Child) {
            frame_dice_child = d;
          }
        }
      }
    }
    if (rmse_count > 0) frame_rmse_value = rmse_sum / rmse_count;

    const bool gt_both = has_both_roles(gt, *gt_frame);
    const bool est_both =
        est_frame != nullptr && has_both_roles(est, *est_frame);
    if (gt_both) {
      ++both_valid;
      if (est_both) ++both_detected;
    }

    report.rmse.push_back(frame_rmse_value);
    report.dice_therapist.push_back(frame_dice_therapist);
    report.dice_child.push_back(frame_dice_child);
    report.detected_both.push_back(est_both);
  }

  auto safe_mean = [](const std::vector<std::optional<double>>& series)
      -> std::optional<double> {
    try {
      return mean_over_valid(series);
    } catch (const InvalidInputError&) {
      return std::nullopt;
    }
  };
  report.mean_rmse = safe_mean(report.rmse);
  report.mean_dice_therapist = safe_mean(report.dice_therapist);
  report.mean_dice_child = safe_mean(report.dice_child);
  if (both_valid > 0) {
    report.detection_rate_pct = 100.0 * static_cast<double>(both_detected) /
                                static_cast<double>(both_valid);
  }
  return report;
}

void write_eval_csv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write report file: " + path);
  }
  out << "frame,rmse_m,dice_therapist,dice_child,detected_both\n";
  for (std::size_t i = 0; i < report.frames.size(); ++i) {
    out << report.frames[i] << ",";
    if (report.rmse[i]) out << fmt6(*report.rmse[i]);
    out << ",";
    if (report.dice_therapist[i]) out << fmt6(*report.dice_therapist[i]);
    out << ",";
    if (report.dice_child[i]) out << fmt6(*report.dice_child[i]);
    out << ",";
    out << (report.detected_both[i] ? 1 : 0) << "\n";
  }
}

void write_trace_csv(const std::vector<long>& frames,
                     const std::vector<std::optional<double>>& trace,
                     const std::string& path) {
  if (frames.size() != trace.size()) {
    throw DimensionMismatchError("trace and frame index length mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write trace file: " + path);
  }
  out << "frame,depth_m\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out << frames[i] << ",";
    if (trace[i]) out << fmt6(*trace[i]);
    out << "\n";
  }
}

void write_trace_svg(const std::vector<long>& frames,
                     const std::vector<std::optional<double>>& trace,
                     const std::string& path) {
  if (frames.size() != trace.size()) {
    throw DimensionMismatchError("trace and frame index length mismatch");
  }
  double z_min = 0.0, z_max = 1.0;
  bool any = false;
  for (const auto& z : trace) {
    if (!z) continue;
    if (!any) {
      z_min = z_max = *z;
      any = true;
    } else {
      z_min = std::min(z_min, *z);
      z_max = std::max(z_max, *z);
    }
  }
  if (!any) {
    throw InvalidInputError("depth trace has no values to plot");
  }
  if (z_max == z_min) z_max = z_min + 1.0;

  constexpr int width = 640, height = 320, margin = 40;
  const double x_span =
      frames.size() > 1 ? static_cast<double>(frames.size() - 1) : 1.0;

  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write SVG file: " + path);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" "
         "points=\"";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!trace[i]) continue;
    const double px =
        margin + (width - 2 * margin) * (static_cast<double>(i) / x_span);
    const double py = height - margin -
                      (height - 2 * margin) * ((*trace[i] - z_min) /
                                               (z_max - z_min));
    out << fmt6(px) << "," << fmt6(py) << " ";
  }
  out << "\"/>\n";
  out << "  <text x=\"" << margin << "\" y=\"" << height - 8
      << "\" font-size=\"11\">frame</text>\n";
  out << "  <text x=\"4\" y=\"" << margin - 8
      << "\" font-size=\"11\">depth_m [" << fmt6(z_min) << ", " << fmt6(z_max)
      << "]</text>\n";
  out << "</svg>\n";
}

}  // namespace posecal
