#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "posecal/calibration.hpp"
#include "posecal/errors.hpp"
#include "posecal/evaluate.hpp"
#include "posecal/kernels.hpp"
#include "posecal/session.hpp"
#include "posecal/simulate.hpp"

namespace {

using namespace posecal;

constexpr const char* kVersion = "0.1.0";

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& warning : warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
}

std::vector<SimPerson> parse_person_specs(
    const std::vector<std::string>& specs) {
  // "role:height" or "id:role:height"
  std::vector<SimPerson> persons;
  for (const auto& spec : specs) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = spec.find(':', start);
      parts.push_back(spec.substr(start, colon - start));
      if (colon == std::string::npos) break;
      start = colon + 1;
    }
    SimPerson person;
    try {
      if (parts.size() == 2) {
        person.role = parse_role(parts[0]);
        person.id = parts[0];
        person.height = std::stod(parts[1]);
      } else if (parts.size() == 3) {
        person.id = parts[0];
        person.role = parse_role(parts[1]);
        person.height = std::stod(parts[2]);
      } else {
        throw InvalidInputError("");
      }
    } catch (const std::exception&) {
      throw InvalidInputError("bad --person spec '" + spec +
                              "' (want role:height or id:role:height)");
    }
    persons.push_back(std::move(person));
  }
  return persons;
}

std::optional<double> personalized_focal(
    const PersonMeta& meta, const std::optional<LinearModel>& model,
    const std::vector<std::pair<std::string, double>>& overrides) {
  for (const auto& [id, f] : overrides) {
    if (id == meta.id) return f;
  }
  if (model) return predict_focal(*model, meta.height);
  return std::nullopt;
}

int run(int argc, char** argv) {
  CLI::App app{"Per-height focal-length personalization and skeleton "
               "evaluation toolkit"};
  app.set_version_flag("--version", std::string("posecal ") + kVersion);
  app.require_subcommand(1);

  std::string simd;
  app.add_option("--simd", simd, "Force a kernel implementation")
      ->check(CLI::IsMember({"scalar", "avx2"}));

  // ---- predict-focal ----------------------------------------------------
  auto* cmd_predict = app.add_subcommand(
      "predict-focal", "Evaluate the height -> focal-length line");
  double pf_slope = 164.47, pf_intercept = 135.23, pf_height = 0.0;
  std::string pf_model;
  cmd_predict->add_option("--slope", pf_slope, "Line slope (px/m)");
  cmd_predict->add_option("--intercept", pf_intercept, "Line intercept (px)");
  cmd_predict->add_option("--model", pf_model, "Model JSON file");
  cmd_predict->add_option("--height", pf_height, "Person height (m)")
      ->required();

  // ---- calibrate-focal --------------------------------------------------
  auto* cmd_calibrate = app.add_subcommand(
      "calibrate-focal",
      "Measure per-person focal lengths from known-position windows");
  std::string cf_session, cf_windows, cf_out, cf_person;
  double cf_depth = 0.0;
  long cf_start = 0, cf_end = -1;
  cmd_calibrate->add_option("--session", cf_session, "Session file")
      ->required();
  cmd_calibrate->add_option("--windows", cf_windows,
                            "Windows CSV (person_id,start,end,depth_m)");
  cmd_calibrate->add_option("--person", cf_person, "Single-window person id");
  cmd_calibrate->add_option("--depth", cf_depth, "Single-window depth (m)");
  cmd_calibrate->add_option("--start", cf_start, "Single-window start frame");
  cmd_calibrate->add_option("--end", cf_end, "Single-window end frame");
  cmd_calibrate->add_option("--out", cf_out, "Points CSV to write")
      ->required();

  // ---- fit-height-model -------------------------------------------------
  auto* cmd_fit = app.add_subcommand(
      "fit-height-model", "RANSAC line fit over (height, focal) points");
  std::string fm_points, fm_out;
  RansacConfig fm_cfg;
  cmd_fit->add_option("--points", fm_points, "Points CSV")->required();
  cmd_fit->add_option("--out", fm_out, "Model JSON to write");
  cmd_fit->add_option("--threshold", fm_cfg.inlier_threshold,
                      "Inlier threshold (px)");
  cmd_fit->add_option("--iterations", fm_cfg.max_iterations,
                      "Max RANSAC iterations");
  cmd_fit->add_option("--seed", fm_cfg.seed, "RANSAC seed");
  cmd_fit->add_option("--min-points", fm_cfg.min_points,
                      "Minimal consensus size");

  // ---- retranslate ------------------------------------------------------
  auto* cmd_retr = app.add_subcommand(
      "retranslate",
      "Re-place skeletons using per-person personalized focal lengths");
  std::string rt_session, rt_model, rt_out;
  std::vector<std::string> rt_focal;
  cmd_retr->add_option("--session", rt_session, "Session file")->required();
  cmd_retr->add_option("--model", rt_model, "Model JSON file");
  cmd_retr->add_option("--focal", rt_focal,
                       "Explicit focal override, id=value (repeatable)");
  cmd_retr->add_option("--out", rt_out, "Corrected session to write")
      ->required();

  // ---- eval ---------------------------------------------------------
  auto* cmd_eval = app.add_subcommand(
      "eval", "Compare an estimated session against ground truth");
  std::string ev_gt, ev_est, ev_out, ev_bones, ev_gt_map, ev_est_map;
  double ev_neck = 6.0;
  bool ev_tilt = false;
  cmd_eval->add_option("--gt", ev_gt, "Ground-truth session")->required();
  cmd_eval->add_option("--est", ev_est, "Estimated session")->required();
  cmd_eval->add_option("--out", ev_out, "Report CSV to write")->required();
  cmd_eval->add_option("--neck-radius", ev_neck,
                       "Default dilation radius (px)");
  cmd_eval->add_option("--bones", ev_bones, "Bone graph file");
  cmd_eval->add_option("--gt-map", ev_gt_map, "Joint map for gt skeletons");
  cmd_eval->add_option("--est-map", ev_est_map, "Joint map for est skeletons");
  cmd_eval->add_flag("--tilt-correct", ev_tilt,
                     "Fit and remove a linear y-vs-depth offset");

  // ---- depth-trace --------------------------------------------------
  auto* cmd_trace = app.add_subcommand(
      "depth-trace", "Depth of one joint of one person over the session");
  std::string dt_session, dt_person, dt_joint = "hip_center", dt_out, dt_svg;
  cmd_trace->add_option("--session", dt_session, "Session file")->required();
  cmd_trace->add_option("--person", dt_person, "Person id")->required();
  cmd_trace->add_option("--joint", dt_joint, "Joint name");
  cmd_trace->add_option("--out", dt_out, "Trace CSV to write")->required();
  cmd_trace->add_option("--svg", dt_svg, "Optional SVG polyline");

  // ---- simulate -----------------------------------------------------
  auto* cmd_sim =
      app.add_subcommand("simulate", "Generate a synthetic pinhole session");
  SimConfig sim_cfg;
  std::vector<std::string> sim_person_specs;
  std::string sim_out_est, sim_out_gt, sim_out_windows;
  cmd_sim->add_option("--seed", sim_cfg.seed, "Simulation seed");
  cmd_sim->add_option("--slope", sim_cfg.slope, "True height->f slope");
  cmd_sim->add_option("--intercept", sim_cfg.intercept,
                      "True height->f intercept");
  cmd_sim
      ->add_option("--person", sim_person_specs,
                   "role:height or id:role:height (repeatable)")
      ->required();
  cmd_sim->add_option("--waypoints", sim_cfg.waypoint_depths,
                      "Waypoint depths (m)")
      ->delimiter(',');
  cmd_sim->add_option("--frames-per-waypoint", sim_cfg.frames_per_waypoint,
                      "Frames at each waypoint");
  cmd_sim->add_option("--focal", sim_cfg.camera.f, "Render camera focal (px)");
  cmd_sim->add_option("--width", sim_cfg.camera.w, "Image width");
  cmd_sim->add_option("--height", sim_cfg.camera.h, "Image height");
  cmd_sim->add_option("--mu", sim_cfg.camera.mu, "Multiplicative factor");
  cmd_sim->add_option("--noise-s", sim_cfg.noise_s,
                      "Multiplicative stddev on s");
  cmd_sim->add_option("--noise-bbox", sim_cfg.noise_bbox_px,
                      "Additive stddev on box corners (px)");
  cmd_sim->add_option("--outlier-fraction", sim_cfg.outlier_fraction,
                      "Fraction of frames with corrupted s");
  cmd_sim->add_flag("--emit-masks", sim_cfg.emit_masks,
                    "Rasterize ground-truth silhouettes");
  cmd_sim->add_option("--out-est", sim_out_est, "Detector-view session")
      ->required();
  cmd_sim->add_option("--out-gt", sim_out_gt, "Ground-truth session");
  cmd_sim->add_option("--out-windows", sim_out_windows,
                      "Calibration windows CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  if (!simd.empty()) {
    kernels::set_impl(simd == "avx2" ? kernels::Impl::Avx2
                                     : kernels::Impl::Scalar);
  }

  std::vector<std::string> warnings;

  if (cmd_predict->parsed()) {
    LinearModel model;
    if (!pf_model.empty()) {
      model = load_linear_model(pf_model).model;
    } else {
      model.slope = pf_slope;
      model.intercept = pf_intercept;
    }
    std::printf("%.2f\n", predict_focal(model, pf_height));
    return 0;
  }

  if (cmd_calibrate->parsed()) {
    const SessionDataset session = load_session(cf_session, &warnings);
    std::vector<WindowRecord> windows;
    if (!cf_windows.empty()) {
      windows = load_windows_csv(cf_windows);
    } else if (!cf_person.empty()) {
      if (cf_end < cf_start) {
        throw InvalidInputError("--end must be >= --start");
      }
      windows.push_back({cf_person, cf_start, cf_end, cf_depth});
    } else {
      throw InvalidInputError("need --windows or --person/--depth/--start/--end");
    }

    std::vector<PointRecord> points;
    for (const auto& window : windows) {
      const PersonMeta* meta = session.find_person(window.person_id);
      if (meta == nullptr) {
        throw InvalidInputError("unknown person id: " + window.person_id);
      }
      std::vector<Detection> detections;
      for (const auto& frame : session.frames) {
        if (frame.frame < window.start_frame || frame.frame > window.end_frame)
          continue;
        const PersonEntry* entry = frame.find(window.person_id);
        if (entry == nullptr) continue;
        if (const auto det = entry->detection()) {
          detections.push_back(*det);
        }
      }
      const FocalSample sample = focal_sample_from_window(
          detections, window.depth, session.camera.mu, window.person_id,
          static_cast<int>(window.start_frame), &warnings);
      PointRecord record;
      record.person_id = window.person_id;
      record.point.height = meta->height;
      record.point.f = sample.measured_f;
      record.point.weight = weight_from_depth(window.depth);
      record.depth = window.depth;
      points.push_back(record);
      std::printf("%s depth=%.3f f=%.3f (%zu frames)\n",
                  window.person_id.c_str(), window.depth, sample.measured_f,
                  detections.size());
    }
    save_points_csv(points, cf_out);
    print_warnings(warnings);
    return 0;
  }

  if (cmd_fit->parsed()) {
    const std::vector<PointRecord> records = load_points_csv(fm_points);
    std::vector<HeightFocalPoint> points;
    points.reserve(records.size());
    for (const auto& record : records) points.push_back(record.point);
    const LinearModel model = ransac_fit(points, fm_cfg);
    std::printf("r2=%.4f slope=%.2f intercept=%.2f inliers=%zu/%zu\n",
                model.r2, model.slope, model.intercept, model.inliers.size(),
                points.size());
    if (!fm_out.empty()) {
      save_linear_model({model, fm_cfg}, fm_out);
    }
    return 0;
  }

  if (cmd_retr->parsed()) {
    SessionDataset session = load_session(rt_session, &warnings);
    std::optional<LinearModel> model;
    if (!rt_model.empty()) {
      model = load_linear_model(rt_model).model;
    }
    std::vector<std::pair<std::string, double>> overrides;
    for (const auto& spec : rt_focal) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw InvalidInputError("bad --focal spec '" + spec +
                                "' (want id=value)");
      }
      overrides.emplace_back(spec.substr(0, eq),
                             std::stod(spec.substr(eq + 1)));
    }

    const CameraIntrinsics cam_old = session.camera;
    long corrected = 0, skipped = 0;
    for (PersonMeta& meta : session.persons) {
      meta.personalized_f = personalized_focal(meta, model, overrides);
    }
    for (FrameRecord& frame : session.frames) {
      for (PersonEntry& entry : frame.persons) {
        const PersonMeta* meta = session.find_person(entry.person_id);
        if (!meta->personalized_f || !entry.skeleton ||
            !entry.usable_for_depth()) {
          if (entry.skeleton) ++skipped;
          continue;
        }
        CameraIntrinsics cam_new = cam_old;
        cam_new.f = *meta->personalized_f;
        entry.skeleton = retranslate(*entry.skeleton, *entry.bbox, *entry.wp,
                                     cam_old, cam_new);
        ++corrected;
      }
    }
    save_session(session, rt_out);
    std::printf("retranslated %ld skeletons (%ld skipped)\n", corrected,
                skipped);
    print_warnings(warnings);
    return 0;
  }

  if (cmd_eval->parsed()) {
    const SessionDataset gt = load_session(ev_gt, &warnings);
    const SessionDataset est = load_session(ev_est, &warnings);
    EvalOptions opts;
    opts.default_neck_radius = ev_neck;
    opts.tilt_correct = ev_tilt;
    if (!ev_bones.empty()) opts.bones = load_bone_graph(ev_bones);
    if (!ev_gt_map.empty()) opts.gt_map = load_joint_map(ev_gt_map);
    if (!ev_est_map.empty()) opts.est_map = load_joint_map(ev_est_map);

    const EvalReport report = evaluate(gt, est, opts, &warnings);
    write_eval_csv(report, ev_out);

    auto show = [](const char* name, const std::optional<double>& value) {
      if (value) {
        std::printf("%s=%.6f\n", name, *value);
      } else {
        std::printf("%s=n/a\n", name);
      }
    };
    show("mean_rmse_m", report.mean_rmse);
    show("mean_dice_therapist", report.mean_dice_therapist);
    show("mean_dice_child", report.mean_dice_child);
    show("detection_rate_pct", report.detection_rate_pct);
    if (report.tilt) {
      std::printf("tilt_slope=%.6f tilt_offset=%.6f\n", report.tilt->slope_m,
                  report.tilt->offset_b);
    }
    print_warnings(warnings);
    return 0;
  }

  if (cmd_trace->parsed()) {
    const SessionDataset session = load_session(dt_session, &warnings);
    const auto trace = depth_trace(session, dt_person, dt_joint);
    std::vector<long> frames;
    frames.reserve(session.frames.size());
    for (const auto& frame : session.frames) frames.push_back(frame.frame);
    write_trace_csv(frames, trace, dt_out);
    if (!dt_svg.empty()) {
      write_trace_svg(frames, trace, dt_svg);
    }
    print_warnings(warnings);
    return 0;
  }

  if (cmd_sim->parsed()) {
    sim_cfg.persons = parse_person_specs(sim_person_specs);
    const Simulation sim = simulate(sim_cfg);
    save_session(sim.est_session(), sim_out_est);
    if (!sim_out_gt.empty()) {
      save_session(sim.gt_session(), sim_out_gt);
    }
    if (!sim_out_windows.empty()) {
      save_windows_csv(sim.windows, sim_out_windows);
    }
    std::printf("simulated %zu frames, %zu persons, %zu windows\n",
                sim.frames.size(), sim_cfg.persons.size(),
                sim.windows.size());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const posecal::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
