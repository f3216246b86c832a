#include "posecal/session.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "posecal/errors.hpp"

namespace posecal {

namespace fs = std::filesystem;
using nlohmann::json;

const PersonEntry* FrameRecord::find(const std::string& person_id) const {
  for (const auto& entry : persons) {
    if (entry.person_id == person_id) return &entry;
  }
  return nullptr;
}

const PersonMeta* SessionDataset::find_person(const std::string& id) const {
  for (const auto& person : persons) {
    if (person.id == id) return &person;
  }
  return nullptr;
}

const PersonMeta* SessionDataset::find_role(Role role) const {
  for (const auto& person : persons) {
    if (person.role && *person.role == role) return &person;
  }
  return nullptr;
}

namespace {

void warn_unknown_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& context, long line,
                       std::vector<std::string>* warnings) {
  if (!warnings) return;
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      warnings->push_back("line " + std::to_string(line) + ": unknown " +
                          context + " field '" + key + "' ignored");
    }
  }
}

double require_number(const json& obj, const char* key, long line) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(std::string("missing or non-numeric field '") + key + "'",
                     line);
  }
  return obj[key].get<double>();
}

json skeleton_to_json(const Skeleton& skel) {
  json joints = json::object();
  for (const auto& [name, joint] : skel.joints) {
    json coords = json::array({joint.p.x(), joint.p.y(), joint.p.z()});
    if (joint.confidence) coords.push_back(*joint.confidence);
    joints[name] = std::move(coords);
  }
  return json{{"convention", convention_name(skel.convention)},
              {"joints", std::move(joints)}};
}

Skeleton skeleton_from_json(const json& obj, long line) {
  if (!obj.is_object() || !obj.contains("joints")) {
    throw ParseError("skeleton must be an object with 'joints'", line);
  }
  Skeleton skel;
  if (obj.contains("convention")) {
    skel.convention = parse_convention(obj["convention"].get<std::string>());
  }
  for (const auto& [name, coords] : obj["joints"].items()) {
    if (!coords.is_array() || coords.size() < 3 || coords.size() > 4) {
      throw ParseError("joint '" + name + "' must be [x,y,z] or [x,y,z,c]",
                       line);
    }
    Joint joint;
    joint.p = {coords[0].get<double>(), coords[1].get<double>(),
               coords[2].get<double>()};
    if (coords.size() == 4) joint.confidence = coords[3].get<double>();
    skel.joints[name] = joint;
  }
  return skel;
}

json entry_to_json(const PersonEntry& entry, const std::string& mask_path) {
  json obj;
  obj["id"] = entry.person_id;
  if (entry.bbox) {
    obj["bbox"] = json::array({entry.bbox->x_min, entry.bbox->x_max,
                               entry.bbox->y_min, entry.bbox->y_max});
  }
  if (entry.wp) {
    obj["s"] = entry.wp->s;
    obj["x"] = entry.wp->x;
    obj["y"] = entry.wp->y;
  }
  if (entry.skeleton) obj["skeleton"] = skeleton_to_json(*entry.skeleton);
  if (!mask_path.empty()) obj["mask"] = mask_path;
  if (entry.suit_score) obj["suit_score"] = *entry.suit_score;
  if (entry.neck_radius) obj["neck_radius"] = *entry.neck_radius;
  return obj;
}

PersonEntry entry_from_json(const json& obj, long line,
                            std::vector<std::string>* warnings) {
  static const std::set<std::string> known = {
      "id", "bbox", "s", "x", "y", "skeleton", "mask", "suit_score",
      "neck_radius"};
  warn_unknown_keys(obj, known, "person", line, warnings);

  PersonEntry entry;
  if (!obj.contains("id") || !obj["id"].is_string()) {
    throw ParseError("person entry needs a string 'id'", line);
  }
  entry.person_id = obj["id"].get<std::string>();
  if (obj.contains("bbox")) {
    const json& box = obj["bbox"];
    if (!box.is_array() || box.size() != 4) {
      throw ParseError("bbox must be [x_min,x_max,y_min,y_max]", line);
    }
    entry.bbox = BoundingBox{box[0].get<double>(), box[1].get<double>(),
                             box[2].get<double>(), box[3].get<double>()};
  }
  const bool has_s = obj.contains("s");
  const bool has_x = obj.contains("x");
  const bool has_y = obj.contains("y");
  if (has_s && has_x && has_y) {
    entry.wp = WeakPerspectiveCam{require_number(obj, "s", line),
                                  require_number(obj, "x", line),
                                  require_number(obj, "y", line)};
  } else if ((has_s || has_x || has_y) && warnings) {
    warnings->push_back("line " + std::to_string(line) + ": person '" +
                        entry.person_id +
                        "' has partial weak-perspective params; record "
                        "unusable for depth");
  }
  if (obj.contains("skeleton")) {
    entry.skeleton = skeleton_from_json(obj["skeleton"], line);
  }
  if (obj.contains("mask")) {
    entry.mask_path = obj["mask"].get<std::string>();
  }
  if (obj.contains("suit_score")) {
    entry.suit_score = require_number(obj, "suit_score", line);
  }
  if (obj.contains("neck_radius")) {
    entry.neck_radius = require_number(obj, "neck_radius", line);
  }
  return entry;
}

json header_to_json(const SessionDataset& dataset) {
  json persons = json::array();
  for (const auto& person : dataset.persons) {
    json p;
    p["id"] = person.id;
    p["height"] = person.height;
    if (person.role) p["role"] = role_name(*person.role);
    if (person.personalized_f) p["personalized_f"] = *person.personalized_f;
    persons.push_back(std::move(p));
  }
  return json{{"format", "posecal-session"},
              {"version", 1},
              {"camera",
               {{"f", dataset.camera.f},
                {"w", dataset.camera.w},
                {"h", dataset.camera.h},
                {"mu", dataset.camera.mu}}},
              {"persons", std::move(persons)}};
}

void header_from_json(const json& obj, SessionDataset& dataset, long line,
                      std::vector<std::string>* warnings) {
  static const std::set<std::string> known = {"format", "version", "camera",
                                              "persons"};
  warn_unknown_keys(obj, known, "header", line, warnings);
  if (!obj.contains("camera") || !obj.contains("persons")) {
    throw ParseError("session header needs 'camera' and 'persons'", line);
  }
  const json& cam = obj["camera"];
  dataset.camera.f = require_number(cam, "f", line);
  dataset.camera.w = static_cast<int>(require_number(cam, "w", line));
  dataset.camera.h = static_cast<int>(require_number(cam, "h", line));
  dataset.camera.mu = cam.contains("mu") ? require_number(cam, "mu", line) : 2.0;
  try {
    dataset.camera.validate();
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
  static const std::set<std::string> known_person = {"id", "role", "height",
                                                     "personalized_f"};
  for (const json& p : obj["persons"]) {
    warn_unknown_keys(p, known_person, "person-meta", line, warnings);
    PersonMeta meta;
    if (!p.contains("id") || !p["id"].is_string()) {
      throw ParseError("person metadata needs a string 'id'", line);
    }
    meta.id = p["id"].get<std::string>();
    meta.height = require_number(p, "height", line);
    if (!(meta.height > 0.0)) {
      throw ParseError("person '" + meta.id + "' height must be positive",
                       line);
    }
    if (p.contains("role")) {
      meta.role = parse_role(p["role"].get<std::string>());
    }
    if (p.contains("personalized_f")) {
      meta.personalized_f = require_number(p, "personalized_f", line);
    }
    if (dataset.find_person(meta.id)) {
      throw ParseError("duplicate person id '" + meta.id + "'", line);
    }
    dataset.persons.push_back(std::move(meta));
  }
}

std::string auto_mask_path(long frame, const std::string& person_id) {
  return "masks/frame" + std::to_string(frame) + "_" + person_id + ".pbm";
}

void append_session_lines(const SessionDataset& dataset, std::ostream& out,
                          const fs::path* mask_root) {
  out << header_to_json(dataset).dump() << "\n";
  for (const auto& frame : dataset.frames) {
    json persons = json::array();
    for (const auto& entry : frame.persons) {
      std::string mask_path = entry.mask_path.value_or("");
      if (entry.mask && mask_root != nullptr) {
        if (mask_path.empty()) {
          mask_path = auto_mask_path(frame.frame, entry.person_id);
        }
        const fs::path target = *mask_root / mask_path;
        fs::create_directories(target.parent_path());
        save_mask_pbm(*entry.mask, target.string());
      } else if (entry.mask && mask_root == nullptr) {
        mask_path.clear();  // in-memory only; nothing to reference
      }
      persons.push_back(entry_to_json(entry, mask_path));
    }
    json obj;
    obj["frame"] = frame.frame;
    if (frame.timestamp) obj["t"] = *frame.timestamp;
    obj["persons"] = std::move(persons);
    out << obj.dump() << "\n";
  }
}

}  // namespace

SessionDataset load_session(const std::string& path,
                            std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open session file: " + path);
  }
  SessionDataset dataset;
  dataset.base_dir = fs::path(path).parent_path().string();

  std::string line;
  long line_no = 0;
  bool have_header = false;
  bool have_frame = false;
  long last_frame = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!obj.is_object()) {
      throw ParseError("each line must hold one JSON object", line_no);
    }
    try {
      if (!have_header) {
        header_from_json(obj, dataset, line_no, warnings);
        have_header = true;
        continue;
      }
      static const std::set<std::string> known = {"frame", "t", "persons"};
      warn_unknown_keys(obj, known, "frame", line_no, warnings);
      FrameRecord frame;
      if (!obj.contains("frame") || !obj["frame"].is_number_integer()) {
        throw ParseError("frame record needs an integer 'frame'", line_no);
      }
      frame.frame = obj["frame"].get<long>();
      if (have_frame && frame.frame <= last_frame) {
        throw ParseError("frame index " + std::to_string(frame.frame) +
                             " not strictly increasing",
                         line_no);
      }
      if (obj.contains("t")) frame.timestamp = require_number(obj, "t", line_no);
      if (obj.contains("persons")) {
        for (const json& p : obj["persons"]) {
          PersonEntry entry = entry_from_json(p, line_no, warnings);
          if (!dataset.find_person(entry.person_id)) {
            throw ParseError("person '" + entry.person_id +
                                 "' not in session metadata",
                             line_no);
          }
          if (entry.mask_path) {
            const fs::path mask_file =
                fs::path(dataset.base_dir) / *entry.mask_path;
            if (!fs::exists(mask_file)) {
              throw ParseError("referenced mask file missing: " +
                                   mask_file.string(),
                               line_no);
            }
          }
          frame.persons.push_back(std::move(entry));
        }
      }
      last_frame = frame.frame;
      have_frame = true;
      dataset.frames.push_back(std::move(frame));
    } catch (const ParseError&) {
      throw;
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line_no);
    }
  }
  if (!have_header) {
    throw ParseError("session file has no header line: " + path);
  }
  return dataset;
}

void save_session(const SessionDataset& dataset, const std::string& path) {
  const fs::path file(path);
  if (!file.parent_path().empty()) {
    fs::create_directories(file.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write session file: " + path);
  }
  const fs::path root = file.parent_path();
  append_session_lines(dataset, out, &root);
}

std::string session_to_string(const SessionDataset& dataset) {
  std::ostringstream out;
  append_session_lines(dataset, out, nullptr);
  return out.str();
}

std::optional<SilhouetteMask> entry_mask(const SessionDataset& dataset,
                                         const PersonEntry& entry) {
  if (entry.mask) return *entry.mask;
  if (entry.mask_path) {
    const fs::path file = fs::path(dataset.base_dir) / *entry.mask_path;
    return load_mask_pbm(file.string());
  }
  return std::nullopt;
}

std::string linear_model_to_string(const ModelFile& file) {
  json obj;
  obj["format"] = "posecal-model";
  obj["slope"] = file.model.slope;
  obj["intercept"] = file.model.intercept;
  obj["r2"] = file.model.r2;
  obj["inliers"] = file.model.inliers;
  obj["config"] = {{"inlier_threshold", file.config.inlier_threshold},
                   {"max_iterations", file.config.max_iterations},
                   {"seed", file.config.seed},
                   {"min_points", file.config.min_points}};
  return obj.dump(2) + "\n";
}

void save_linear_model(const ModelFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write model file: " + path);
  }
  out << linear_model_to_string(file);
}

ModelFile load_linear_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open model file: " + path);
  }
  json obj;
  try {
    in >> obj;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid model JSON: ") + e.what());
  }
  ModelFile file;
  file.model.slope = require_number(obj, "slope", 0);
  file.model.intercept = require_number(obj, "intercept", 0);
  if (obj.contains("r2")) file.model.r2 = obj["r2"].get<double>();
  if (obj.contains("inliers")) {
    file.model.inliers = obj["inliers"].get<std::vector<std::size_t>>();
  }
  if (obj.contains("config")) {
    const json& cfg = obj["config"];
    if (cfg.contains("inlier_threshold")) {
      file.config.inlier_threshold = cfg["inlier_threshold"].get<double>();
    }
    if (cfg.contains("max_iterations")) {
      file.config.max_iterations = cfg["max_iterations"].get<int>();
    }
    if (cfg.contains("seed")) {
      file.config.seed = cfg["seed"].get<std::uint64_t>();
    }
    if (cfg.contains("min_points")) {
      file.config.min_points = cfg["min_points"].get<std::size_t>();
    }
  }
  return file;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string fmt6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

}  // namespace

std::vector<PointRecord> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open points file: " + path);
  }
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty points file: " + path);
  }
  ++line_no;
  const std::vector<std::string> header = split_csv_line(line);
  auto column = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  };
  const int col_id = column("person_id");
  const int col_height = column("height_m");
  const int col_focal = column("focal_px");
  const int col_depth = column("depth_m");
  const int col_weight = column("weight");
  if (col_height < 0 || col_focal < 0) {
    throw ParseError("points file needs height_m and focal_px columns", 1);
  }

  std::vector<PointRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    auto field = [&](int col) -> std::string {
      if (col < 0 || col >= static_cast<int>(fields.size())) return "";
      return fields[static_cast<std::size_t>(col)];
    };
    PointRecord record;
    record.person_id = field(col_id);
    try {
      record.point.height = std::stod(field(col_height));
      record.point.f = std::stod(field(col_focal));
      const std::string depth_str = field(col_depth);
      if (!depth_str.empty()) record.depth = std::stod(depth_str);
      const std::string weight_str = field(col_weight);
      if (!weight_str.empty()) {
        record.point.weight = std::stod(weight_str);
      } else if (record.depth) {
        record.point.weight = weight_from_depth(*record.depth);
      } else {
        record.point.weight = 1.0;
      }
    } catch (const std::exception&) {
      throw ParseError("malformed points row", line_no);
    }
    records.push_back(std::move(record));
  }
  return records;
}

void save_points_csv(const std::vector<PointRecord>& records,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write points file: " + path);
  }
  out << "person_id,height_m,focal_px,depth_m,weight\n";
  for (const auto& record : records) {
    out << record.person_id << "," << fmt6(record.point.height) << ","
        << fmt6(record.point.f) << ","
        << (record.depth ? fmt6(*record.depth) : std::string()) << ","
        << fmt6(record.point.weight) << "\n";
  }
}

std::vector<WindowRecord> load_windows_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open windows file: " + path);
  }
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("empty windows file: " + path);
  }
  ++line_no;
  std::vector<WindowRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < 4) {
      throw ParseError("windows row needs 4 columns", line_no);
    }
    WindowRecord record;
    record.person_id = fields[0];
    try {
      record.start_frame = std::stol(fields[1]);
      record.end_frame = std::stol(fields[2]);
      record.depth = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw ParseError("malformed windows row", line_no);
    }
    if (record.end_frame < record.start_frame) {
      throw ParseError("window end before start", line_no);
    }
    records.push_back(std::move(record));
  }
  return records;
}

void save_windows_csv(const std::vector<WindowRecord>& records,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write windows file: " + path);
  }
  out << "person_id,start_frame,end_frame,depth_m\n";
  for (const auto& record : records) {
    out << record.person_id << "," << record.start_frame << ","
        << record.end_frame << "," << fmt6(record.depth) << "\n";
  }
}

}  // namespace posecal
