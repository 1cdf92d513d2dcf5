/* Copyright 2026 The mood3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mood3d/io.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <istream>
#include <set>
#include <sstream>

#include "mood3d/error.h"

namespace mood3d {
namespace {

using nlohmann::json;

enum class FileKind { kGroundTruth, kPredictions };

[[noreturn]] void ParseFail(int line, const std::string& reason) {
  throw InputError(ErrorCode::kParseError, line, reason);
}

[[noreturn]] void InvariantFail(int line, const std::string& field,
                                const std::string& reason) {
  throw InputError(ErrorCode::kInvariantViolation, line,
                   field + ": " + reason);
}

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               int line, const char* where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      ParseFail(line, std::string("unknown field '") + item.key() + "' in " +
                          where);
    }
  }
}

const json& Field(const json& obj, const char* key, int line) {
  const auto it = obj.find(key);
  if (it == obj.end()) ParseFail(line, std::string("missing field '") + key + "'");
  return *it;
}

double Number(const json& v, const std::string& field, int line) {
  if (!v.is_number()) ParseFail(line, field + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) InvariantFail(line, field, "must be finite");
  return x;
}

std::vector<double> NumberArray(const json& v, size_t size,
                                const std::string& field, int line) {
  if (!v.is_array() || v.size() != size) {
    ParseFail(line, field + " must be an array of " + std::to_string(size) +
                        " numbers");
  }
  std::vector<double> out;
  for (size_t i = 0; i < size; ++i) {
    out.push_back(Number(v[i], field + "[" + std::to_string(i) + "]", line));
  }
  return out;
}

Vec3 ToVec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

int PositiveInt(const json& v, const std::string& field, int line) {
  if (!v.is_number_integer()) ParseFail(line, field + " must be an integer");
  const auto x = v.get<long long>();
  if (x <= 0 || x > (1LL << 30)) InvariantFail(line, field, "must be positive");
  return static_cast<int>(x);
}

CameraIntrinsics ParseIntrinsics(const json& j, int line) {
  if (!j.is_object()) ParseFail(line, "intrinsics must be an object");
  CheckKeys(j, {"fx", "fy", "cx", "cy", "width", "height"}, line,
            "intrinsics");
  CameraIntrinsics k;
  k.fx = Number(Field(j, "fx", line), "fx", line);
  k.fy = Number(Field(j, "fy", line), "fy", line);
  k.cx = Number(Field(j, "cx", line), "cx", line);
  k.cy = Number(Field(j, "cy", line), "cy", line);
  k.width = PositiveInt(Field(j, "width", line), "width", line);
  k.height = PositiveInt(Field(j, "height", line), "height", line);
  if (!(k.fx > 0.0)) InvariantFail(line, "fx", "must be positive");
  if (!(k.fy > 0.0)) InvariantFail(line, "fy", "must be positive");
  return k;
}

json IntrinsicsToJson(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy},       {"cx", k.cx},
          {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

struct ParsedObject {
  std::string label;
  double score = 0.0;
  Box3D box;
  std::optional<Box2D> box2d;
};

ParsedObject ParseObject(const json& j, FileKind kind, int line) {
  if (!j.is_object()) ParseFail(line, "objects entries must be objects");
  CheckKeys(j, {"label", "score", "center", "dims", "rotation", "rot6d", "box2d"},
            line, "object");
  ParsedObject o;
  const json& label = Field(j, "label", line);
  if (!label.is_string() || label.get<std::string>().empty()) {
    ParseFail(line, "label must be a non-empty string");
  }
  o.label = label.get<std::string>();

  if (kind == FileKind::kPredictions) {
    o.score = Number(Field(j, "score", line), "score", line);
    if (o.score < 0.0 || o.score > 1.0) {
      InvariantFail(line, "score", "must lie in [0, 1]");
    }
  } else if (j.contains("score")) {
    ParseFail(line, "ground truth objects must not carry a score");
  }

  o.box.center = ToVec3(NumberArray(Field(j, "center", line), 3, "center", line));
  o.box.dims = ToVec3(NumberArray(Field(j, "dims", line), 3, "dims", line));
  if ((o.box.dims.array() <= 0.0).any()) {
    InvariantFail(line, "dims", "must be positive");
  }

  const bool has_matrix = j.contains("rotation");
  const bool has_6d = j.contains("rot6d");
  if (has_matrix == has_6d) {
    ParseFail(line, "exactly one of 'rotation' and 'rot6d' is required");
  }
  try {
    if (has_matrix) {
      const auto r = NumberArray(j["rotation"], 9, "rotation", line);
      Mat3 m;
      m << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
      o.box.rotation = Rotation(m);
    } else {
      const auto r = NumberArray(j["rot6d"], 6, "rot6d", line);
      o.box.rotation =
          Rot6DToMatrix({Vec3(r[0], r[1], r[2]), Vec3(r[3], r[4], r[5])});
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    InvariantFail(line, has_matrix ? "rotation" : "rot6d", e.what());
  }

  if (j.contains("box2d")) {
    const auto b = NumberArray(j["box2d"], 4, "box2d", line);
    Box2D box2d{b[0], b[1], b[2], b[3]};
    if (box2d.x2 < box2d.x1) InvariantFail(line, "box2d", "x2 < x1");
    if (box2d.y2 < box2d.y1) InvariantFail(line, "box2d", "y2 < y1");
    o.box2d = box2d;
  }
  return o;
}

json ObjectToJson(const std::string& label, const Box3D& box,
                  const std::optional<Box2D>& box2d) {
  json o = BoxToJson(box);
  o["label"] = label;
  if (box2d) o["box2d"] = {box2d->x1, box2d->y1, box2d->x2, box2d->y2};
  return o;
}

Dataset Parse(std::istream& in, FileKind kind) {
  Dataset data;
  std::set<std::string> seen;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      ParseFail(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) ParseFail(line, "record must be a JSON object");
    CheckKeys(j, {"schema_version", "frame_id", "intrinsics", "objects"}, line,
              "frame");
    const json& version = Field(j, "schema_version", line);
    if (!version.is_string()) ParseFail(line, "schema_version must be a string");
    if (version.get<std::string>() != kSchemaVersion) {
      throw InputError(ErrorCode::kSchemaVersion, line,
                       "unsupported schema_version '" +
                           version.get<std::string>() + "' (expected " +
                           std::string(kSchemaVersion) + ")");
    }
    const json& id = Field(j, "frame_id", line);
    if (!id.is_string() || id.get<std::string>().empty()) {
      ParseFail(line, "frame_id must be a non-empty string");
    }
    FrameRecord frame;
    frame.frame_id = id.get<std::string>();
    if (!seen.insert(frame.frame_id).second) {
      InvariantFail(line, "frame_id", "duplicate '" + frame.frame_id + "'");
    }
    frame.intrinsics = ParseIntrinsics(Field(j, "intrinsics", line), line);
    const json& objects = Field(j, "objects", line);
    if (!objects.is_array()) ParseFail(line, "objects must be an array");
    for (const json& item : objects) {
      ParsedObject o = ParseObject(item, kind, line);
      if (kind == FileKind::kGroundTruth) {
        frame.ground_truth.push_back(
            {frame.frame_id, std::move(o.label), o.box, o.box2d});
      } else {
        frame.detections.push_back(
            {frame.frame_id, std::move(o.label), o.score, o.box, o.box2d});
      }
    }
    data.frames.push_back(std::move(frame));
  }
  if (in.bad()) ParseFail(line, "read error");
  return data;
}

Dataset ReadFile(const std::filesystem::path& path, FileKind kind) {
  std::ifstream in(path);
  if (!in) {
    throw InputError(ErrorCode::kParseError, 0,
                     "cannot open '" + path.string() + "'");
  }
  try {
    return Parse(in, kind);
  } catch (const InputError& e) {
    throw InputError(e.code(), e.line(),
                     path.string() + ": " + e.what());
  }
}

void Write(const Dataset& data, std::ostream& out, FileKind kind) {
  for (const FrameRecord& frame : data.frames) {
    json objects = json::array();
    if (kind == FileKind::kGroundTruth) {
      for (const GroundTruth& g : frame.ground_truth) {
        objects.push_back(ObjectToJson(g.label, g.box3d, g.box2d));
      }
    } else {
      for (const Detection& d : frame.detections) {
        json o = ObjectToJson(d.label, d.box3d, d.box2d);
        o["score"] = d.score;
        objects.push_back(std::move(o));
      }
    }
    json record = {{"schema_version", std::string(kSchemaVersion)},
                   {"frame_id", frame.frame_id},
                   {"intrinsics", IntrinsicsToJson(frame.intrinsics)},
                   {"objects", std::move(objects)}};
    out << record.dump() << '\n';
  }
}

void WriteFile(const Dataset& data, const std::filesystem::path& path,
               FileKind kind) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write '" + path.string() + "'");
  }
  Write(data, out, kind);
}

json SplitToJson(const std::optional<SplitScore>& s) {
  if (!s) return nullptr;
  return {{"num_classes", s->num_classes}, {"ap_iou", s->ap_iou},
          {"ap_dist", s->ap_dist},         {"mate", s->mate},
          {"mase", s->mase},               {"maoe", s->maoe},
          {"ods", s->ods}};
}

std::string FormatFixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

[[noreturn]] void SpecFail(const std::string& reason) {
  throw Error(ErrorCode::kInvalidSpec, reason);
}

Vec3 SpecVec3(const json& v, const char* field) {
  if (!v.is_array() || v.size() != 3) {
    SpecFail(std::string(field) + " must be an array of 3 numbers");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) SpecFail(std::string(field) + " must hold numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

}  // namespace

std::vector<GroundTruth> Dataset::AllGroundTruth() const {
  std::vector<GroundTruth> out;
  for (const FrameRecord& f : frames) {
    out.insert(out.end(), f.ground_truth.begin(), f.ground_truth.end());
  }
  return out;
}

std::vector<Detection> Dataset::AllDetections() const {
  std::vector<Detection> out;
  for (const FrameRecord& f : frames) {
    out.insert(out.end(), f.detections.begin(), f.detections.end());
  }
  return out;
}

Dataset ParseGroundTruth(std::istream& in) {
  return Parse(in, FileKind::kGroundTruth);
}

Dataset ParsePredictions(std::istream& in) {
  return Parse(in, FileKind::kPredictions);
}

Dataset ReadGroundTruth(const std::filesystem::path& path) {
  return ReadFile(path, FileKind::kGroundTruth);
}

Dataset ReadPredictions(const std::filesystem::path& path) {
  return ReadFile(path, FileKind::kPredictions);
}

void WriteGroundTruth(const Dataset& data, std::ostream& out) {
  Write(data, out, FileKind::kGroundTruth);
}

void WritePredictions(const Dataset& data, std::ostream& out) {
  Write(data, out, FileKind::kPredictions);
}

void WriteGroundTruth(const Dataset& data, const std::filesystem::path& path) {
  WriteFile(data, path, FileKind::kGroundTruth);
}

void WritePredictions(const Dataset& data, const std::filesystem::path& path) {
  WriteFile(data, path, FileKind::kPredictions);
}

Dataset SceneToDataset(const Scene& scene, const std::vector<Detection>& dets) {
  Dataset data;
  std::map<std::string, size_t> index;
  for (const SceneFrame& f : scene.frames) {
    index[f.frame_id] = data.frames.size();
    data.frames.push_back({f.frame_id, f.intrinsics, f.objects, {}});
  }
  for (const Detection& d : dets) {
    const auto it = index.find(d.frame_id);
    if (it == index.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "detection references unknown frame '" + d.frame_id + "'");
    }
    data.frames[it->second].detections.push_back(d);
  }
  return data;
}

nlohmann::json BoxToJson(const Box3D& box) {
  const Mat3& r = box.rotation.matrix();
  return {{"center", {box.center.x(), box.center.y(), box.center.z()}},
          {"dims", {box.dims.x(), box.dims.y(), box.dims.z()}},
          {"rotation",
           {r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0),
            r(2, 1), r(2, 2)}}};
}

nlohmann::json ReportToJson(const MetricReport& report,
                            const MetricConfig& cfg) {
  json classes = json::object();
  for (const ClassMetrics& c : report.classes) {
    classes[c.label] = {
        {"num_ground_truth", c.num_ground_truth},
        {"num_detections", c.num_detections},
        {"ap_iou", c.ap_iou},
        {"ap_dist", c.ap_dist},
        {"ap_iou_per_threshold", c.ap_iou_per_threshold},
        {"ap_dist_per_threshold", c.ap_dist_per_threshold},
        {"true_positives", c.true_positives},
        {"false_positives", c.false_positives},
        {"false_negatives", c.false_negatives},
        {"ate", c.tp_error.ate},
        {"ase", c.tp_error.ase},
        {"aoe", c.tp_error.aoe},
    };
  }
  json config = {
      {"iou_thresholds", cfg.iou_thresholds},
      {"dist_ratio_thresholds", cfg.dist_ratio_thresholds},
      {"tp_error_threshold_ratio", cfg.tp_error_threshold_ratio},
      {"recall_points", cfg.recall_points},
      {"ap_integration", cfg.ap_integration == ApIntegration::kInterpolated
                             ? "interpolated"
                             : "trapezoid"},
      {"radius_mode", cfg.radius_mode == RadiusMode::kCircumscribed
                          ? "circumscribed"
                          : "inscribed"},
      {"base_classes", cfg.base_classes ? json(*cfg.base_classes) : json()},
      {"novel_classes", cfg.novel_classes ? json(*cfg.novel_classes) : json()},
  };
  return {
      {"schema_version", std::string(kSchemaVersion)},
      {"config", std::move(config)},
      {"overall", SplitToJson(report.overall)},
      {"base", SplitToJson(report.base)},
      {"novel", SplitToJson(report.novel)},
      {"classes", std::move(classes)},
      {"counts",
       {{"frames", report.num_frames},
        {"true_positives", report.true_positives},
        {"false_positives", report.false_positives},
        {"false_negatives", report.false_negatives}}},
  };
}

std::string ReportToText(const MetricReport& report, const MetricConfig& cfg) {
  return ReportToJson(report, cfg).dump(2) + "\n";
}

void WriteReport(const MetricReport& report, const MetricConfig& cfg,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot write '" + path.string() + "'");
  }
  out << ReportToText(report, cfg);
}

std::string FormatPercent(double fraction) {
  return FormatFixed(100.0 * fraction, 1);
}

std::string ReportToCsv(const MetricReport& report) {
  auto split = [](const std::optional<SplitScore>& s) {
    return s ? FormatPercent(s->ods) : std::string("-");
  };
  const SplitScore& o = report.overall;
  std::ostringstream os;
  os << "AP3D_dist,mATE,mASE,mAOE,ODS,ODS(B),ODS(N)\n"
     << FormatPercent(o.ap_dist) << ',' << FormatFixed(o.mate, 3) << ','
     << FormatFixed(o.mase, 3) << ',' << FormatFixed(o.maoe, 3) << ','
     << FormatPercent(o.ods) << ',' << split(report.base) << ','
     << split(report.novel) << '\n';
  return os.str();
}

SceneSpec SceneSpecFromJson(const nlohmann::json& j) {
  if (!j.is_object()) SpecFail("scene spec must be a JSON object");
  SceneSpec spec;
  try {
    spec.n_frames = j.value("n_frames", spec.n_frames);
    spec.min_objects = j.value("min_objects", spec.min_objects);
    spec.max_objects = j.value("max_objects", spec.max_objects);
    spec.min_depth = j.value("min_depth", spec.min_depth);
    spec.max_depth = j.value("max_depth", spec.max_depth);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("intrinsics")) {
      spec.intrinsics = ParseIntrinsics(j["intrinsics"], 0);
    }
  } catch (const json::exception& e) {
    SpecFail(e.what());
  } catch (const InputError& e) {
    SpecFail(e.what());
  }
  if (!j.contains("classes") || !j["classes"].is_array()) {
    SpecFail("'classes' must be an array");
  }
  for (const json& c : j["classes"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
      SpecFail("every class needs a string 'name'");
    }
    ClassSpec cls;
    cls.name = c["name"].get<std::string>();
    if (c.contains("dims")) {
      const Vec3 dims = SpecVec3(c["dims"], "dims");
      if ((dims.array() <= 0.0).any()) SpecFail("dims must be positive");
      cls.log_dim_mean = dims.array().log().matrix();
    } else if (c.contains("log_dim_mean")) {
      cls.log_dim_mean = SpecVec3(c["log_dim_mean"], "log_dim_mean");
    } else {
      SpecFail("class '" + cls.name + "' needs 'dims' or 'log_dim_mean'");
    }
    if (c.contains("log_dim_std")) {
      cls.log_dim_std = SpecVec3(c["log_dim_std"], "log_dim_std");
    }
    if (c.contains("weight")) {
      if (!c["weight"].is_number()) SpecFail("weight must be a number");
      cls.weight = c["weight"].get<double>();
    }
    spec.classes.push_back(std::move(cls));
  }
  spec.Validate();
  return spec;
}

nlohmann::json SceneSpecToJson(const SceneSpec& spec) {
  json classes = json::array();
  for (const ClassSpec& c : spec.classes) {
    classes.push_back(
        {{"name", c.name},
         {"log_dim_mean",
          {c.log_dim_mean.x(), c.log_dim_mean.y(), c.log_dim_mean.z()}},
         {"log_dim_std",
          {c.log_dim_std.x(), c.log_dim_std.y(), c.log_dim_std.z()}},
         {"weight", c.weight}});
  }
  return {{"n_frames", spec.n_frames},
          {"min_objects", spec.min_objects},
          {"max_objects", spec.max_objects},
          {"min_depth", spec.min_depth},
          {"max_depth", spec.max_depth},
          {"seed", spec.seed},
          {"intrinsics", IntrinsicsToJson(spec.intrinsics)},
          {"classes", std::move(classes)}};
}

SceneSpec ReadSceneSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) SpecFail("cannot open '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    SpecFail(path.string() + ": " + e.what());
  }
  return SceneSpecFromJson(j);
}

}  // namespace mood3d
