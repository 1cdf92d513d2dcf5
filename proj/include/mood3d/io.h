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

// On-disk formats.
//
// Ground truth and predictions are JSON Lines, one frame per line:
//
//   {"schema_version": "1.0", "frame_id": "f0",
//    "intrinsics": {"fx": .., "fy": .., "cx": .., "cy": ..,
//                   "width": .., "height": ..},
//    "objects": [{"label": "car", "score": 0.9,
//                 "center": [x, y, z], "dims": [w, l, h],
//                 "rotation": [r00, r01, r02, r10, ..., r22],
//                 "box2d": [x1, y1, x2, y2]}]}
//
// "score" is required in predictions and rejected in ground truth. A rotation
// may be given as "rot6d": [a0, a1, a2, b0, b1, b2] instead of "rotation"; it
// is always written back as a row-major matrix. Units: meters, radians,
// pixels. Blank lines are ignored.

#ifndef MOOD3D_IO_H_
#define MOOD3D_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mood3d/metrics.h"
#include "mood3d/synth.h"

namespace mood3d {

inline constexpr std::string_view kSchemaVersion = "1.0";

struct FrameRecord {
  std::string frame_id;
  CameraIntrinsics intrinsics;
  std::vector<GroundTruth> ground_truth;
  std::vector<Detection> detections;
};

struct Dataset {
  std::vector<FrameRecord> frames;

  std::vector<GroundTruth> AllGroundTruth() const;
  std::vector<Detection> AllDetections() const;
};

// Parse failures throw InputError carrying the 1-based line number.
Dataset ParseGroundTruth(std::istream& in);
Dataset ParsePredictions(std::istream& in);
Dataset ReadGroundTruth(const std::filesystem::path& path);
Dataset ReadPredictions(const std::filesystem::path& path);

void WriteGroundTruth(const Dataset& data, std::ostream& out);
void WritePredictions(const Dataset& data, std::ostream& out);
void WriteGroundTruth(const Dataset& data, const std::filesystem::path& path);
void WritePredictions(const Dataset& data, const std::filesystem::path& path);

// Frames of a synthetic scene, with `dets` attached to their frames.
Dataset SceneToDataset(const Scene& scene, const std::vector<Detection>& dets);

nlohmann::json BoxToJson(const Box3D& box);

// Key-sorted JSON; identical inputs give identical bytes.
nlohmann::json ReportToJson(const MetricReport& report,
                            const MetricConfig& cfg);
std::string ReportToText(const MetricReport& report, const MetricConfig& cfg);
void WriteReport(const MetricReport& report, const MetricConfig& cfg,
                 const std::filesystem::path& path);

// One header and one data row with the columns AP3D_dist, mATE, mASE, mAOE,
// ODS, ODS(B), ODS(N). AP and ODS are percentages with one decimal; errors
// keep three decimals; missing splits print "-".
std::string ReportToCsv(const MetricReport& report);

// Percent with one decimal, e.g. 0.0892 -> "8.9".
std::string FormatPercent(double fraction);

SceneSpec SceneSpecFromJson(const nlohmann::json& j);
nlohmann::json SceneSpecToJson(const SceneSpec& spec);
SceneSpec ReadSceneSpec(const std::filesystem::path& path);

}  // namespace mood3d

#endif  // MOOD3D_IO_H_
