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

#include "mood3d/cli.h"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mood3d/error.h"
#include "mood3d/geometry.h"
#include "mood3d/io.h"
#include "mood3d/lifting.h"
#include "mood3d/losses.h"
#include "mood3d/metrics.h"
#include "mood3d/synth.h"

namespace mood3d {
namespace {

constexpr const char* kThreadsEnv = "MOOD3D_THREADS";

std::string Fixed(double v, int decimals) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(decimals) << v;
  return os.str();
}

// Metric flags shared by `eval` and `compare-matching`.
struct MetricFlags {
  std::string gt_path;
  std::string pred_path;
  std::vector<double> iou_thresholds = MetricConfig::DefaultIouThresholds();
  std::vector<double> dist_ratios = MetricConfig::DefaultDistRatioThresholds();
  double tp_ratio = 1.0;
  int recall_points = 101;
  std::string ap_integration = "interpolated";
  std::string radius = "circumscribed";
  std::vector<std::string> base_classes;
  std::vector<std::string> novel_classes;
  int threads = 1;

  void Register(CLI::App* cmd, bool require_inputs) {
    auto* gt = cmd->add_option("--gt", gt_path, "Ground-truth JSONL file");
    auto* pred = cmd->add_option("--pred", pred_path, "Prediction JSONL file");
    if (require_inputs) {
      gt->required();
      pred->required();
    }
    cmd->add_option("--iou-thresholds", iou_thresholds,
                    "IoU thresholds for AP3D")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--dist-ratios", dist_ratios,
                    "Center-distance thresholds as fractions of GT radius")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--tp-ratio", tp_ratio,
                    "Distance ratio whose matches feed the TP errors")
        ->capture_default_str();
    cmd->add_option("--recall-points", recall_points,
                    "Recall samples for interpolated AP")
        ->capture_default_str();
    cmd->add_option("--ap-integration", ap_integration, "AP integration rule")
        ->check(CLI::IsMember({"interpolated", "trapezoid"}))
        ->capture_default_str();
    cmd->add_option("--radius", radius, "GT radius definition")
        ->check(CLI::IsMember({"circumscribed", "inscribed"}))
        ->capture_default_str();
    cmd->add_option("--base-classes", base_classes,
                    "Classes pooled into ODS(B)")
        ->delimiter(',');
    cmd->add_option("--novel-classes", novel_classes,
                    "Classes pooled into ODS(N)")
        ->delimiter(',');
    cmd->add_option("--threads", threads, "Worker threads")
        ->envname(kThreadsEnv)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  MetricConfig Config() const {
    MetricConfig cfg;
    cfg.iou_thresholds = iou_thresholds;
    cfg.dist_ratio_thresholds = dist_ratios;
    cfg.tp_error_threshold_ratio = tp_ratio;
    cfg.recall_points = recall_points;
    cfg.ap_integration = ap_integration == "trapezoid"
                             ? ApIntegration::kTrapezoid
                             : ApIntegration::kInterpolated;
    cfg.radius_mode = radius == "inscribed" ? RadiusMode::kInscribed
                                            : RadiusMode::kCircumscribed;
    if (!base_classes.empty()) cfg.base_classes = base_classes;
    if (!novel_classes.empty()) cfg.novel_classes = novel_classes;
    cfg.Validate();
    return cfg;
  }

  MetricReport Run(const MetricConfig& cfg) const {
    const Dataset gt = ReadGroundTruth(gt_path);
    const Dataset pred = ReadPredictions(pred_path);
    return Evaluate(gt.AllGroundTruth(), pred.AllDetections(), cfg, threads);
  }
};

void PrintSummary(const MetricReport& r, std::ostream& out) {
  out << std::left << std::setw(20) << "class" << std::right << std::setw(8)
      << "AP3D" << std::setw(11) << "AP3D_dist" << std::setw(8) << "mATE"
      << std::setw(8) << "mASE" << std::setw(8) << "mAOE" << std::setw(6)
      << "GT" << std::setw(6) << "TP" << '\n';
  for (const ClassMetrics& c : r.classes) {
    out << std::left << std::setw(20) << c.label << std::right << std::setw(8)
        << FormatPercent(c.ap_iou) << std::setw(11) << FormatPercent(c.ap_dist)
        << std::setw(8) << Fixed(c.tp_error.ate, 3) << std::setw(8)
        << Fixed(c.tp_error.ase, 3) << std::setw(8) << Fixed(c.tp_error.aoe, 3)
        << std::setw(6) << c.num_ground_truth << std::setw(6)
        << c.true_positives << '\n';
  }
  auto split = [](const std::optional<SplitScore>& s) {
    return s ? FormatPercent(s->ods) : std::string("-");
  };
  out << '\n'
      << "AP3D       " << FormatPercent(r.overall.ap_iou) << '\n'
      << "AP3D_dist  " << FormatPercent(r.overall.ap_dist) << '\n'
      << "mATE       " << Fixed(r.overall.mate, 3) << '\n'
      << "mASE       " << Fixed(r.overall.mase, 3) << '\n'
      << "mAOE       " << Fixed(r.overall.maoe, 3) << '\n'
      << "ODS        " << FormatPercent(r.overall.ods) << '\n'
      << "ODS(B)     " << split(r.base) << '\n'
      << "ODS(N)     " << split(r.novel) << '\n';
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::kInvalidArgument, "cannot write '" + path + "'");
  f << text;
}

int ExitCodeFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEmptyGroundTruth:
      return kExitEmptyGroundTruth;
    case ErrorCode::kMixedFrames:
    case ErrorCode::kNoGroundTruth:
      return kExitInternalError;
    default:
      return kExitInputError;
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Monocular 3D detection geometry and evaluation toolkit",
               "mood3d"};
  app.set_config("--config", "", "TOML/INI file supplying any flag");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // eval
  MetricFlags eval_flags;
  std::string report_path;
  std::string csv_path;
  std::string format = "text";
  std::optional<double> comp_ap;
  std::optional<double> comp_ate;
  std::optional<double> comp_ase;
  std::optional<double> comp_aoe;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate predictions against ground truth (AP3D, ODS)");
  eval_flags.Register(eval, false);
  eval->add_option("--report", report_path, "Write the JSON report here");
  eval->add_option("--csv", csv_path, "Write the summary CSV row here");
  eval->add_option("--format", format, "Standard output format")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  auto* ap_opt = eval->add_option("--ap-dist", comp_ap,
                                  "Component mode: AP3D_dist in [0, 1]");
  auto* ate_opt = eval->add_option("--mate", comp_ate, "Component mode: mATE");
  auto* ase_opt = eval->add_option("--mase", comp_ase, "Component mode: mASE");
  auto* aoe_opt = eval->add_option("--maoe", comp_aoe, "Component mode: mAOE");
  for (auto* o : {ap_opt, ate_opt, ase_opt, aoe_opt}) {
    for (auto* other : {ap_opt, ate_opt, ase_opt, aoe_opt}) {
      if (o != other) o->needs(other);
    }
  }

  // compare-matching
  MetricFlags cmp_flags;
  std::string cmp_out;
  CLI::App* cmp = app.add_subcommand(
      "compare-matching", "Per-class AP3D with IoU versus distance matching");
  cmp_flags.Register(cmp, true);
  cmp->add_option("--out", cmp_out, "Also write the table as CSV");

  // lift
  LiftParams lift_params;
  std::vector<double> dims_log{0.0, 0.0, 0.0};
  std::vector<double> rot6d{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  std::vector<double> box2d;
  CameraIntrinsics lift_k;
  LiftScales scales;
  CLI::App* lift = app.add_subcommand("lift", "Decode head outputs to a 3D box");
  lift->add_option("--u-off", lift_params.u_off, "Projected-center x offset (px)")
      ->capture_default_str();
  lift->add_option("--v-off", lift_params.v_off, "Projected-center y offset (px)")
      ->capture_default_str();
  lift->add_option("--d-log", lift_params.d_log, "Scaled log depth")
      ->capture_default_str();
  lift->add_option("--dims-log", dims_log, "Scaled log dimensions w,l,h")
      ->delimiter(',')
      ->expected(3);
  lift->add_option("--rot6d", rot6d, "6D rotation a0,a1,a2,b0,b1,b2")
      ->delimiter(',')
      ->expected(6);
  lift->add_option("--box2d", box2d, "2D box x1,y1,x2,y2")
      ->delimiter(',')
      ->expected(4)
      ->required();
  lift->add_option("--fx", lift_k.fx)->required();
  lift->add_option("--fy", lift_k.fy)->required();
  lift->add_option("--cx", lift_k.cx)->required();
  lift->add_option("--cy", lift_k.cy)->required();
  lift->add_option("--width", lift_k.width, "Image width")->required();
  lift->add_option("--height", lift_k.height, "Image height")->required();
  lift->add_option("--s-depth", scales.s_depth, "Depth scale")
      ->capture_default_str();
  lift->add_option("--s-dim", scales.s_dim, "Dimension scale")
      ->capture_default_str();
  bool with_jacobian = false;
  lift->add_flag("--jacobian", with_jacobian,
                 "Also print the 9x12 Jacobian (center, dims, rotation vector)");

  // canon
  CameraIntrinsics canon_k;
  CanonicalConfig canon_cfg;
  CLI::App* canon = app.add_subcommand(
      "canon", "Map intrinsics into the canonical image space");
  canon->add_option("--width", canon_k.width, "Source image width")->required();
  canon->add_option("--height", canon_k.height, "Source image height")
      ->required();
  canon->add_option("--fx", canon_k.fx)->required();
  canon->add_option("--fy", canon_k.fy)->required();
  canon->add_option("--cx", canon_k.cx)->required();
  canon->add_option("--cy", canon_k.cy)->required();
  canon->add_option("--canon-height", canon_cfg.canon_height)
      ->capture_default_str();
  canon->add_option("--canon-width", canon_cfg.canon_width)
      ->capture_default_str();

  // synth
  std::string spec_path;
  std::string preset = "mixed";
  std::optional<int> frames_override;
  std::optional<std::uint64_t> seed_override;
  PerturbModel perturb;
  std::string gt_out;
  std::string pred_out;
  int synth_threads = 1;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a seeded synthetic scene and noisy predictions");
  auto* spec_opt =
      synth->add_option("--spec", spec_path, "Scene spec JSON file");
  synth->add_option("--preset", preset, "Built-in scene")
      ->check(CLI::IsMember({"thin", "large", "mixed"}))
      ->excludes(spec_opt)
      ->capture_default_str();
  synth->add_option("--frames", frames_override, "Override frame count");
  synth->add_option("--seed", seed_override, "Override scene seed");
  synth->add_option("--sigma-t", perturb.sigma_t, "Center noise std (m)")
      ->capture_default_str();
  synth->add_option("--sigma-s", perturb.sigma_s, "Log-dimension noise std")
      ->capture_default_str();
  synth->add_option("--sigma-r", perturb.sigma_r, "Rotation noise std (rad)")
      ->capture_default_str();
  synth->add_option("--p-miss", perturb.p_miss, "Probability of a missed GT")
      ->capture_default_str();
  synth->add_option("--fp-rate", perturb.fp_rate, "False positives per frame")
      ->capture_default_str();
  synth->add_option("--noise-seed", perturb.seed, "Prediction noise seed")
      ->capture_default_str();
  synth->add_option("--gt-out", gt_out, "Ground-truth JSONL output")
      ->required();
  synth->add_option("--pred-out", pred_out, "Prediction JSONL output")
      ->required();
  synth->add_option("--threads", synth_threads, "Worker threads")
      ->envname(kThreadsEnv)
      ->check(CLI::PositiveNumber);

  // loss
  std::string loss_kind;
  std::vector<double> loss_pred;
  std::vector<double> loss_gt;
  double lambda_si = 0.5;
  std::vector<double> l2d;
  std::vector<double> l3d;
  double depth_loss = 0.0;
  LossWeights weights;
  CLI::App* loss = app.add_subcommand("loss", "Evaluate a training loss");
  loss->add_option("--kind", loss_kind, "silog | giou | final | l1")
      ->check(CLI::IsMember({"silog", "giou", "final", "l1"}))
      ->required();
  loss->add_option("--pred", loss_pred,
                   "silog: depths; giou: x1,y1,x2,y2; l1: 12 head outputs")
      ->delimiter(',');
  loss->add_option("--target", loss_gt,
                   "silog: depths; giou: x1,y1,x2,y2; l1: 12 head outputs")
      ->delimiter(',');
  loss->add_option("--lambda-si", lambda_si, "silog variance weight")
      ->capture_default_str();
  loss->add_option("--l2d", l2d, "final: per-layer 2D losses")->delimiter(',');
  loss->add_option("--l3d", l3d, "final: per-layer 3D losses")->delimiter(',');
  loss->add_option("--depth", depth_loss, "final: auxiliary depth loss");
  loss->add_option("--w-2d", weights.w_2d)->capture_default_str();
  loss->add_option("--w-3d", weights.w_3d)->capture_default_str();
  loss->add_option("--lambda-depth", weights.lambda_depth)
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }

  try {
    if (eval->parsed()) {
      if (comp_ap) {
        const double ods = Ods(*comp_ap, *comp_ate, *comp_ase, *comp_aoe);
        out << "ODS        " << FormatPercent(ods) << '\n';
        return kExitOk;
      }
      if (eval_flags.gt_path.empty() || eval_flags.pred_path.empty()) {
        err << "eval: --gt and --pred are required unless --ap-dist, --mate, "
               "--mase and --maoe are given\n";
        return kExitInputError;
      }
      const MetricConfig cfg = eval_flags.Config();
      const MetricReport report = eval_flags.Run(cfg);
      if (!report_path.empty()) WriteReport(report, cfg, report_path);
      if (!csv_path.empty()) WriteText(csv_path, ReportToCsv(report));
      if (format == "csv") {
        out << ReportToCsv(report);
      } else {
        PrintSummary(report, out);
      }
      return kExitOk;
    }

    if (cmp->parsed()) {
      const MetricConfig cfg = cmp_flags.Config();
      const std::vector<MatchingGap> rows =
          CompareMatching(cmp_flags.Run(cfg));
      std::ostringstream csv;
      csv << "class,AP3D_iou,AP3D_dist,gap\n";
      out << std::left << std::setw(20) << "class" << std::right
          << std::setw(10) << "AP3D_iou" << std::setw(11) << "AP3D_dist"
          << std::setw(8) << "gap" << '\n';
      for (const MatchingGap& g : rows) {
        out << std::left << std::setw(20) << g.label << std::right
            << std::setw(10) << FormatPercent(g.ap_iou) << std::setw(11)
            << FormatPercent(g.ap_dist) << std::setw(8)
            << FormatPercent(g.gap) << '\n';
        csv << g.label << ',' << FormatPercent(g.ap_iou) << ','
            << FormatPercent(g.ap_dist) << ',' << FormatPercent(g.gap) << '\n';
      }
      if (!cmp_out.empty()) WriteText(cmp_out, csv.str());
      return kExitOk;
    }

    if (lift->parsed()) {
      lift_params.dims_log = Vec3(dims_log[0], dims_log[1], dims_log[2]);
      lift_params.rot6d = {Vec3(rot6d[0], rot6d[1], rot6d[2]),
                           Vec3(rot6d[3], rot6d[4], rot6d[5])};
      const Box2D b{box2d[0], box2d[1], box2d[2], box2d[3]};
      const Box3D box = Lift(lift_params, b, lift_k, scales);
      nlohmann::json j = BoxToJson(box);
      if (with_jacobian) {
        const LiftJacobianMatrix jac = LiftJacobian(lift_params, b, lift_k, scales);
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < jac.rows(); ++r) {
          std::vector<double> row(jac.cols());
          for (int c = 0; c < jac.cols(); ++c) row[c] = jac(r, c);
          rows.push_back(row);
        }
        j["jacobian"] = rows;
      }
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (canon->parsed()) {
      const CanonicalResult r = Canonicalize(canon_k, canon_cfg);
      const CanonicalTransform& t = r.transform;
      nlohmann::json j = {
          {"transform",
           {{"scale", t.scale},
            {"pad_left", t.pad_left},
            {"pad_top", t.pad_top},
            {"resized_width", t.resized_width},
            {"resized_height", t.resized_height},
            {"source_width", t.source_width},
            {"source_height", t.source_height}}},
          {"intrinsics",
           {{"fx", r.intrinsics.fx},
            {"fy", r.intrinsics.fy},
            {"cx", r.intrinsics.cx},
            {"cy", r.intrinsics.cy},
            {"width", r.intrinsics.width},
            {"height", r.intrinsics.height}}}};
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (synth->parsed()) {
      SceneSpec spec;
      if (!spec_path.empty()) {
        spec = ReadSceneSpec(spec_path);
      } else if (preset == "thin") {
        spec = FixedSizeScene("thin", Vec3(0.1, 2.0, 2.0), 50, 0);
      } else if (preset == "large") {
        spec = FixedSizeScene("car", Vec3(2.0, 4.5, 1.8), 50, 0);
      } else {
        spec = FixedSizeScene("car", Vec3(2.0, 4.5, 1.8), 50, 0);
        spec.classes.push_back(
            {"picture", Vec3(0.1, 1.0, 0.8).array().log().matrix(),
             Vec3(0.2, 0.2, 0.2), 1.0});
        spec.classes.push_back(
            {"pedestrian", Vec3(0.6, 0.6, 1.7).array().log().matrix(),
             Vec3(0.1, 0.1, 0.1), 1.0});
      }
      if (frames_override) spec.n_frames = *frames_override;
      if (seed_override) spec.seed = *seed_override;
      const Scene scene = Generate(spec, synth_threads);
      const std::vector<Detection> dets = Perturb(scene, perturb, synth_threads);
      const Dataset data = SceneToDataset(scene, dets);
      WriteGroundTruth(data, gt_out);
      WritePredictions(data, pred_out);
      out << "wrote " << scene.AllGroundTruth().size() << " boxes and "
          << dets.size() << " detections over " << scene.frames.size()
          << " frames\n";
      return kExitOk;
    }

    if (loss->parsed()) {
      double value = 0.0;
      if (loss_kind == "silog") {
        value = Silog(loss_pred, loss_gt, {}, lambda_si);
      } else if (loss_kind == "giou") {
        if (loss_pred.size() != 4 || loss_gt.size() != 4) {
          err << "loss giou: --pred and --target take x1,y1,x2,y2\n";
          return kExitInputError;
        }
        value = Giou2d({loss_pred[0], loss_pred[1], loss_pred[2], loss_pred[3]},
                       {loss_gt[0], loss_gt[1], loss_gt[2], loss_gt[3]});
      } else if (loss_kind == "l1") {
        if (loss_pred.size() != 12 || loss_gt.size() != 12) {
          err << "loss l1: --pred and --target take 12 values\n";
          return kExitInputError;
        }
        value = L13d(LiftParams::FromVector(
                         Eigen::Map<const LiftParams::Vector>(loss_pred.data())),
                     LiftParams::FromVector(
                         Eigen::Map<const LiftParams::Vector>(loss_gt.data())));
      } else {
        value = FinalLoss(l2d, l3d, depth_loss, weights);
      }
      std::ostringstream os;
      os << std::setprecision(17) << value;
      out << os.str() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace mood3d
