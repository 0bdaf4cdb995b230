#pragma once

#include <string>
#include <vector>

#include "tubelink/types.hpp"

namespace tubelink {

struct EvalConfig {
  std::vector<double> iou_thresholds = {0.1, 0.2, 0.3, 0.4, 0.5};
};

void validate_eval_config(const EvalConfig& cfg);

struct ClassResult {
  int class_index = 0;
  double ap = 0.0;
  long num_gt = 0;
  long tp = 0;
  long fp = 0;
};

struct ThresholdResult {
  double iou_threshold = 0.0;
  std::vector<ClassResult> per_class;  // classes with >= 1 gt instance
  double mean_ap = 0.0;
  long tp = 0;
  long fp = 0;
  long missed = 0;
};

struct EvalReport {
  std::vector<ThresholdResult> thresholds;
  double classification_accuracy = 0.0;
  long videos_evaluated = 0;
  long videos_correct = 0;
};

// Greedy matching in descending score order. A prediction is TP iff some
// unmatched same-class ground truth in the same video overlaps it with
// tube_iou >= threshold; each gt matches at most one prediction. `preds`
// must already be sorted by predicted_score descending and hold a single
// class; gts of other classes are ignored.
std::vector<bool> match_tubes(const std::vector<LabeledTube>& preds,
                              const std::vector<GroundTruthTube>& gts,
                              double iou_threshold);

// Area under the precision-recall curve with all-point interpolation
// (precision envelope). Flags must be in descending score order.
double average_precision(const std::vector<bool>& tp_flags, long num_gt);

// Full video-mAP protocol: per threshold, per-class AP over classes with
// ground truth, mAP as their unweighted mean; plus video classification
// accuracy (independent of the thresholds).
EvalReport video_map(const std::vector<LabeledTube>& preds,
                     const std::vector<GroundTruthTube>& gts,
                     const EvalConfig& cfg);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace tubelink
