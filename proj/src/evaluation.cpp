#include "tubelink/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tubelink/errors.hpp"
#include "tubelink/geometry.hpp"
#include "tubelink/scoring.hpp"

namespace tubelink {

void validate_eval_config(const EvalConfig& cfg) {
  if (cfg.iou_thresholds.empty()) {
    throw_validation("eval.iou_thresholds must not be empty");
  }
  for (double d : cfg.iou_thresholds) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw_validation("eval.iou_thresholds entries must be in (0,1]");
    }
  }
}

namespace {

std::vector<TimedBox> timed_boxes(const LabeledTube& tube) {
  std::vector<TimedBox> out;
  out.reserve(tube.boxes.size());
  for (std::size_t k = 0; k < tube.boxes.size(); ++k) {
    out.emplace_back(static_cast<int>(k) + 1, tube.boxes[k]);
  }
  return out;
}

}  // namespace

std::vector<bool> match_tubes(const std::vector<LabeledTube>& preds,
                              const std::vector<GroundTruthTube>& gts,
                              double iou_threshold) {
  std::vector<bool> flags(preds.size(), false);
  if (preds.empty()) return flags;
  const int cls = preds.front().predicted_class;

  std::vector<bool> gt_matched(gts.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (preds[p].predicted_class != cls) {
      throw_validation("match_tubes: predictions span multiple classes");
    }
    const std::vector<TimedBox> pred_boxes = timed_boxes(preds[p]);
    int best_gt = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_matched[g] || gts[g].class_label != cls ||
          gts[g].video_id != preds[p].video_id) {
        continue;
      }
      const double overlap = tube_iou(pred_boxes, gts[g].boxes);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best_iou = overlap;
        best_gt = static_cast<int>(g);
      }
      // An exact-zero threshold cannot occur (delta in (0,1]), so
      // overlap > best_iou keeps the earliest gt on ties via >.
    }
    if (best_gt >= 0) {
      gt_matched[best_gt] = true;
      flags[p] = true;
    }
  }
  return flags;
}

double average_precision(const std::vector<bool>& tp_flags, long num_gt) {
  if (num_gt <= 0) return 0.0;
  // Precision envelope over the recall steps, all-point interpolation.
  const std::size_t n = tp_flags.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  long tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (tp_flags[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
  }
  double ap = 0.0;
  double envelope = 0.0;
  double prev_recall = 0.0;
  // Walk from the end so the envelope is the running max of precision at
  // recall >= current.
  std::vector<double> env(n);
  for (std::size_t i = n; i-- > 0;) {
    envelope = std::max(envelope, precision[i]);
    env[i] = envelope;
  }
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * env[i];
    prev_recall = recall[i];
  }
  return ap;
}

EvalReport video_map(const std::vector<LabeledTube>& preds,
                     const std::vector<GroundTruthTube>& gts,
                     const EvalConfig& cfg) {
  validate_eval_config(cfg);

  // Class vocabulary: tube score length when tubes exist, else enough to
  // cover the ground-truth labels.
  std::size_t class_count = 0;
  for (const LabeledTube& t : preds) {
    if (class_count == 0) {
      class_count = t.class_scores.size();
    } else if (t.class_scores.size() != class_count) {
      throw_validation("video_map: inconsistent class vocabularies in tubes");
    }
  }
  int max_label = -1;
  for (const GroundTruthTube& g : gts) max_label = std::max(max_label, g.class_label);
  if (preds.empty()) {
    class_count = static_cast<std::size_t>(max_label + 1);
  } else if (max_label >= static_cast<int>(class_count)) {
    std::ostringstream msg;
    msg << "video_map: ground-truth label " << max_label
        << " outside tube vocabulary of " << class_count << " classes";
    throw_validation(msg.str());
  }

  EvalReport report;

  // Classification accuracy: a video counts correct when the top-scoring
  // tube's class matches one of its ground-truth labels.
  std::map<std::string, std::vector<LabeledTube>> tubes_by_video;
  for (const LabeledTube& t : preds) tubes_by_video[t.video_id].push_back(t);
  std::map<std::string, std::set<int>> labels_by_video;
  for (const GroundTruthTube& g : gts) {
    labels_by_video[g.video_id].insert(g.class_label);
  }
  for (const auto& [video_id, labels] : labels_by_video) {
    ++report.videos_evaluated;
    const auto it = tubes_by_video.find(video_id);
    if (it == tubes_by_video.end() || it->second.empty()) continue;
    const auto [cls, score] = classify_video(it->second);
    if (labels.count(cls)) ++report.videos_correct;
  }
  report.classification_accuracy =
      report.videos_evaluated == 0
          ? 0.0
          : static_cast<double>(report.videos_correct) /
                static_cast<double>(report.videos_evaluated);

  // Per-class prediction lists in descending score order (stable on ties).
  std::vector<std::vector<LabeledTube>> preds_by_class(class_count);
  for (const LabeledTube& t : preds) {
    preds_by_class[static_cast<std::size_t>(t.predicted_class)].push_back(t);
  }
  for (auto& list : preds_by_class) {
    std::stable_sort(list.begin(), list.end(),
                     [](const LabeledTube& a, const LabeledTube& b) {
                       return a.predicted_score > b.predicted_score;
                     });
  }
  std::vector<long> gt_count(class_count, 0);
  for (const GroundTruthTube& g : gts) {
    ++gt_count[static_cast<std::size_t>(g.class_label)];
  }

  for (double delta : cfg.iou_thresholds) {
    ThresholdResult tr;
    tr.iou_threshold = delta;
    double ap_sum = 0.0;
    for (std::size_t c = 0; c < class_count; ++c) {
      if (gt_count[c] == 0) {
        // Classes absent from the ground truth are excluded from the mAP
        // mean; their predictions still count as false positives.
        tr.fp += static_cast<long>(preds_by_class[c].size());
        continue;
      }
      ClassResult cr;
      cr.class_index = static_cast<int>(c);
      cr.num_gt = gt_count[c];
      const std::vector<bool> flags =
          match_tubes(preds_by_class[c], gts, delta);
      for (bool f : flags) (f ? ++cr.tp : ++cr.fp);
      cr.ap = average_precision(flags, cr.num_gt);
      ap_sum += cr.ap;
      tr.tp += cr.tp;
      tr.fp += cr.fp;
      tr.missed += cr.num_gt - cr.tp;
      tr.per_class.push_back(cr);
    }
    tr.mean_ap = tr.per_class.empty()
                     ? 0.0
                     : ap_sum / static_cast<double>(tr.per_class.size());
    report.thresholds.push_back(std::move(tr));
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["thresholds"] = nlohmann::ordered_json::array();
  for (const ThresholdResult& tr : report.thresholds) {
    nlohmann::ordered_json jt;
    jt["iou_threshold"] = tr.iou_threshold;
    jt["mean_ap"] = tr.mean_ap;
    jt["tp"] = tr.tp;
    jt["fp"] = tr.fp;
    jt["missed"] = tr.missed;
    jt["per_class"] = nlohmann::ordered_json::array();
    for (const ClassResult& cr : tr.per_class) {
      nlohmann::ordered_json jc;
      jc["class"] = cr.class_index;
      jc["ap"] = cr.ap;
      jc["num_gt"] = cr.num_gt;
      jc["tp"] = cr.tp;
      jc["fp"] = cr.fp;
      jt["per_class"].push_back(std::move(jc));
    }
    j["thresholds"].push_back(std::move(jt));
  }
  j["classification_accuracy"] = report.classification_accuracy;
  j["videos_evaluated"] = report.videos_evaluated;
  j["videos_correct"] = report.videos_correct;
  return j.dump(2);
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(20) << "IoU threshold";
  for (const ThresholdResult& tr : report.thresholds) {
    out << std::right << std::setw(9) << tr.iou_threshold;
  }
  out << '\n';
  out << std::left << std::setw(20) << "video-mAP (%)";
  for (const ThresholdResult& tr : report.thresholds) {
    out << std::right << std::setw(9) << 100.0 * tr.mean_ap;
  }
  out << '\n';
  out << "classification accuracy: " << 100.0 * report.classification_accuracy
      << "% (" << report.videos_correct << "/" << report.videos_evaluated
      << " videos)\n";
  return out.str();
}

}  // namespace tubelink
