#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "support.hpp"
#include "tubelink/errors.hpp"
#include "tubelink/evaluation.hpp"
#include "tubelink/pipeline.hpp"
#include "tubelink/synth.hpp"

using namespace tubelink;

namespace {

LabeledTube tube_at(const std::string& video, const BBox& box, int frames,
                    int cls, double score, int classes = 2) {
  LabeledTube t;
  t.video_id = video;
  t.boxes.assign(static_cast<std::size_t>(frames), box);
  t.class_scores.assign(static_cast<std::size_t>(classes), 0.0);
  t.class_scores[static_cast<std::size_t>(cls)] = score;
  t.predicted_class = cls;
  t.predicted_score = score;
  t.link_score = score;
  return t;
}

GroundTruthTube gt_at(const std::string& video, const BBox& box, int frames,
                      int cls) {
  GroundTruthTube g;
  g.video_id = video;
  g.class_label = cls;
  for (int t = 1; t <= frames; ++t) g.boxes.emplace_back(t, box);
  return g;
}

const BBox kBoxA{0, 0, 100, 100};
const BBox kBoxB{300, 300, 400, 400};

}  // namespace

TEST_CASE("match_tubes basics") {
  const auto pred = tube_at("v", kBoxA, 5, 0, 0.9);
  const auto gt = gt_at("v", kBoxA, 5, 0);

  CHECK(match_tubes({pred}, {gt}, 0.5) == std::vector<bool>{true});
  CHECK(match_tubes({pred}, {gt_at("v", kBoxA, 5, 1)}, 0.5) ==
        std::vector<bool>{false});  // other-class gt is invisible
  CHECK(match_tubes({pred}, {gt_at("w", kBoxA, 5, 0)}, 0.5) ==
        std::vector<bool>{false});  // wrong video
  CHECK(match_tubes({pred}, {gt_at("v", kBoxB, 5, 0)}, 0.5) ==
        std::vector<bool>{false});  // no overlap
}

TEST_CASE("each ground truth matches at most one prediction") {
  const auto first = tube_at("v", kBoxA, 5, 0, 0.9);
  const auto second = tube_at("v", kBoxA, 5, 0, 0.8);
  const auto flags = match_tubes({first, second}, {gt_at("v", kBoxA, 5, 0)}, 0.5);
  CHECK(flags == std::vector<bool>{true, false});
}

TEST_CASE("a prediction takes the highest-overlap ground truth") {
  // strong overlaps gt0 (top half, iou 0.5) and gt1 (full box, iou 1.0);
  // it must take gt1. weak overlaps only gt1 (bottom half, iou 0.5), which
  // is then already matched, so weak ends up a false positive. If strong
  // had settled for gt0, weak would wrongly match gt1.
  const BBox top_half{0, 0, 100, 50};
  const BBox bottom_half{0, 50, 100, 100};
  const auto strong = tube_at("v", kBoxA, 5, 0, 0.9);
  const auto weak = tube_at("v", bottom_half, 5, 0, 0.8);
  const std::vector<GroundTruthTube> gts{gt_at("v", top_half, 5, 0),
                                         gt_at("v", kBoxA, 5, 0)};
  const auto flags = match_tubes({strong, weak}, gts, 0.4);
  CHECK(flags == std::vector<bool>{true, false});
}

TEST_CASE("match_tubes rejects mixed-class prediction lists") {
  const auto a = tube_at("v", kBoxA, 5, 0, 0.9);
  const auto b = tube_at("v", kBoxA, 5, 1, 0.8);
  CHECK_THROWS_AS(match_tubes({a, b}, {}, 0.5), Error);
}

TEST_CASE("average precision of the [TP, FP, TP] fixture") {
  // Worked by hand: 0.5 * 1 + 0.5 * (2/3) = 5/6.
  CHECK(average_precision({true, false, true}, 2) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("average precision edge cases") {
  CHECK(average_precision({true, true}, 2) == doctest::Approx(1.0));
  CHECK(average_precision({false, false}, 2) == 0.0);
  CHECK(average_precision({}, 2) == 0.0);
  CHECK(average_precision({true}, 0) == 0.0);
  // Envelope interpolation: the late TP's precision 1/2 applies to the
  // whole recall range.
  CHECK(average_precision({false, true}, 1) == doctest::Approx(0.5));
  // All gt recovered early: recall saturates at rank 1.
  CHECK(average_precision({true, false}, 1) == doctest::Approx(1.0));
}

TEST_CASE("video_map on perfect predictions") {
  const std::vector<LabeledTube> preds{tube_at("a", kBoxA, 5, 0, 0.9),
                                       tube_at("b", kBoxB, 5, 1, 0.8)};
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0),
                                         gt_at("b", kBoxB, 5, 1)};
  const EvalReport report = video_map(preds, gts, EvalConfig{});
  REQUIRE(report.thresholds.size() == 5);
  for (const ThresholdResult& tr : report.thresholds) {
    CHECK(tr.mean_ap == doctest::Approx(1.0));
    CHECK(tr.tp == 2);
    CHECK(tr.fp == 0);
    CHECK(tr.missed == 0);
    REQUIRE(tr.per_class.size() == 2);
    CHECK(tr.per_class[0].ap == doctest::Approx(1.0));
  }
  CHECK(report.classification_accuracy == doctest::Approx(1.0));
  CHECK(report.videos_evaluated == 2);
  CHECK(report.videos_correct == 2);
}

TEST_CASE("video_map with no predictions") {
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0)};
  const EvalReport report = video_map({}, gts, EvalConfig{});
  for (const ThresholdResult& tr : report.thresholds) {
    CHECK(tr.mean_ap == 0.0);
    CHECK(tr.missed == 1);
  }
  CHECK(report.classification_accuracy == 0.0);
}

TEST_CASE("classes without ground truth are excluded from the mean") {
  // One perfect class-0 tube plus a stray class-1 tube; class 1 has no gt,
  // so mAP is class 0's AP alone and the stray counts as FP.
  const std::vector<LabeledTube> preds{tube_at("a", kBoxA, 5, 0, 0.9),
                                       tube_at("a", kBoxB, 5, 1, 0.8)};
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0)};
  const EvalReport report = video_map(preds, gts, EvalConfig{});
  const ThresholdResult& tr = report.thresholds.back();
  REQUIRE(tr.per_class.size() == 1);
  CHECK(tr.per_class[0].class_index == 0);
  CHECK(tr.mean_ap == doctest::Approx(1.0));
  CHECK(tr.fp == 1);
}

TEST_CASE("accuracy accepts any ground-truth label of the video") {
  const std::vector<LabeledTube> preds{tube_at("a", kBoxA, 5, 1, 0.9)};
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0),
                                         gt_at("a", kBoxB, 5, 1)};
  const EvalReport report = video_map(preds, gts, EvalConfig{});
  CHECK(report.videos_evaluated == 1);
  CHECK(report.videos_correct == 1);
}

TEST_CASE("video_map validates class vocabularies") {
  auto a = tube_at("a", kBoxA, 5, 0, 0.9, 2);
  auto b = tube_at("a", kBoxB, 5, 0, 0.8, 3);
  CHECK_THROWS_AS(video_map({a, b}, {}, EvalConfig{}), Error);

  // Ground-truth label outside the tube vocabulary.
  CHECK_THROWS_AS(video_map({a}, {gt_at("a", kBoxA, 5, 7)}, EvalConfig{}),
                  Error);
}

TEST_CASE("mAP shrinks once localization degrades") {
  // Prediction overlaps gt with iou 1/3 < 0.5: counted at low deltas only.
  const BBox off{50, 0, 150, 100};
  const std::vector<LabeledTube> preds{tube_at("a", off, 5, 0, 0.9)};
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0)};
  const EvalReport report = video_map(preds, gts, EvalConfig{});
  CHECK(report.thresholds.front().mean_ap == doctest::Approx(1.0));
  CHECK(report.thresholds.back().mean_ap == 0.0);
  for (std::size_t i = 1; i < report.thresholds.size(); ++i) {
    CHECK(report.thresholds[i].mean_ap <=
          report.thresholds[i - 1].mean_ap + 1e-12);
  }
}

TEST_CASE("report renderings") {
  const std::vector<LabeledTube> preds{tube_at("a", kBoxA, 5, 0, 0.9)};
  const std::vector<GroundTruthTube> gts{gt_at("a", kBoxA, 5, 0)};
  const EvalReport report = video_map(preds, gts, EvalConfig{});

  const std::string json_text = report_to_json(report);
  const auto j = nlohmann::json::parse(json_text);
  CHECK(j.at("thresholds").size() == 5);
  CHECK(j.at("thresholds")[0].at("mean_ap").get<double>() ==
        doctest::Approx(1.0));
  CHECK(j.at("classification_accuracy").get<double>() == doctest::Approx(1.0));
  CHECK(j.at("videos_evaluated").get<long>() == 1);

  const std::string table = report_to_table(report);
  CHECK(table.find("IoU threshold") != std::string::npos);
  CHECK(table.find("video-mAP (%)") != std::string::npos);
  CHECK(table.find("100.00") != std::string::npos);
  CHECK(table.find("(1/1 videos)") != std::string::npos);
}

TEST_CASE("eval config validation") {
  EvalConfig cfg;
  cfg.iou_thresholds = {};
  CHECK_THROWS_AS(validate_eval_config(cfg), Error);
  cfg.iou_thresholds = {0.0};
  CHECK_THROWS_AS(validate_eval_config(cfg), Error);
  cfg.iou_thresholds = {1.5};
  CHECK_THROWS_AS(validate_eval_config(cfg), Error);
}

namespace {

// Direct-from-definition reference: the m-th true positive contributes
// the best precision reachable at or past its recall level. Quadratic on
// purpose; shares nothing with the envelope walk in the library.
double reference_ap(const std::vector<bool>& flags, long num_gt) {
  if (num_gt <= 0) return 0.0;
  std::vector<long> tp_at(flags.size());
  long tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) ++tp;
    tp_at[i] = tp;
  }
  double ap = 0.0;
  for (long m = 1; m <= tp; ++m) {
    double best = 0.0;
    for (std::size_t j = 0; j < flags.size(); ++j) {
      if (tp_at[j] < m) continue;
      best = std::max(best, static_cast<double>(tp_at[j]) /
                                static_cast<double>(j + 1));
    }
    ap += best / static_cast<double>(num_gt);
  }
  return ap;
}

double reference_map(const std::vector<LabeledTube>& preds,
                     const std::vector<GroundTruthTube>& gts, double delta,
                     int classes) {
  double ap_sum = 0.0;
  int classes_with_gt = 0;
  for (int c = 0; c < classes; ++c) {
    long num_gt = 0;
    for (const auto& g : gts) {
      if (g.class_label == c) ++num_gt;
    }
    if (num_gt == 0) continue;
    ++classes_with_gt;

    std::vector<LabeledTube> mine;
    for (const auto& t : preds) {
      if (t.predicted_class == c) mine.push_back(t);
    }
    std::stable_sort(mine.begin(), mine.end(),
                     [](const LabeledTube& a, const LabeledTube& b) {
                       return a.predicted_score > b.predicted_score;
                     });

    std::vector<bool> used(gts.size(), false);
    std::vector<bool> flags(mine.size(), false);
    for (std::size_t p = 0; p < mine.size(); ++p) {
      std::vector<TimedBox> boxes;
      for (std::size_t k = 0; k < mine[p].boxes.size(); ++k) {
        boxes.emplace_back(static_cast<int>(k) + 1, mine[p].boxes[k]);
      }
      int pick = -1;
      double pick_iou = 0.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (used[g] || gts[g].class_label != c ||
            gts[g].video_id != mine[p].video_id) {
          continue;
        }
        const double overlap = tube_iou(boxes, gts[g].boxes);
        if (overlap >= delta && overlap > pick_iou) {
          pick_iou = overlap;
          pick = static_cast<int>(g);
        }
      }
      if (pick >= 0) {
        used[static_cast<std::size_t>(pick)] = true;
        flags[p] = true;
      }
    }
    ap_sum += reference_ap(flags, num_gt);
  }
  return classes_with_gt == 0 ? 0.0
                              : ap_sum / static_cast<double>(classes_with_gt);
}

}  // namespace

TEST_CASE("mixed corpus agrees with the reference precision-recall oracle") {
  SynthConfig sc;
  sc.num_videos = 12;
  sc.frames_per_video = 10;
  sc.num_classes = 3;
  sc.proposals_per_frame = 2;
  sc.distractors = 2;
  sc.box_jitter = 8.0;
  sc.score_noise = 0.1;
  sc.stream_bias = 1.2;  // mislabels a fraction of the videos
  sc.seed = 77;
  const SynthCorpus corpus = synth_corpus(sc);

  PipelineConfig pc;
  const auto tubes = link_videos(corpus.detections, pc);
  const EvalReport report = evaluate_tubes(tubes, corpus.ground_truth, pc);
  REQUIRE(report.thresholds.size() == 5);

  bool interior = false;
  for (const ThresholdResult& tr : report.thresholds) {
    const double expected =
        reference_map(tubes, corpus.ground_truth, tr.iou_threshold, 3);
    CHECK(std::fabs(tr.mean_ap - expected) <= 1e-9);
    if (tr.mean_ap < 1.0) interior = true;
  }
  // The corpus must be hard enough that the crosscheck sees non-trivial
  // values somewhere.
  CHECK(interior);

  // Accuracy, recomputed from scratch.
  long correct = 0;
  long evaluated = 0;
  std::set<std::string> video_ids;
  for (const auto& g : corpus.ground_truth) video_ids.insert(g.video_id);
  for (const std::string& id : video_ids) {
    ++evaluated;
    const LabeledTube* top = nullptr;
    for (const auto& t : tubes) {
      if (t.video_id == id && (!top || t.predicted_score > top->predicted_score)) {
        top = &t;
      }
    }
    if (!top) continue;
    for (const auto& g : corpus.ground_truth) {
      if (g.video_id == id && g.class_label == top->predicted_class) {
        ++correct;
        break;
      }
    }
  }
  CHECK(report.videos_evaluated == evaluated);
  CHECK(std::fabs(report.classification_accuracy -
                  static_cast<double>(correct) /
                      static_cast<double>(evaluated)) <= 1e-9);
}
