#include "tubelink.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "tubelink/config.hpp"
#include "tubelink/errors.hpp"
#include "tubelink/io.hpp"
#include "tubelink/pipeline.hpp"
#include "tubelink/synth.hpp"

using namespace tubelink;

// Handle types are plain wrappers; all logic lives in the core library.
struct tl_config {
  PipelineConfig cfg;
};

struct tl_corpus {
  std::vector<VideoDetections> videos;
};

struct tl_tubes {
  std::vector<LabeledTube> tubes;
  std::vector<std::string> video_ids;  // distinct, in encounter order
};

struct tl_ground_truth {
  std::vector<GroundTruthTube> gts;
};

struct tl_report {
  EvalReport report;
};

namespace {

thread_local std::string g_last_error;

tl_status fail(tl_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn with exceptions translated to statuses at the ABI boundary.
template <typename Fn>
tl_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return TL_OK;
  } catch (const Error& e) {
    return fail(e.kind() == ErrorKind::io ? TL_ERR_IO : TL_ERR_VALIDATION,
                e.what());
  } catch (const std::bad_alloc&) {
    return fail(TL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TL_ERR_INTERNAL, "unknown error");
  }
}

// Heap copy released by tl_string_free.
char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc{};
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

tl_status need(bool ok, const char* what) {
  if (ok) return TL_OK;
  return fail(TL_ERR_ARGUMENT, std::string(what) + " must not be NULL");
}

std::vector<std::string> distinct_video_ids(
    const std::vector<LabeledTube>& tubes) {
  std::vector<std::string> ids;
  for (const LabeledTube& t : tubes) {
    bool seen = false;
    for (const std::string& id : ids) {
      if (id == t.video_id) {
        seen = true;
        break;
      }
    }
    if (!seen) ids.push_back(t.video_id);
  }
  return ids;
}

tl_tubes* make_tubes(std::vector<LabeledTube> tubes) {
  auto* out = new tl_tubes;
  out->video_ids = distinct_video_ids(tubes);
  out->tubes = std::move(tubes);
  return out;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) {
      throw_validation("empty entry in threshold list");
    }
    item = item.substr(first, last - first + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw_validation("'" + item + "' is not a number");
    }
    pos = comma + 1;
  }
  return out;
}

enum class KeyKind { none, integer, real, text };

// Resolves a dotted key to a setter; applies `ivalue`/`dvalue`/`svalue`
// according to `kind`. Integer values are accepted for real keys.
tl_status apply_key(PipelineConfig& cfg, const std::string& key, KeyKind kind,
                    long long ivalue, double dvalue, const std::string& svalue) {
  const auto want_int = [&]() -> long long {
    if (kind != KeyKind::integer) {
      throw_validation("key '" + key + "' takes an integer");
    }
    return ivalue;
  };
  const auto want_real = [&]() -> double {
    if (kind == KeyKind::integer) return static_cast<double>(ivalue);
    if (kind != KeyKind::real) {
      throw_validation("key '" + key + "' takes a number");
    }
    return dvalue;
  };
  const auto want_text = [&]() -> const std::string& {
    if (kind != KeyKind::text) {
      throw_validation("key '" + key + "' takes a string");
    }
    return svalue;
  };
  const auto want_index = [&](const char* what) -> int {
    const long long v = want_int();
    if (v < 0) throw_validation(std::string(what) + " must be >= 0");
    return static_cast<int>(v);
  };

  bool known = true;
  const tl_status status = guarded([&] {
    if (key == "link.top_k") cfg.link.top_k = static_cast<int>(want_int());
    else if (key == "link.nms_threshold") cfg.link.nms_threshold = want_real();
    else if (key == "link.empty_frame_policy") {
      const std::string& v = want_text();
      if (v == "error") cfg.link.empty_frame_policy = EmptyFramePolicy::error;
      else if (v == "carry_forward")
        cfg.link.empty_frame_policy = EmptyFramePolicy::carry_forward;
      else throw_validation("unknown empty_frame_policy '" + v + "'");
    } else if (key == "fusion.lambda2") cfg.fusion.lambda2 = want_real();
    else if (key == "scoring.lambda1") cfg.scoring.lambda1 = want_real();
    else if (key == "eval.iou_thresholds")
      cfg.eval.iou_thresholds = parse_csv_doubles(want_text());
    else if (key == "stream") cfg.stream = parse_stream_mode(want_text());
    else if (key == "workers") cfg.workers = static_cast<int>(want_int());
    else if (key == "seed") {
      // The run seed; synth follows it so that setting one knob is enough.
      const long long v = want_int();
      if (v < 0) throw_validation("seed must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(v);
      cfg.synth.seed = cfg.seed;
    } else if (key == "synth.videos" || key == "synth.num_videos")
      cfg.synth.num_videos = want_index("synth.videos");
    else if (key == "synth.frames" || key == "synth.frames_per_video")
      cfg.synth.frames_per_video = want_index("synth.frames");
    else if (key == "synth.proposals" || key == "synth.proposals_per_frame")
      cfg.synth.proposals_per_frame = want_index("synth.proposals");
    else if (key == "synth.classes" || key == "synth.num_classes")
      cfg.synth.num_classes = want_index("synth.classes");
    else if (key == "synth.distractors")
      cfg.synth.distractors = want_index("synth.distractors");
    else if (key == "synth.box_jitter") cfg.synth.box_jitter = want_real();
    else if (key == "synth.score_noise") cfg.synth.score_noise = want_real();
    else if (key == "synth.stream_bias") cfg.synth.stream_bias = want_real();
    else if (key == "synth.with_motion") cfg.synth.with_motion = want_int() != 0;
    else if (key == "synth.box_width") cfg.synth.box_width = want_real();
    else if (key == "synth.box_height") cfg.synth.box_height = want_real();
    else if (key == "synth.canvas_width") cfg.synth.canvas_width = want_real();
    else if (key == "synth.canvas_height") cfg.synth.canvas_height = want_real();
    else if (key == "synth.seed") {
      const long long v = want_int();
      if (v < 0) throw_validation("synth.seed must be >= 0");
      cfg.synth.seed = static_cast<std::uint64_t>(v);
    } else {
      known = false;
    }
  });
  if (!known) return fail(TL_ERR_ARGUMENT, "unknown config key '" + key + "'");
  return status;
}

}  // namespace

extern "C" {

const char* tl_version(void) { return "1.0.0"; }

const char* tl_last_error(void) { return g_last_error.c_str(); }

void tl_string_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ */

tl_config* tl_config_create(void) {
  try {
    return new tl_config;
  } catch (...) {
    return nullptr;
  }
}

void tl_config_destroy(tl_config* cfg) { delete cfg; }

tl_status tl_config_load_json(tl_config* cfg, const char* json_text) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(json_text, "json_text"); s != TL_OK) return s;
  return guarded([&] { cfg->cfg = config_from_json(json_text); });
}

tl_status tl_config_load_file(tl_config* cfg, const char* path) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  return guarded([&] { cfg->cfg = config_from_file(path); });
}

tl_status tl_config_set_int(tl_config* cfg, const char* key, long long value) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(key, "key"); s != TL_OK) return s;
  return apply_key(cfg->cfg, key, KeyKind::integer, value, 0.0, {});
}

tl_status tl_config_set_double(tl_config* cfg, const char* key, double value) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(key, "key"); s != TL_OK) return s;
  return apply_key(cfg->cfg, key, KeyKind::real, 0, value, {});
}

tl_status tl_config_set_string(tl_config* cfg, const char* key,
                               const char* value) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(key, "key"); s != TL_OK) return s;
  if (tl_status s = need(value, "value"); s != TL_OK) return s;
  return apply_key(cfg->cfg, key, KeyKind::text, 0, 0.0, value);
}

tl_status tl_config_to_json(const tl_config* cfg, char** out_json) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(out_json, "out_json"); s != TL_OK) return s;
  return guarded([&] { *out_json = dup_string(config_to_json(cfg->cfg)); });
}

/* ------------------------------------------------------------------ */

tl_status tl_detections_read(const char* path, tl_corpus** out) {
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded([&] {
    auto videos = read_detections_file(path);
    *out = new tl_corpus{std::move(videos)};
  });
}

tl_status tl_detections_write(const tl_corpus* corpus, const char* path) {
  if (tl_status s = need(corpus, "corpus"); s != TL_OK) return s;
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  return guarded([&] { write_detections_file(path, corpus->videos); });
}

void tl_corpus_destroy(tl_corpus* corpus) { delete corpus; }

size_t tl_corpus_video_count(const tl_corpus* corpus) {
  return corpus ? corpus->videos.size() : 0;
}

const char* tl_corpus_video_id(const tl_corpus* corpus, size_t index) {
  if (!corpus || index >= corpus->videos.size()) return nullptr;
  return corpus->videos[index].video_id.c_str();
}

/* ------------------------------------------------------------------ */

tl_status tl_link(const tl_corpus* corpus, const tl_config* cfg,
                  tl_tubes** out) {
  if (tl_status s = need(corpus, "corpus"); s != TL_OK) return s;
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded(
      [&] { *out = make_tubes(link_videos(corpus->videos, cfg->cfg)); });
}

tl_status tl_synthesize(const tl_config* cfg, const char* detections_path,
                        const char* ground_truth_path) {
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(detections_path, "detections_path"); s != TL_OK)
    return s;
  if (tl_status s = need(ground_truth_path, "ground_truth_path"); s != TL_OK)
    return s;
  return guarded([&] {
    validate_config(cfg->cfg);
    const SynthCorpus corpus = synth_corpus(cfg->cfg.synth);
    write_detections_file(detections_path, corpus.detections);
    write_ground_truth_file(ground_truth_path, corpus.ground_truth);
  });
}

tl_status tl_oracle_report(const tl_corpus* corpus, const tl_config* cfg,
                           char** out_jsonl) {
  if (tl_status s = need(corpus, "corpus"); s != TL_OK) return s;
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(out_jsonl, "out_jsonl"); s != TL_OK) return s;
  return guarded([&] {
    *out_jsonl =
        dup_string(oracle_paths_to_jsonl(oracle_paths(corpus->videos, cfg->cfg)));
  });
}

/* ------------------------------------------------------------------ */

tl_status tl_tubes_read(const char* path, tl_tubes** out) {
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded([&] { *out = make_tubes(read_tubes_file(path)); });
}

tl_status tl_tubes_write(const tl_tubes* tubes, const char* path) {
  if (tl_status s = need(tubes, "tubes"); s != TL_OK) return s;
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  return guarded([&] { write_tubes_file(path, tubes->tubes); });
}

void tl_tubes_destroy(tl_tubes* tubes) { delete tubes; }

size_t tl_tubes_count(const tl_tubes* tubes) {
  return tubes ? tubes->tubes.size() : 0;
}

size_t tl_tubes_video_count(const tl_tubes* tubes) {
  return tubes ? tubes->video_ids.size() : 0;
}

const char* tl_tubes_video_id(const tl_tubes* tubes, size_t index) {
  if (!tubes || index >= tubes->video_ids.size()) return nullptr;
  return tubes->video_ids[index].c_str();
}

size_t tl_tubes_count_for_video(const tl_tubes* tubes, const char* video_id) {
  if (!tubes || !video_id) return 0;
  size_t n = 0;
  for (const LabeledTube& t : tubes->tubes) {
    if (t.video_id == video_id) ++n;
  }
  return n;
}

tl_status tl_rescore(const tl_tubes* tubes, const char* tun_path,
                     const tl_config* cfg, tl_tubes** out) {
  if (tl_status s = need(tubes, "tubes"); s != TL_OK) return s;
  if (tl_status s = need(tun_path, "tun_path"); s != TL_OK) return s;
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded([&] {
    const TunCollection tun = read_tun_file(tun_path);
    *out = make_tubes(rescore_tubes(tubes->tubes, tun, cfg->cfg));
  });
}

/* ------------------------------------------------------------------ */

tl_status tl_ground_truth_read(const char* path, tl_ground_truth** out) {
  if (tl_status s = need(path, "path"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded([&] {
    auto gts = read_ground_truth_file(path);
    *out = new tl_ground_truth{std::move(gts)};
  });
}

void tl_ground_truth_destroy(tl_ground_truth* gt) { delete gt; }

tl_status tl_evaluate(const tl_tubes* tubes, const tl_ground_truth* gt,
                      const tl_config* cfg, tl_report** out) {
  if (tl_status s = need(tubes, "tubes"); s != TL_OK) return s;
  if (tl_status s = need(gt, "gt"); s != TL_OK) return s;
  if (tl_status s = need(cfg, "cfg"); s != TL_OK) return s;
  if (tl_status s = need(out, "out"); s != TL_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new tl_report{evaluate_tubes(tubes->tubes, gt->gts, cfg->cfg)};
  });
}

void tl_report_destroy(tl_report* report) { delete report; }

size_t tl_report_threshold_count(const tl_report* report) {
  return report ? report->report.thresholds.size() : 0;
}

tl_status tl_report_threshold(const tl_report* report, size_t index,
                              double* out_threshold) {
  if (tl_status s = need(report, "report"); s != TL_OK) return s;
  if (tl_status s = need(out_threshold, "out_threshold"); s != TL_OK) return s;
  if (index >= report->report.thresholds.size()) {
    return fail(TL_ERR_ARGUMENT, "threshold index out of range");
  }
  g_last_error.clear();
  *out_threshold = report->report.thresholds[index].iou_threshold;
  return TL_OK;
}

tl_status tl_report_mean_ap(const tl_report* report, size_t index,
                            double* out_mean_ap) {
  if (tl_status s = need(report, "report"); s != TL_OK) return s;
  if (tl_status s = need(out_mean_ap, "out_mean_ap"); s != TL_OK) return s;
  if (index >= report->report.thresholds.size()) {
    return fail(TL_ERR_ARGUMENT, "threshold index out of range");
  }
  g_last_error.clear();
  *out_mean_ap = report->report.thresholds[index].mean_ap;
  return TL_OK;
}

tl_status tl_report_accuracy(const tl_report* report, double* out_accuracy) {
  if (tl_status s = need(report, "report"); s != TL_OK) return s;
  if (tl_status s = need(out_accuracy, "out_accuracy"); s != TL_OK) return s;
  g_last_error.clear();
  *out_accuracy = report->report.classification_accuracy;
  return TL_OK;
}

tl_status tl_report_to_json(const tl_report* report, char** out_json) {
  if (tl_status s = need(report, "report"); s != TL_OK) return s;
  if (tl_status s = need(out_json, "out_json"); s != TL_OK) return s;
  return guarded([&] { *out_json = dup_string(report_to_json(report->report)); });
}

tl_status tl_report_to_table(const tl_report* report, char** out_table) {
  if (tl_status s = need(report, "report"); s != TL_OK) return s;
  if (tl_status s = need(out_table, "out_table"); s != TL_OK) return s;
  return guarded(
      [&] { *out_table = dup_string(report_to_table(report->report)); });
}

} /* extern "C" */
