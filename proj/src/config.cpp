#include "tubelink/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tubelink/errors.hpp"

namespace tubelink {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const char* policy_name(EmptyFramePolicy p) {
  return p == EmptyFramePolicy::error ? "error" : "carry_forward";
}

EmptyFramePolicy parse_policy(const std::string& name) {
  if (name == "error") return EmptyFramePolicy::error;
  if (name == "carry_forward") return EmptyFramePolicy::carry_forward;
  throw_validation("unknown empty_frame_policy '" + name + "'");
}

// Applies `src` onto `dst` field by field so partial configs keep defaults.
// Unknown keys are rejected to catch typos early.
template <typename Fn>
void walk(const json& src, const char* section, Fn&& fn) {
  if (!src.is_object()) {
    throw_validation(std::string("config section '") + section +
                     "' must be an object");
  }
  for (const auto& [key, value] : src.items()) {
    if (!fn(key, value)) {
      throw_validation(std::string("unknown config key '") + section + "." +
                       key + "'");
    }
  }
}

template <typename T>
T number(const json& v, const std::string& key) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) {
      throw_validation("config key '" + key + "' must be a boolean");
    }
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) {
      throw_validation("config key '" + key + "' must be an integer");
    }
  } else {
    if (!v.is_number()) {
      throw_validation("config key '" + key + "' must be a number");
    }
  }
  return v.get<T>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) {
    throw_validation("config key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

void apply_link(const json& j, LinkConfig& cfg) {
  walk(j, "link", [&](const std::string& k, const json& v) {
    if (k == "top_k") cfg.top_k = number<int>(v, k);
    else if (k == "nms_threshold") cfg.nms_threshold = number<double>(v, k);
    else if (k == "empty_frame_policy") cfg.empty_frame_policy = parse_policy(text(v, k));
    else return false;
    return true;
  });
}

void apply_eval(const json& j, EvalConfig& cfg) {
  walk(j, "eval", [&](const std::string& k, const json& v) {
    if (k == "iou_thresholds") {
      if (!v.is_array()) {
        throw_validation("config key 'iou_thresholds' must be an array");
      }
      cfg.iou_thresholds.clear();
      for (const json& e : v) cfg.iou_thresholds.push_back(number<double>(e, k));
    } else {
      return false;
    }
    return true;
  });
}

void apply_synth(const json& j, SynthConfig& cfg) {
  walk(j, "synth", [&](const std::string& k, const json& v) {
    if (k == "num_videos") cfg.num_videos = number<int>(v, k);
    else if (k == "frames_per_video") cfg.frames_per_video = number<int>(v, k);
    else if (k == "proposals_per_frame") cfg.proposals_per_frame = number<int>(v, k);
    else if (k == "num_classes") cfg.num_classes = number<int>(v, k);
    else if (k == "distractors") cfg.distractors = number<int>(v, k);
    else if (k == "box_jitter") cfg.box_jitter = number<double>(v, k);
    else if (k == "score_noise") cfg.score_noise = number<double>(v, k);
    else if (k == "stream_bias") cfg.stream_bias = number<double>(v, k);
    else if (k == "with_motion") cfg.with_motion = number<bool>(v, k);
    else if (k == "box_width") cfg.box_width = number<double>(v, k);
    else if (k == "box_height") cfg.box_height = number<double>(v, k);
    else if (k == "canvas_width") cfg.canvas_width = number<double>(v, k);
    else if (k == "canvas_height") cfg.canvas_height = number<double>(v, k);
    else if (k == "seed") cfg.seed = number<std::uint64_t>(v, k);
    else return false;
    return true;
  });
}

}  // namespace

const char* stream_mode_name(StreamMode mode) {
  switch (mode) {
    case StreamMode::rgb_only: return "rgb_only";
    case StreamMode::flow_only: return "flow_only";
    case StreamMode::fused: return "fused";
  }
  return "rgb_only";
}

StreamMode parse_stream_mode(const std::string& name) {
  if (name == "rgb_only" || name == "rgb") return StreamMode::rgb_only;
  if (name == "flow_only" || name == "flow") return StreamMode::flow_only;
  if (name == "fused") return StreamMode::fused;
  throw_validation("unknown stream mode '" + name + "'");
}

void validate_config(const PipelineConfig& cfg) {
  validate_link_config(cfg.link);
  if (!(cfg.fusion.lambda2 >= 0.0 && cfg.fusion.lambda2 <= 1.0)) {
    throw_validation("lambda2 must lie in [0, 1]");
  }
  if (!(cfg.scoring.lambda1 >= 0.0 && cfg.scoring.lambda1 <= 1.0)) {
    throw_validation("lambda1 must lie in [0, 1]");
  }
  if (cfg.eval.iou_thresholds.empty()) {
    throw_validation("iou_thresholds must not be empty");
  }
  double prev = 0.0;
  for (double d : cfg.eval.iou_thresholds) {
    if (!(d > 0.0 && d <= 1.0)) {
      throw_validation("iou_thresholds entries must lie in (0, 1]");
    }
    if (d <= prev) {
      throw_validation("iou_thresholds must be strictly increasing");
    }
    prev = d;
  }
  validate_synth_config(cfg.synth);
  if (cfg.workers < 1) throw_validation("workers must be >= 1");
}

std::string config_to_json(const PipelineConfig& cfg) {
  ojson j;
  j["link"] = {{"top_k", cfg.link.top_k},
               {"nms_threshold", cfg.link.nms_threshold},
               {"empty_frame_policy", policy_name(cfg.link.empty_frame_policy)}};
  j["fusion"] = {{"lambda2", cfg.fusion.lambda2}};
  j["scoring"] = {{"lambda1", cfg.scoring.lambda1}};
  j["eval"] = {{"iou_thresholds", cfg.eval.iou_thresholds}};
  j["synth"] = {{"num_videos", cfg.synth.num_videos},
                {"frames_per_video", cfg.synth.frames_per_video},
                {"proposals_per_frame", cfg.synth.proposals_per_frame},
                {"num_classes", cfg.synth.num_classes},
                {"distractors", cfg.synth.distractors},
                {"box_jitter", cfg.synth.box_jitter},
                {"score_noise", cfg.synth.score_noise},
                {"stream_bias", cfg.synth.stream_bias},
                {"with_motion", cfg.synth.with_motion},
                {"box_width", cfg.synth.box_width},
                {"box_height", cfg.synth.box_height},
                {"canvas_width", cfg.synth.canvas_width},
                {"canvas_height", cfg.synth.canvas_height},
                {"seed", cfg.synth.seed}};
  j["stream"] = stream_mode_name(cfg.stream);
  j["workers"] = cfg.workers;
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_validation(std::string("malformed config JSON: ") + e.what());
  }
  PipelineConfig cfg;
  walk(j, "config", [&](const std::string& k, const json& v) {
    if (k == "link") apply_link(v, cfg.link);
    else if (k == "fusion") {
      walk(v, "fusion", [&](const std::string& kk, const json& vv) {
        if (kk != "lambda2") return false;
        cfg.fusion.lambda2 = number<double>(vv, kk);
        return true;
      });
    } else if (k == "scoring") {
      walk(v, "scoring", [&](const std::string& kk, const json& vv) {
        if (kk != "lambda1") return false;
        cfg.scoring.lambda1 = number<double>(vv, kk);
        return true;
      });
    } else if (k == "eval") apply_eval(v, cfg.eval);
    else if (k == "synth") apply_synth(v, cfg.synth);
    else if (k == "stream") cfg.stream = parse_stream_mode(text(v, k));
    else if (k == "workers") cfg.workers = number<int>(v, k);
    else if (k == "seed") cfg.seed = number<std::uint64_t>(v, k);
    else return false;
    return true;
  });
  validate_config(cfg);
  return cfg;
}

PipelineConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace tubelink
