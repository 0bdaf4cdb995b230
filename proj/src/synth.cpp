#include "tubelink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tubelink/errors.hpp"

namespace tubelink {

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.num_videos < 1 || cfg.frames_per_video < 1 ||
      cfg.proposals_per_frame < 1 || cfg.num_classes < 1) {
    throw_validation("synth counts must be >= 1");
  }
  if (cfg.distractors < 0) throw_validation("synth.distractors must be >= 0");
  if (cfg.box_jitter < 0.0 || cfg.score_noise < 0.0 || cfg.stream_bias < 0.0) {
    throw_validation("synth noise levels must be >= 0");
  }
  if (cfg.box_width <= 0.0 || cfg.box_height <= 0.0 ||
      cfg.canvas_width < cfg.box_width || cfg.canvas_height < cfg.box_height) {
    throw_validation("synth box must be positive and fit the canvas");
  }
}

namespace {

constexpr double kTrueScore = 0.9;
constexpr double kOtherScore = 0.1;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// normal_distribution requires sigma > 0; zero noise draws nothing.
double gauss(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct Trajectory {
  std::vector<BBox> boxes;  // one per frame
};

Trajectory make_trajectory(Rng& rng, const SynthConfig& cfg) {
  const double hw = cfg.box_width / 2.0;
  const double hh = cfg.box_height / 2.0;
  double cx = uniform(rng, hw, cfg.canvas_width - hw);
  double cy = uniform(rng, hh, cfg.canvas_height - hh);
  const double angle = uniform(rng, 0.0, 2.0 * 3.14159265358979323846);
  const double speed = uniform(rng, 1.0, 4.0);
  double vx = speed * std::cos(angle);
  double vy = speed * std::sin(angle);

  Trajectory traj;
  traj.boxes.reserve(static_cast<std::size_t>(cfg.frames_per_video));
  for (int t = 0; t < cfg.frames_per_video; ++t) {
    traj.boxes.push_back({cx - hw, cy - hh, cx + hw, cy + hh});
    cx += vx;
    cy += vy;
    if (cx < hw || cx > cfg.canvas_width - hw) {
      vx = -vx;
      cx = std::clamp(cx, hw, cfg.canvas_width - hw);
    }
    if (cy < hh || cy > cfg.canvas_height - hh) {
      vy = -vy;
      cy = std::clamp(cy, hh, cfg.canvas_height - hh);
    }
  }
  return traj;
}

BBox jitter_box(Rng& rng, const BBox& box, double sigma) {
  BBox out{box.x1 + gauss(rng, sigma), box.y1 + gauss(rng, sigma),
           box.x2 + gauss(rng, sigma), box.y2 + gauss(rng, sigma)};
  out.x2 = std::max(out.x2, out.x1);
  out.y2 = std::max(out.y2, out.y1);
  return out;
}

// Per-(video,stream) confuser: one wrong class gets a constant bias over
// the whole stream, which is what makes single streams unreliable while
// fusion stays robust.
struct Confuser {
  int class_index = -1;
  double bias = 0.0;
};

Confuser draw_confuser(Rng& rng, const SynthConfig& cfg, int true_class) {
  Confuser c;
  if (cfg.stream_bias <= 0.0 || cfg.num_classes < 2) return c;
  c.class_index =
      static_cast<int>(uniform(rng, 0.0, 1.0) * (cfg.num_classes - 1));
  c.class_index = std::min(c.class_index, cfg.num_classes - 2);
  if (c.class_index >= true_class) ++c.class_index;
  c.bias = uniform(rng, 0.0, cfg.stream_bias);
  return c;
}

ClassScores target_scores(Rng& rng, const SynthConfig& cfg, int true_class,
                          const Confuser& confuser) {
  ClassScores s(static_cast<std::size_t>(cfg.num_classes), kOtherScore);
  s[static_cast<std::size_t>(true_class)] = kTrueScore;
  if (confuser.class_index >= 0) {
    s[static_cast<std::size_t>(confuser.class_index)] += confuser.bias;
  }
  for (double& v : s) v = clamp01(v + gauss(rng, cfg.score_noise));
  return s;
}

ClassScores distractor_scores(Rng& rng, const SynthConfig& cfg) {
  ClassScores s(static_cast<std::size_t>(cfg.num_classes));
  for (double& v : s) v = uniform(rng, 0.05, 0.25);
  return s;
}

BBox distractor_box(Rng& rng, const SynthConfig& cfg) {
  const double w = cfg.box_width * uniform(rng, 0.4, 1.6);
  const double h = cfg.box_height * uniform(rng, 0.4, 1.6);
  const double x = uniform(rng, 0.0, std::max(cfg.canvas_width - w, 1.0));
  const double y = uniform(rng, 0.0, std::max(cfg.canvas_height - h, 1.0));
  return {x, y, x + w, y + h};
}

StreamDetections make_stream(Rng& rng, const SynthConfig& cfg, Stream which,
                             const Trajectory& traj, int true_class,
                             const Confuser& confuser) {
  StreamDetections stream;
  stream.stream = which;
  stream.frames.reserve(traj.boxes.size());
  for (std::size_t t = 0; t < traj.boxes.size(); ++t) {
    FrameProposals frame;
    frame.frame_index = static_cast<int>(t) + 1;
    for (int i = 0; i < cfg.proposals_per_frame; ++i) {
      RegionProposal p;
      p.box = jitter_box(rng, traj.boxes[t], cfg.box_jitter);
      p.scores = target_scores(rng, cfg, true_class, confuser);
      frame.proposals.push_back(std::move(p));
    }
    for (int i = 0; i < cfg.distractors; ++i) {
      RegionProposal p;
      p.box = distractor_box(rng, cfg);
      p.scores = distractor_scores(rng, cfg);
      frame.proposals.push_back(std::move(p));
    }
    stream.frames.push_back(std::move(frame));
  }
  return stream;
}

}  // namespace

SynthCorpus synth_corpus(const SynthConfig& cfg) {
  validate_synth_config(cfg);

  std::vector<std::string> class_names;
  class_names.reserve(static_cast<std::size_t>(cfg.num_classes));
  for (int c = 0; c < cfg.num_classes; ++c) {
    class_names.push_back("class_" + std::to_string(c));
  }

  SynthCorpus corpus;
  for (int v = 0; v < cfg.num_videos; ++v) {
    Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(v) + 1)));

    std::ostringstream id;
    id << "synth_";
    id.width(4);
    id.fill('0');
    id << v;

    const int true_class = static_cast<int>(
        std::min<double>(uniform(rng, 0.0, 1.0) * cfg.num_classes,
                         cfg.num_classes - 1));
    const Trajectory traj = make_trajectory(rng, cfg);
    const Confuser rgb_confuser = draw_confuser(rng, cfg, true_class);
    const Confuser flow_confuser = draw_confuser(rng, cfg, true_class);

    VideoDetections video;
    video.video_id = id.str();
    video.class_names = class_names;
    video.appearance = make_stream(rng, cfg, Stream::appearance, traj,
                                   true_class, rgb_confuser);
    if (cfg.with_motion) {
      video.motion = make_stream(rng, cfg, Stream::motion, traj, true_class,
                                 flow_confuser);
    }
    corpus.detections.push_back(std::move(video));

    GroundTruthTube gt;
    gt.video_id = id.str();
    gt.class_label = true_class;
    for (std::size_t t = 0; t < traj.boxes.size(); ++t) {
      gt.boxes.emplace_back(static_cast<int>(t) + 1, traj.boxes[t]);
    }
    corpus.ground_truth.push_back(std::move(gt));
  }
  return corpus;
}

}  // namespace tubelink
