#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tubelink/types.hpp"

namespace tubelink {

// Synthetic detection-corpus generator: one ground-truth actor per video
// moving smoothly across the canvas, surrounded by jittered detector
// proposals and low-score distractors. Deterministic per seed.
struct SynthConfig {
  int num_videos = 10;
  int frames_per_video = 20;
  int proposals_per_frame = 1;  // gt-aligned proposals (distractors extra)
  int num_classes = 3;
  int distractors = 0;          // extra low-score proposals per frame
  double box_jitter = 0.0;      // stddev in pixels on each proposal corner
  double score_noise = 0.0;     // stddev on each class score
  double stream_bias = 0.0;     // per-(video,stream) confuser-class bias cap
  bool with_motion = false;     // also emit a correlated motion stream
  double box_width = 100.0;
  double box_height = 100.0;
  double canvas_width = 640.0;
  double canvas_height = 480.0;
  std::uint64_t seed = 0;
};

void validate_synth_config(const SynthConfig& cfg);

struct SynthCorpus {
  std::vector<VideoDetections> detections;
  std::vector<GroundTruthTube> ground_truth;
};

SynthCorpus synth_corpus(const SynthConfig& cfg);

}  // namespace tubelink
