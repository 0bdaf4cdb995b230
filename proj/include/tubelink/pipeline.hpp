#pragma once

#include <string>
#include <vector>

#include "tubelink/config.hpp"
#include "tubelink/evaluation.hpp"
#include "tubelink/io.hpp"
#include "tubelink/oracle.hpp"

namespace tubelink {

// Orchestration behind the CLI/C API: stream selection, fusion, linking,
// TPN-only scoring, TUN rescoring, evaluation. Videos are processed in
// parallel (cfg.workers) with output in video_id order regardless of
// scheduling.

// The stream a video is linked on under the configured mode: appearance
// as-is, motion as-is, or appearance geometry with fused scores.
StreamDetections resolve_stream(const VideoDetections& video,
                                const PipelineConfig& cfg);

// Linking + TPN-only labeling for a whole corpus; tubes grouped by video
// in video_id order, link-score descending within a video.
std::vector<LabeledTube> link_videos(const std::vector<VideoDetections>& videos,
                                     const PipelineConfig& cfg);

// Folds external TUN scores into tube class scores. Tubes without a TUN
// entry pass through unchanged; input tubes are expected to carry the
// TPN-only scores written by link_videos.
std::vector<LabeledTube> rescore_tubes(const std::vector<LabeledTube>& tubes,
                                       const TunCollection& tun,
                                       const PipelineConfig& cfg);

EvalReport evaluate_tubes(const std::vector<LabeledTube>& tubes,
                          const std::vector<GroundTruthTube>& gts,
                          const PipelineConfig& cfg);

struct VideoOraclePath {
  std::string video_id;
  std::vector<int> path;
  double score = 0.0;
};

// Exact best path per video on the mode-resolved stream.
std::vector<VideoOraclePath> oracle_paths(
    const std::vector<VideoDetections>& videos, const PipelineConfig& cfg);

std::string oracle_paths_to_jsonl(const std::vector<VideoOraclePath>& paths);

}  // namespace tubelink
