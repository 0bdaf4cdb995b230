#include "tubelink/fusion.hpp"

#include <sstream>

#include "tubelink/errors.hpp"
#include "tubelink/geometry.hpp"

namespace tubelink {

void validate_fusion_config(const FusionConfig& cfg) {
  if (!(cfg.lambda2 >= 0.0 && cfg.lambda2 <= 1.0)) {
    throw_validation("fusion.lambda2 must be in [0,1]");
  }
}

int correspond(const RegionProposal& rgb, const FrameProposals& flow_frame) {
  if (flow_frame.proposals.empty()) {
    throw_validation("correspond: empty flow frame");
  }
  int best = 0;
  double best_iou = iou(rgb.box, flow_frame.proposals[0].box);
  for (std::size_t k = 1; k < flow_frame.proposals.size(); ++k) {
    const double v = iou(rgb.box, flow_frame.proposals[k].box);
    if (v > best_iou) {  // ties keep the lowest index
      best_iou = v;
      best = static_cast<int>(k);
    }
  }
  return best;
}

ClassScores fuse_frame_scores(const ClassScores& rgb_scores,
                              const ClassScores& flow_scores,
                              const FusionConfig& cfg) {
  validate_fusion_config(cfg);
  if (rgb_scores.size() != flow_scores.size()) {
    std::ostringstream msg;
    msg << "fuse_frame_scores: length mismatch (" << rgb_scores.size()
        << " vs " << flow_scores.size() << ")";
    throw_validation(msg.str());
  }
  ClassScores fused(rgb_scores.size());
  for (std::size_t c = 0; c < rgb_scores.size(); ++c) {
    fused[c] = cfg.lambda2 * rgb_scores[c] +
               (1.0 - cfg.lambda2) * flow_scores[c];
  }
  return fused;
}

FusionResult fuse_video(const VideoDetections& video,
                        const FusionConfig& cfg) {
  validate_fusion_config(cfg);
  if (!video.motion) {
    throw_validation("fuse_video: video '" + video.video_id +
                     "' has no motion stream");
  }
  const StreamDetections& rgb = video.appearance;
  const StreamDetections& flow = *video.motion;
  if (flow.frame_count() != rgb.frame_count()) {
    throw_validation("fuse_video: motion/appearance length mismatch");
  }

  FusionResult result;
  result.stream.stream = Stream::appearance;
  result.stream.frames.reserve(rgb.frames.size());
  result.flow_index.resize(rgb.frames.size());

  for (std::size_t t = 0; t < rgb.frames.size(); ++t) {
    const FrameProposals& rgb_frame = rgb.frames[t];
    const FrameProposals& flow_frame = flow.frames[t];
    FrameProposals fused_frame;
    fused_frame.frame_index = rgb_frame.frame_index;
    fused_frame.proposals.reserve(rgb_frame.proposals.size());
    result.flow_index[t].reserve(rgb_frame.proposals.size());
    for (const RegionProposal& p : rgb_frame.proposals) {
      if (flow_frame.proposals.empty()) {
        std::ostringstream msg;
        msg << "fuse_video: motion frame " << flow_frame.frame_index
            << " of video '" << video.video_id << "' is empty";
        throw_validation(msg.str());
      }
      const int j = correspond(p, flow_frame);
      result.flow_index[t].push_back(j);
      RegionProposal fused;
      fused.box = p.box;  // geometry always comes from the rgb stream
      fused.scores =
          fuse_frame_scores(p.scores, flow_frame.proposals[j].scores, cfg);
      fused_frame.proposals.push_back(std::move(fused));
    }
    result.stream.frames.push_back(std::move(fused_frame));
  }
  return result;
}

std::vector<int> flow_twin_indices(const Tubelet& tubelet,
                                   const FusionResult& fusion) {
  std::vector<int> twin;
  twin.reserve(tubelet.length());
  for (std::size_t k = 0; k < tubelet.region_indices.size(); ++k) {
    const int idx = tubelet.region_indices[k];
    if (idx == -1) {
      twin.push_back(-1);
      continue;
    }
    if (k >= fusion.flow_index.size() ||
        idx >= static_cast<int>(fusion.flow_index[k].size())) {
      throw_validation("flow_twin_indices: tubelet does not fit fusion map");
    }
    twin.push_back(fusion.flow_index[k][idx]);
  }
  return twin;
}

}  // namespace tubelink
