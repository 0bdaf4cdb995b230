#pragma once

#include <vector>

#include "tubelink/types.hpp"

namespace tubelink {

struct FusionConfig {
  double lambda2 = 1.0 / 3.0;  // weight on the appearance stream
};

void validate_fusion_config(const FusionConfig& cfg);

// Index of the flow proposal with the highest box overlap against an rgb
// proposal; ties (including all-zero overlap) go to the lowest index.
int correspond(const RegionProposal& rgb, const FrameProposals& flow_frame);

// Per class: lambda2 * rgb + (1 - lambda2) * flow.
ClassScores fuse_frame_scores(const ClassScores& rgb_scores,
                              const ClassScores& flow_scores,
                              const FusionConfig& cfg);

struct FusionResult {
  // Appearance geometry with fused scores; linking runs on this stream.
  StreamDetections stream;
  // flow_index[t][i] = motion-stream proposal matched to appearance
  // proposal i at frame t (0-based t). Makes the flow twin of any tubelet
  // recoverable.
  std::vector<std::vector<int>> flow_index;
};

// Fuses the two streams of a video. Boxes are never altered; only score
// vectors change. Requires a motion stream with no empty frames wherever
// the appearance frame is nonempty.
FusionResult fuse_video(const VideoDetections& video, const FusionConfig& cfg);

// Motion-stream region indices of a tubelet linked on the fused stream.
// Carried frames stay -1.
std::vector<int> flow_twin_indices(const Tubelet& tubelet,
                                   const FusionResult& fusion);

}  // namespace tubelink
