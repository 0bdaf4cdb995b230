#pragma once

#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/types.hpp"

namespace tubelink {

enum class EmptyFramePolicy { error, carry_forward };

struct LinkConfig {
  int top_k = 10;
  double nms_threshold = 0.3;
  EmptyFramePolicy empty_frame_policy = EmptyFramePolicy::error;
};

void validate_link_config(const LinkConfig& cfg);

// Class-agnostic confidence of a proposal: max over its class scores.
double objectness(const RegionProposal& p);

// Affinity between proposals in consecutive frames:
// objectness(next) + objectness(prev) + iou of their boxes.
double linking_score(const RegionProposal& prev, const RegionProposal& next);

// Greedy trellis linking. Every frame-1 proposal seeds a tubelet; at each
// later frame every surviving tubelet is extended by the single proposal
// maximizing linking_score against its previous region (ties to the lowest
// proposal index), then the top-K tubelets by cumulative score are kept.
// After the last frame, video-level NMS is applied. Output is sorted by
// cumulative score descending.
std::vector<Tubelet> generate_tubelets(const StreamDetections& video,
                                       const LinkConfig& cfg);

// Recomputes the cumulative linking score of a tubelet from scratch.
// Matches the stored value to within 1e-9.
double tubelet_score(const Tubelet& tubelet, const StreamDetections& video);

// Greedy suppression over whole tubes: accept the best remaining tube,
// drop any later tube whose tube_iou with an accepted one exceeds the
// threshold. Input must be sorted by cumulative score descending.
std::vector<Tubelet> tube_nms(const std::vector<Tubelet>& tubes,
                              double threshold,
                              const StreamDetections& video);

// Boxes of a tubelet in frame order; carried frames repeat the previous box.
std::vector<BBox> materialize_boxes(const Tubelet& tubelet,
                                    const StreamDetections& video);

}  // namespace tubelink
