#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tubelink/fusion.hpp"
#include "tubelink/types.hpp"

namespace tubelink {

struct ScoreConfig {
  double lambda1 = 2.0 / 3.0;  // weight on the TPN frame scores
};

void validate_score_config(const ScoreConfig& cfg);

// Externally computed per-frame class scores for one tubelet of one stream.
struct TunScores {
  std::vector<ClassScores> frame_scores;  // one vector per tubelet frame

  bool operator==(const TunScores&) const = default;
};

// TUN entries for one tube, keyed by stream. When both streams are present
// they are fused per frame with the lambda2 rule before entering the
// tube-score average.
struct TunEntry {
  std::optional<TunScores> appearance;
  std::optional<TunScores> motion;
};

// (video_id, tube_index) -> entry; tube_index counts tubes of that video
// in tube-file order.
using TunCollection = std::map<std::pair<std::string, std::size_t>, TunEntry>;

// Video-level class scores of a tubelet:
//   (lambda1/T) * sum_t s_t(c) + ((1-lambda1)/T) * sum_t tun_t(c).
// Without TUN scores this is the plain per-frame mean (lambda1 treated
// as 1). TUN length and class count must match the tubelet.
ClassScores tube_class_scores(const Tubelet& tubelet,
                              const std::optional<TunScores>& tun,
                              const ScoreConfig& cfg);

// Same combination applied to an already-aggregated TPN mean, as stored in
// a tube file written by the linker.
ClassScores combine_tube_scores(const ClassScores& tpn_mean,
                                const TunScores& tun, const ScoreConfig& cfg);

// Resolves the TUN entry of one tube: fuses the two streams when both are
// present, otherwise uses whichever exists.
std::optional<TunScores> resolve_tun(const TunEntry& entry,
                                     const FusionConfig& fusion,
                                     std::size_t expected_frames,
                                     std::size_t expected_classes,
                                     const std::string& context);

// Attaches class scores and the argmax label to a tubelet; boxes come from
// the linked proposals of `video`.
LabeledTube label_tube(const Tubelet& tubelet, const ClassScores& scores,
                       const StreamDetections& video,
                       const std::string& video_id);

// The (class, score) of the tube with the highest predicted score; ties go
// to the earlier tube. Input order is expected to be link-score order.
std::pair<int, double> classify_video(const std::vector<LabeledTube>& tubes);

}  // namespace tubelink
