#include "tubelink/scoring.hpp"

#include <sstream>

#include "tubelink/errors.hpp"
#include "tubelink/linking.hpp"

namespace tubelink {

void validate_score_config(const ScoreConfig& cfg) {
  if (!(cfg.lambda1 >= 0.0 && cfg.lambda1 <= 1.0)) {
    throw_validation("scoring.lambda1 must be in [0,1]");
  }
}

namespace {

ClassScores per_frame_mean(const std::vector<ClassScores>& frames,
                           const std::string& context) {
  if (frames.empty()) throw_validation(context + ": no per-frame scores");
  const std::size_t classes = frames.front().size();
  ClassScores mean(classes, 0.0);
  for (const ClassScores& s : frames) {
    if (s.size() != classes) {
      throw_validation(context + ": inconsistent class count across frames");
    }
    for (std::size_t c = 0; c < classes; ++c) mean[c] += s[c];
  }
  const double inv_t = 1.0 / static_cast<double>(frames.size());
  for (double& v : mean) v *= inv_t;
  return mean;
}

}  // namespace

ClassScores tube_class_scores(const Tubelet& tubelet,
                              const std::optional<TunScores>& tun,
                              const ScoreConfig& cfg) {
  validate_score_config(cfg);
  const ClassScores tpn = per_frame_mean(tubelet.per_frame_scores, "tubelet");
  if (!tun) return tpn;  // pure-TPN path, lambda1 treated as 1

  if (tun->frame_scores.size() != tubelet.per_frame_scores.size()) {
    std::ostringstream msg;
    msg << "tun scores cover " << tun->frame_scores.size()
        << " frames, tubelet has " << tubelet.per_frame_scores.size();
    throw_validation(msg.str());
  }
  const ClassScores tun_mean = per_frame_mean(tun->frame_scores, "tun");
  if (tun_mean.size() != tpn.size()) {
    throw_validation("tun class count does not match tubelet");
  }
  ClassScores out(tpn.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = cfg.lambda1 * tpn[c] + (1.0 - cfg.lambda1) * tun_mean[c];
  }
  return out;
}

ClassScores combine_tube_scores(const ClassScores& tpn_mean,
                                const TunScores& tun,
                                const ScoreConfig& cfg) {
  validate_score_config(cfg);
  const ClassScores tun_mean = per_frame_mean(tun.frame_scores, "tun");
  if (tun_mean.size() != tpn_mean.size()) {
    throw_validation("tun class count does not match tube");
  }
  ClassScores out(tpn_mean.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = cfg.lambda1 * tpn_mean[c] + (1.0 - cfg.lambda1) * tun_mean[c];
  }
  return out;
}

std::optional<TunScores> resolve_tun(const TunEntry& entry,
                                     const FusionConfig& fusion,
                                     std::size_t expected_frames,
                                     std::size_t expected_classes,
                                     const std::string& context) {
  const auto check = [&](const TunScores& tun) {
    if (tun.frame_scores.size() != expected_frames) {
      std::ostringstream msg;
      msg << context << ": tun covers " << tun.frame_scores.size()
          << " frames, tube has " << expected_frames;
      throw_validation(msg.str());
    }
    for (const ClassScores& s : tun.frame_scores) {
      if (s.size() != expected_classes) {
        throw_validation(context + ": tun class count mismatch");
      }
    }
  };

  if (entry.appearance && entry.motion) {
    check(*entry.appearance);
    check(*entry.motion);
    TunScores fused;
    fused.frame_scores.reserve(expected_frames);
    for (std::size_t k = 0; k < expected_frames; ++k) {
      fused.frame_scores.push_back(fuse_frame_scores(
          entry.appearance->frame_scores[k], entry.motion->frame_scores[k],
          fusion));
    }
    return fused;
  }
  if (entry.appearance) {
    check(*entry.appearance);
    return *entry.appearance;
  }
  if (entry.motion) {
    check(*entry.motion);
    return *entry.motion;
  }
  return std::nullopt;
}

LabeledTube label_tube(const Tubelet& tubelet, const ClassScores& scores,
                       const StreamDetections& video,
                       const std::string& video_id) {
  if (scores.empty()) throw_validation("label_tube: empty score vector");
  LabeledTube tube;
  tube.video_id = video_id;
  tube.boxes = materialize_boxes(tubelet, video);
  tube.class_scores = scores;
  int argmax = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[argmax]) argmax = static_cast<int>(c);
  }
  tube.predicted_class = argmax;
  tube.predicted_score = scores[argmax];
  tube.link_score = tubelet.cumulative_link_score;
  return tube;
}

std::pair<int, double> classify_video(const std::vector<LabeledTube>& tubes) {
  if (tubes.empty()) throw_validation("classify_video: no tubes");
  const LabeledTube* best = &tubes.front();
  for (const LabeledTube& t : tubes) {
    if (t.predicted_score > best->predicted_score) best = &t;
  }
  return {best->predicted_class, best->predicted_score};
}

}  // namespace tubelink
