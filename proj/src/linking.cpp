#include "tubelink/linking.hpp"

#include <algorithm>
#include <sstream>

#include "tubelink/errors.hpp"

namespace tubelink {

void validate_link_config(const LinkConfig& cfg) {
  if (cfg.top_k < 1) throw_validation("link.top_k must be >= 1");
  if (!(cfg.nms_threshold > 0.0 && cfg.nms_threshold <= 1.0)) {
    throw_validation("link.nms_threshold must be in (0,1]");
  }
}

double objectness(const RegionProposal& p) {
  if (p.scores.empty()) throw_validation("objectness of empty score vector");
  return *std::max_element(p.scores.begin(), p.scores.end());
}

double linking_score(const RegionProposal& prev, const RegionProposal& next) {
  return objectness(next) + objectness(prev) + iou(next.box, prev.box);
}

namespace {

// Per-tubelet linking state. Tubelets never branch (each one extends by
// exactly one proposal per frame), so the frame-1 seed index is a stable
// identity for tie-breaking.
struct TrackState {
  Tubelet tubelet;
  BBox last_box;
  double last_objectness = 0.0;  // 0 after a carried frame
};

void sort_by_score(std::vector<TrackState>& tracks) {
  std::sort(tracks.begin(), tracks.end(),
            [](const TrackState& a, const TrackState& b) {
              if (a.tubelet.cumulative_link_score !=
                  b.tubelet.cumulative_link_score) {
                return a.tubelet.cumulative_link_score >
                       b.tubelet.cumulative_link_score;
              }
              return a.tubelet.seed_index() < b.tubelet.seed_index();
            });
}

std::vector<double> frame_objectness(const FrameProposals& frame) {
  std::vector<double> out;
  out.reserve(frame.proposals.size());
  for (const RegionProposal& p : frame.proposals) out.push_back(objectness(p));
  return out;
}

}  // namespace

std::vector<Tubelet> generate_tubelets(const StreamDetections& video,
                                       const LinkConfig& cfg) {
  validate_link_config(cfg);
  const int T = video.frame_count();
  if (T < 1) throw_validation("generate_tubelets: video has no frames");
  if (video.frames.front().proposals.empty()) {
    throw_validation("generate_tubelets: frame 1 has no proposals");
  }

  // Seed one tubelet per frame-1 proposal.
  std::vector<TrackState> tracks;
  const FrameProposals& first = video.frames.front();
  tracks.reserve(first.proposals.size());
  for (std::size_t i = 0; i < first.proposals.size(); ++i) {
    const RegionProposal& p = first.proposals[i];
    TrackState ts;
    ts.tubelet.region_indices = {static_cast<int>(i)};
    ts.tubelet.cumulative_link_score = 0.0;
    ts.tubelet.per_frame_scores = {p.scores};
    ts.last_box = p.box;
    ts.last_objectness = objectness(p);
    tracks.push_back(std::move(ts));
  }
  const std::size_t class_count = first.proposals.front().scores.size();

  for (int t = 2; t <= T; ++t) {
    const FrameProposals& frame = video.frames[t - 1];
    if (frame.proposals.empty()) {
      if (cfg.empty_frame_policy == EmptyFramePolicy::error) {
        std::ostringstream msg;
        msg << "generate_tubelets: frame " << t << " has no proposals";
        throw_validation(msg.str());
      }
      // carry_forward: the previous box persists as a pseudo-proposal with
      // objectness 0 and the linking increment is exactly 0.
      for (TrackState& ts : tracks) {
        ts.tubelet.region_indices.push_back(-1);
        ts.tubelet.per_frame_scores.emplace_back(class_count, 0.0);
        ts.last_objectness = 0.0;
      }
    } else {
      const std::vector<double> obj = frame_objectness(frame);
      for (TrackState& ts : tracks) {
        int best = 0;
        double best_score =
            obj[0] + ts.last_objectness + iou(frame.proposals[0].box, ts.last_box);
        for (std::size_t j = 1; j < frame.proposals.size(); ++j) {
          const double score = obj[j] + ts.last_objectness +
                               iou(frame.proposals[j].box, ts.last_box);
          if (score > best_score) {  // ties keep the lowest index
            best_score = score;
            best = static_cast<int>(j);
          }
        }
        ts.tubelet.region_indices.push_back(best);
        ts.tubelet.cumulative_link_score += best_score;
        ts.tubelet.per_frame_scores.push_back(frame.proposals[best].scores);
        ts.last_box = frame.proposals[best].box;
        ts.last_objectness = obj[best];
      }
    }
    // Top-K cut after every extension step from t=2 on.
    sort_by_score(tracks);
    if (tracks.size() > static_cast<std::size_t>(cfg.top_k)) {
      tracks.resize(static_cast<std::size_t>(cfg.top_k));
    }
  }

  sort_by_score(tracks);
  std::vector<Tubelet> tubelets;
  tubelets.reserve(tracks.size());
  for (TrackState& ts : tracks) tubelets.push_back(std::move(ts.tubelet));
  return tube_nms(tubelets, cfg.nms_threshold, video);
}

double tubelet_score(const Tubelet& tubelet, const StreamDetections& video) {
  if (tubelet.region_indices.empty()) {
    throw_validation("tubelet_score: empty tubelet");
  }
  if (tubelet.length() > static_cast<std::size_t>(video.frame_count())) {
    throw_validation("tubelet_score: tubelet longer than video");
  }
  const int first = tubelet.region_indices.front();
  const FrameProposals& f1 = video.frames.front();
  if (first < 0 || first >= static_cast<int>(f1.proposals.size())) {
    throw_validation("tubelet_score: invalid region index at frame 1");
  }
  BBox prev_box = f1.proposals[first].box;
  double prev_obj = objectness(f1.proposals[first]);
  double tau = 0.0;
  for (std::size_t k = 1; k < tubelet.region_indices.size(); ++k) {
    const int idx = tubelet.region_indices[k];
    const FrameProposals& frame = video.frames[k];
    if (idx == -1) {
      // Carried frame: increment 0, box persists, objectness drops to 0.
      prev_obj = 0.0;
      continue;
    }
    if (idx < 0 || idx >= static_cast<int>(frame.proposals.size())) {
      std::ostringstream msg;
      msg << "tubelet_score: invalid region index " << idx << " at frame "
          << k + 1;
      throw_validation(msg.str());
    }
    const RegionProposal& p = frame.proposals[idx];
    const double obj = objectness(p);
    tau += obj + prev_obj + iou(p.box, prev_box);
    prev_box = p.box;
    prev_obj = obj;
  }
  return tau;
}

std::vector<BBox> materialize_boxes(const Tubelet& tubelet,
                                    const StreamDetections& video) {
  if (tubelet.region_indices.empty()) {
    throw_validation("materialize_boxes: empty tubelet");
  }
  std::vector<BBox> boxes;
  boxes.reserve(tubelet.length());
  for (std::size_t k = 0; k < tubelet.region_indices.size(); ++k) {
    const int idx = tubelet.region_indices[k];
    if (idx == -1) {
      boxes.push_back(boxes.back());  // frame 1 is never carried
      continue;
    }
    const FrameProposals& frame = video.frames.at(k);
    if (idx < 0 || idx >= static_cast<int>(frame.proposals.size())) {
      throw_validation("materialize_boxes: invalid region index");
    }
    boxes.push_back(frame.proposals[idx].box);
  }
  return boxes;
}

std::vector<Tubelet> tube_nms(const std::vector<Tubelet>& tubes,
                              double threshold,
                              const StreamDetections& video) {
  std::vector<std::vector<TimedBox>> timed(tubes.size());
  for (std::size_t m = 0; m < tubes.size(); ++m) {
    const std::vector<BBox> boxes = materialize_boxes(tubes[m], video);
    timed[m].reserve(boxes.size());
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      timed[m].emplace_back(static_cast<int>(k) + 1, boxes[k]);
    }
  }

  std::vector<Tubelet> kept;
  std::vector<std::size_t> kept_idx;
  for (std::size_t m = 0; m < tubes.size(); ++m) {
    bool suppressed = false;
    for (std::size_t a : kept_idx) {
      if (tube_iou(timed[m], timed[a]) > threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(tubes[m]);
      kept_idx.push_back(m);
    }
  }
  return kept;
}

}  // namespace tubelink
