#include "tubelink/types.hpp"

#include <cmath>
#include <sstream>

#include "tubelink/errors.hpp"

namespace tubelink {

const char* stream_name(Stream s) {
  return s == Stream::appearance ? "appearance" : "motion";
}

namespace {

bool finite(double v) { return std::isfinite(v); }

[[noreturn]] void fail(const std::string& context, const std::string& what) {
  throw_validation(context.empty() ? what : context + ": " + what);
}

}  // namespace

void validate_box(const BBox& box, const std::string& context) {
  if (!finite(box.x1) || !finite(box.y1) || !finite(box.x2) ||
      !finite(box.y2)) {
    fail(context, "box has non-finite coordinates");
  }
  if (box.x2 < box.x1 || box.y2 < box.y1) {
    std::ostringstream msg;
    msg << "box has negative extent [" << box.x1 << "," << box.y1 << ","
        << box.x2 << "," << box.y2 << "]";
    fail(context, msg.str());
  }
}

void validate_scores(const ClassScores& scores, std::size_t class_count,
                     const std::string& context) {
  if (scores.size() != class_count) {
    std::ostringstream msg;
    msg << "inconsistent class count: got " << scores.size() << " scores, "
        << "expected " << class_count;
    fail(context, msg.str());
  }
  for (double s : scores) {
    if (!finite(s)) fail(context, "non-finite class score");
  }
}

void validate_stream(const StreamDetections& stream, std::size_t class_count,
                     const std::string& context) {
  if (stream.frames.empty()) fail(context, "stream has no frames");
  for (std::size_t k = 0; k < stream.frames.size(); ++k) {
    const FrameProposals& frame = stream.frames[k];
    if (frame.frame_index != static_cast<int>(k) + 1) {
      std::ostringstream msg;
      msg << "non-contiguous frames: expected t=" << k + 1 << ", got t="
          << frame.frame_index;
      fail(context, msg.str());
    }
    for (std::size_t i = 0; i < frame.proposals.size(); ++i) {
      std::ostringstream at;
      at << context << " t=" << frame.frame_index << " proposal " << i;
      validate_box(frame.proposals[i].box, at.str());
      validate_scores(frame.proposals[i].scores, class_count, at.str());
    }
  }
}

void validate_video(const VideoDetections& video) {
  const std::string context = "video '" + video.video_id + "'";
  if (video.video_id.empty()) throw_validation("empty video_id");
  if (video.class_names.empty()) fail(context, "empty class list");
  validate_stream(video.appearance, video.class_count(),
                  context + " appearance");
  if (video.motion) {
    validate_stream(*video.motion, video.class_count(), context + " motion");
    if (video.motion->frame_count() != video.appearance.frame_count()) {
      std::ostringstream msg;
      msg << "motion/appearance length mismatch: " << video.motion->frame_count()
          << " vs " << video.appearance.frame_count();
      fail(context, msg.str());
    }
  }
}

void validate_tube(const LabeledTube& tube, const std::string& context) {
  if (tube.video_id.empty()) fail(context, "empty video_id");
  if (tube.boxes.empty()) fail(context, "tube has no boxes");
  if (tube.class_scores.empty()) fail(context, "tube has no class scores");
  for (std::size_t k = 0; k < tube.boxes.size(); ++k) {
    std::ostringstream at;
    at << context << " frame " << k + 1;
    validate_box(tube.boxes[k], at.str());
  }
  validate_scores(tube.class_scores, tube.class_scores.size(), context);
  if (!finite(tube.predicted_score) || !finite(tube.link_score)) {
    fail(context, "non-finite tube score");
  }
  // predicted_class must be the lowest argmax of class_scores.
  int argmax = 0;
  for (std::size_t c = 1; c < tube.class_scores.size(); ++c) {
    if (tube.class_scores[c] > tube.class_scores[argmax]) {
      argmax = static_cast<int>(c);
    }
  }
  if (tube.predicted_class != argmax ||
      tube.predicted_score != tube.class_scores[argmax]) {
    fail(context, "predicted class/score does not match argmax of scores");
  }
}

void validate_ground_truth(const GroundTruthTube& gt,
                           const std::string& context) {
  if (gt.video_id.empty()) fail(context, "empty video_id");
  if (gt.class_label < 0) fail(context, "negative class label");
  if (gt.boxes.empty()) fail(context, "ground-truth tube has no boxes");
  int prev_t = 0;
  for (const auto& [t, box] : gt.boxes) {
    if (t < 1) fail(context, "frame index below 1");
    if (t <= prev_t) fail(context, "frame indices not strictly increasing");
    prev_t = t;
    std::ostringstream at;
    at << context << " t=" << t;
    validate_box(box, at.str());
  }
}

}  // namespace tubelink
