#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tubelink {

// Axis-aligned box, corner form, continuous pixel coordinates.
// Valid when x2 >= x1, y2 >= y1 and all coordinates are finite;
// zero-area boxes are allowed.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool operator==(const BBox&) const = default;
};

// One confidence per action class (background excluded). Not required to
// sum to 1; any finite values are accepted.
using ClassScores = std::vector<double>;

// A box plus its per-class scores for one frame of one stream.
struct RegionProposal {
  BBox box;
  ClassScores scores;

  bool operator==(const RegionProposal&) const = default;
};

// All proposals of one frame. Proposal order is stable and defines the
// index used everywhere downstream.
struct FrameProposals {
  int frame_index = 0;  // 1-based
  std::vector<RegionProposal> proposals;

  bool operator==(const FrameProposals&) const = default;
};

enum class Stream { appearance, motion };

const char* stream_name(Stream s);

// One detector stream of one video; frame indices contiguous 1..T, T >= 1.
struct StreamDetections {
  Stream stream = Stream::appearance;
  std::vector<FrameProposals> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }

  bool operator==(const StreamDetections&) const = default;
};

struct VideoDetections {
  std::string video_id;
  std::vector<std::string> class_names;
  StreamDetections appearance;
  std::optional<StreamDetections> motion;

  int frame_count() const { return appearance.frame_count(); }
  std::size_t class_count() const { return class_names.size(); }

  bool operator==(const VideoDetections&) const = default;
};

// One box index per frame (frames 1..T') plus the accumulated linking
// score. region_indices[k] == -1 marks a frame that was bridged by the
// carry_forward policy (no proposal existed; the previous box carries).
struct Tubelet {
  std::vector<int> region_indices;
  double cumulative_link_score = 0.0;
  // Copied from the linked proposals (post-fusion when fusion ran);
  // all-zero vectors on carried frames.
  std::vector<ClassScores> per_frame_scores;

  int seed_index() const {
    return region_indices.empty() ? -1 : region_indices.front();
  }
  std::size_t length() const { return region_indices.size(); }

  bool operator==(const Tubelet&) const = default;
};

// A tubelet resolved to concrete boxes with video-level class scores.
struct LabeledTube {
  std::string video_id;
  std::vector<BBox> boxes;  // one per frame, frames 1..T'
  ClassScores class_scores;
  int predicted_class = 0;  // argmax of class_scores, lowest index on ties
  double predicted_score = 0.0;
  double link_score = 0.0;  // tau of the underlying tubelet

  bool operator==(const LabeledTube&) const = default;
};

struct GroundTruthTube {
  std::string video_id;
  int class_label = 0;
  std::vector<std::pair<int, BBox>> boxes;  // (frame_index, box), increasing

  bool operator==(const GroundTruthTube&) const = default;
};

// Validation helpers. Each throws Error{validation} with a message on the
// first broken invariant; `context` is prefixed to the message.
void validate_box(const BBox& box, const std::string& context);
void validate_scores(const ClassScores& scores, std::size_t class_count,
                     const std::string& context);
void validate_stream(const StreamDetections& stream, std::size_t class_count,
                     const std::string& context);
void validate_video(const VideoDetections& video);
void validate_tube(const LabeledTube& tube, const std::string& context);
void validate_ground_truth(const GroundTruthTube& gt,
                           const std::string& context);

}  // namespace tubelink
