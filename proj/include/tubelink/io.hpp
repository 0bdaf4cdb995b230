#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tubelink/scoring.hpp"
#include "tubelink/types.hpp"

namespace tubelink {

// JSON Lines readers/writers for the three on-disk formats. Readers
// validate every invariant and throw Error{validation} with the offending
// line number; they never return partially constructed objects. Writers
// emit floats with full round-trip precision, so serialize -> parse is the
// identity.

// Detection lines:
//   {"video_id": str, "t": int, "stream": "appearance"|"motion",
//    "class_names": [...] (first line per video),
//    "proposals": [{"box": [x1,y1,x2,y2], "scores": [..]}, ..]}
// Lines may interleave videos and streams; output is sorted by video_id.
std::vector<VideoDetections> read_detections(std::istream& in);
std::vector<VideoDetections> read_detections_file(const std::string& path);
void write_detections(std::ostream& out,
                      const std::vector<VideoDetections>& videos);
void write_detections_file(const std::string& path,
                           const std::vector<VideoDetections>& videos);

// Tube lines:
//   {"video_id": str, "boxes": [[x1,y1,x2,y2], ..], "class_scores": [..],
//    "predicted_class": int, "predicted_score": f, "link_score": f}
std::vector<LabeledTube> read_tubes(std::istream& in);
std::vector<LabeledTube> read_tubes_file(const std::string& path);
void write_tubes(std::ostream& out, const std::vector<LabeledTube>& tubes);
void write_tubes_file(const std::string& path,
                      const std::vector<LabeledTube>& tubes);

// Ground-truth lines:
//   {"video_id": str, "label": int, "boxes": [[t,x1,y1,x2,y2], ..]}
std::vector<GroundTruthTube> read_ground_truth(std::istream& in);
std::vector<GroundTruthTube> read_ground_truth_file(const std::string& path);
void write_ground_truth(std::ostream& out,
                        const std::vector<GroundTruthTube>& gts);
void write_ground_truth_file(const std::string& path,
                             const std::vector<GroundTruthTube>& gts);

// TUN score lines, aligned to a tube file:
//   {"video_id": str, "tube_index": int, "stream": str,
//    "frame_scores": [[..], ..]}
// Stream names "rgb"/"flow" are accepted as synonyms of
// "appearance"/"motion".
TunCollection read_tun(std::istream& in);
TunCollection read_tun_file(const std::string& path);

}  // namespace tubelink
