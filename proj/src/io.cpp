#include "tubelink/io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tubelink/errors.hpp"

namespace tubelink {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw_validation("line " + std::to_string(line) + ": " + what);
}

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail_line(line, std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& j, const char* key, std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end()) fail_line(line, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& j, const char* key, std::size_t line) {
  const json& v = field(j, key, line);
  if (!v.is_string()) fail_line(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

long long get_int(const json& j, const char* key, std::size_t line) {
  const json& v = field(j, key, line);
  if (!v.is_number_integer()) {
    fail_line(line, std::string("field '") + key + "' must be an integer");
  }
  return v.get<long long>();
}

double as_double(const json& v, const char* what, std::size_t line) {
  if (!v.is_number()) fail_line(line, std::string(what) + " must be a number");
  return v.get<double>();
}

BBox parse_box(const json& v, std::size_t line) {
  if (!v.is_array() || v.size() != 4) {
    fail_line(line, "box must be an array of 4 numbers");
  }
  return {as_double(v[0], "box coordinate", line),
          as_double(v[1], "box coordinate", line),
          as_double(v[2], "box coordinate", line),
          as_double(v[3], "box coordinate", line)};
}

ClassScores parse_score_array(const json& v, std::size_t line) {
  if (!v.is_array()) fail_line(line, "scores must be an array of numbers");
  ClassScores out;
  out.reserve(v.size());
  for (const json& e : v) out.push_back(as_double(e, "score", line));
  return out;
}

ojson box_to_json(const BBox& b) { return ojson::array({b.x1, b.y1, b.x2, b.y2}); }

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;  // skip blank lines
    fn(text, line);
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  return out;
}

void check_write(std::ostream& out, const std::string& path) {
  if (!out) throw_io("write to '" + path + "' failed");
}

Stream parse_stream_field(const std::string& name, std::size_t line) {
  if (name == "appearance" || name == "rgb") return Stream::appearance;
  if (name == "motion" || name == "flow") return Stream::motion;
  fail_line(line, "unknown stream '" + name + "'");
}

}  // namespace

std::vector<VideoDetections> read_detections(std::istream& in) {
  struct VideoBuilder {
    std::vector<std::string> class_names;
    bool names_set = false;
    // stream -> frame_index -> proposals
    std::map<Stream, std::map<int, std::vector<RegionProposal>>> frames;
  };
  std::map<std::string, VideoBuilder> builders;

  for_each_line(in, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(text, line);
    const std::string video_id = get_string(j, "video_id", line);
    if (video_id.empty()) fail_line(line, "empty video_id");
    const long long t = get_int(j, "t", line);
    if (t < 1) fail_line(line, "t must be >= 1");
    const Stream stream = parse_stream_field(get_string(j, "stream", line), line);

    const bool is_new = builders.find(video_id) == builders.end();
    VideoBuilder& b = builders[video_id];

    if (const auto it = j.find("class_names"); it != j.end()) {
      if (!it->is_array()) fail_line(line, "class_names must be an array");
      std::vector<std::string> names;
      for (const json& n : *it) {
        if (!n.is_string()) fail_line(line, "class_names entries must be strings");
        names.push_back(n.get<std::string>());
      }
      if (names.empty()) fail_line(line, "class_names must not be empty");
      if (b.names_set && names != b.class_names) {
        fail_line(line, "class_names conflict with earlier declaration for video '" +
                            video_id + "'");
      }
      b.class_names = std::move(names);
      b.names_set = true;
    } else if (is_new) {
      fail_line(line, "first record of video '" + video_id +
                          "' must carry class_names");
    }

    const json& props = field(j, "proposals", line);
    if (!props.is_array()) fail_line(line, "proposals must be an array");
    std::vector<RegionProposal> proposals;
    proposals.reserve(props.size());
    for (const json& p : props) {
      if (!p.is_object()) fail_line(line, "proposal must be an object");
      RegionProposal rp;
      rp.box = parse_box(field(p, "box", line), line);
      rp.scores = parse_score_array(field(p, "scores", line), line);
      proposals.push_back(std::move(rp));
    }

    auto [it, inserted] =
        b.frames[stream].emplace(static_cast<int>(t), std::move(proposals));
    if (!inserted) {
      fail_line(line, "duplicate frame t=" + std::to_string(t) + " for video '" +
                          video_id + "' stream " + stream_name(stream));
    }
  });

  std::vector<VideoDetections> videos;
  videos.reserve(builders.size());
  for (auto& [video_id, b] : builders) {  // std::map: sorted by video_id
    VideoDetections video;
    video.video_id = video_id;
    video.class_names = b.class_names;
    const auto build_stream = [&](Stream which) {
      StreamDetections sd;
      sd.stream = which;
      for (auto& [t, proposals] : b.frames[which]) {
        FrameProposals frame;
        frame.frame_index = t;
        frame.proposals = std::move(proposals);
        sd.frames.push_back(std::move(frame));
      }
      return sd;
    };
    if (b.frames.count(Stream::appearance) == 0) {
      throw_validation("video '" + video_id + "': missing appearance stream");
    }
    video.appearance = build_stream(Stream::appearance);
    if (b.frames.count(Stream::motion)) {
      video.motion = build_stream(Stream::motion);
    }
    validate_video(video);
    videos.push_back(std::move(video));
  }
  return videos;
}

void write_detections(std::ostream& out,
                      const std::vector<VideoDetections>& videos) {
  for (const VideoDetections& video : videos) {
    validate_video(video);
    bool first_line = true;
    const auto emit_stream = [&](const StreamDetections& sd) {
      for (const FrameProposals& frame : sd.frames) {
        ojson j;
        j["video_id"] = video.video_id;
        j["t"] = frame.frame_index;
        j["stream"] = stream_name(sd.stream);
        if (first_line) {
          j["class_names"] = video.class_names;
          first_line = false;
        }
        ojson props = ojson::array();
        for (const RegionProposal& p : frame.proposals) {
          ojson jp;
          jp["box"] = box_to_json(p.box);
          jp["scores"] = p.scores;
          props.push_back(std::move(jp));
        }
        j["proposals"] = std::move(props);
        out << j.dump() << '\n';
      }
    };
    emit_stream(video.appearance);
    if (video.motion) emit_stream(*video.motion);
  }
}

std::vector<LabeledTube> read_tubes(std::istream& in) {
  std::vector<LabeledTube> tubes;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(text, line);
    LabeledTube tube;
    tube.video_id = get_string(j, "video_id", line);
    const json& boxes = field(j, "boxes", line);
    if (!boxes.is_array()) fail_line(line, "boxes must be an array");
    for (const json& b : boxes) tube.boxes.push_back(parse_box(b, line));
    tube.class_scores = parse_score_array(field(j, "class_scores", line), line);
    tube.predicted_class =
        static_cast<int>(get_int(j, "predicted_class", line));
    tube.predicted_score =
        as_double(field(j, "predicted_score", line), "predicted_score", line);
    tube.link_score = as_double(field(j, "link_score", line), "link_score", line);
    try {
      validate_tube(tube, "tube");
    } catch (const Error& e) {
      fail_line(line, e.what());
    }
    tubes.push_back(std::move(tube));
  });
  return tubes;
}

void write_tubes(std::ostream& out, const std::vector<LabeledTube>& tubes) {
  for (const LabeledTube& tube : tubes) {
    validate_tube(tube, "tube");
    ojson j;
    j["video_id"] = tube.video_id;
    ojson boxes = ojson::array();
    for (const BBox& b : tube.boxes) boxes.push_back(box_to_json(b));
    j["boxes"] = std::move(boxes);
    j["class_scores"] = tube.class_scores;
    j["predicted_class"] = tube.predicted_class;
    j["predicted_score"] = tube.predicted_score;
    j["link_score"] = tube.link_score;
    out << j.dump() << '\n';
  }
}

std::vector<GroundTruthTube> read_ground_truth(std::istream& in) {
  std::vector<GroundTruthTube> gts;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(text, line);
    GroundTruthTube gt;
    gt.video_id = get_string(j, "video_id", line);
    gt.class_label = static_cast<int>(get_int(j, "label", line));
    const json& boxes = field(j, "boxes", line);
    if (!boxes.is_array()) fail_line(line, "boxes must be an array");
    for (const json& b : boxes) {
      if (!b.is_array() || b.size() != 5) {
        fail_line(line, "ground-truth box must be [t,x1,y1,x2,y2]");
      }
      if (!b[0].is_number_integer()) {
        fail_line(line, "ground-truth frame index must be an integer");
      }
      gt.boxes.emplace_back(
          b[0].get<int>(),
          BBox{as_double(b[1], "box coordinate", line),
               as_double(b[2], "box coordinate", line),
               as_double(b[3], "box coordinate", line),
               as_double(b[4], "box coordinate", line)});
    }
    try {
      validate_ground_truth(gt, "ground truth");
    } catch (const Error& e) {
      fail_line(line, e.what());
    }
    gts.push_back(std::move(gt));
  });
  return gts;
}

void write_ground_truth(std::ostream& out,
                        const std::vector<GroundTruthTube>& gts) {
  for (const GroundTruthTube& gt : gts) {
    validate_ground_truth(gt, "ground truth");
    ojson j;
    j["video_id"] = gt.video_id;
    j["label"] = gt.class_label;
    ojson boxes = ojson::array();
    for (const auto& [t, b] : gt.boxes) {
      boxes.push_back(ojson::array({t, b.x1, b.y1, b.x2, b.y2}));
    }
    j["boxes"] = std::move(boxes);
    out << j.dump() << '\n';
  }
}

TunCollection read_tun(std::istream& in) {
  TunCollection tun;
  for_each_line(in, [&](const std::string& text, std::size_t line) {
    const json j = parse_line(text, line);
    const std::string video_id = get_string(j, "video_id", line);
    const long long tube_index = get_int(j, "tube_index", line);
    if (tube_index < 0) fail_line(line, "tube_index must be >= 0");
    const Stream stream = parse_stream_field(get_string(j, "stream", line), line);

    const json& frames = field(j, "frame_scores", line);
    if (!frames.is_array() || frames.empty()) {
      fail_line(line, "frame_scores must be a nonempty array");
    }
    TunScores scores;
    scores.frame_scores.reserve(frames.size());
    std::size_t classes = 0;
    for (const json& f : frames) {
      ClassScores s = parse_score_array(f, line);
      if (s.empty()) fail_line(line, "frame_scores entries must not be empty");
      if (classes == 0) {
        classes = s.size();
      } else if (s.size() != classes) {
        fail_line(line, "frame_scores rows have inconsistent class counts");
      }
      scores.frame_scores.push_back(std::move(s));
    }

    TunEntry& entry =
        tun[{video_id, static_cast<std::size_t>(tube_index)}];
    auto& slot =
        stream == Stream::appearance ? entry.appearance : entry.motion;
    if (slot) {
      fail_line(line, "duplicate tun entry for video '" + video_id +
                          "' tube " + std::to_string(tube_index) + " stream " +
                          stream_name(stream));
    }
    slot = std::move(scores);
  });
  return tun;
}

std::vector<VideoDetections> read_detections_file(const std::string& path) {
  auto in = open_in(path);
  return read_detections(in);
}

void write_detections_file(const std::string& path,
                           const std::vector<VideoDetections>& videos) {
  auto out = open_out(path);
  write_detections(out, videos);
  check_write(out, path);
}

std::vector<LabeledTube> read_tubes_file(const std::string& path) {
  auto in = open_in(path);
  return read_tubes(in);
}

void write_tubes_file(const std::string& path,
                      const std::vector<LabeledTube>& tubes) {
  auto out = open_out(path);
  write_tubes(out, tubes);
  check_write(out, path);
}

std::vector<GroundTruthTube> read_ground_truth_file(const std::string& path) {
  auto in = open_in(path);
  return read_ground_truth(in);
}

void write_ground_truth_file(const std::string& path,
                             const std::vector<GroundTruthTube>& gts) {
  auto out = open_out(path);
  write_ground_truth(out, gts);
  check_write(out, path);
}

TunCollection read_tun_file(const std::string& path) {
  auto in = open_in(path);
  return read_tun(in);
}

}  // namespace tubelink
