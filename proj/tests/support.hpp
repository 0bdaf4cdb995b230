#pragma once

// Shared fixture builders for the unit suites. The random generators here
// are deliberately independent of the library's synthesizer.
#include <random>
#include <vector>

#include "tubelink/geometry.hpp"
#include "tubelink/types.hpp"

namespace testsup {

using namespace tubelink;

inline RegionProposal prop(const BBox& box, ClassScores scores) {
  RegionProposal p;
  p.box = box;
  p.scores = std::move(scores);
  return p;
}

inline FrameProposals frame(int t, std::vector<RegionProposal> proposals) {
  FrameProposals f;
  f.frame_index = t;
  f.proposals = std::move(proposals);
  return f;
}

inline StreamDetections stream(std::vector<FrameProposals> frames,
                               Stream which = Stream::appearance) {
  StreamDetections s;
  s.stream = which;
  s.frames = std::move(frames);
  return s;
}

inline std::vector<TimedBox> timed(const std::vector<BBox>& boxes,
                                   int start_t = 1) {
  std::vector<TimedBox> out;
  out.reserve(boxes.size());
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    out.emplace_back(start_t + static_cast<int>(k), boxes[k]);
  }
  return out;
}

inline BBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> px(0.0, 600.0);
  std::uniform_real_distribution<double> py(0.0, 440.0);
  std::uniform_real_distribution<double> pw(5.0, 120.0);
  std::uniform_real_distribution<double> ph(5.0, 100.0);
  const double x = px(rng);
  const double y = py(rng);
  return {x, y, x + pw(rng), y + ph(rng)};
}

inline ClassScores random_scores(std::mt19937_64& rng, int classes) {
  std::uniform_real_distribution<double> ps(0.0, 1.0);
  ClassScores s(static_cast<std::size_t>(classes));
  for (double& v : s) v = ps(rng);
  return s;
}

// A trellis with the given per-frame proposal counts (all >= 1).
inline StreamDetections random_trellis(std::mt19937_64& rng,
                                       const std::vector<int>& per_frame,
                                       int classes = 3) {
  std::vector<FrameProposals> frames;
  frames.reserve(per_frame.size());
  for (std::size_t t = 0; t < per_frame.size(); ++t) {
    std::vector<RegionProposal> props;
    props.reserve(static_cast<std::size_t>(per_frame[t]));
    for (int i = 0; i < per_frame[t]; ++i) {
      props.push_back(prop(random_box(rng), random_scores(rng, classes)));
    }
    frames.push_back(frame(static_cast<int>(t) + 1, std::move(props)));
  }
  return stream(std::move(frames));
}

// Uniformly random frame sizes in [1, max_n], T frames.
inline StreamDetections random_trellis(std::mt19937_64& rng, int T, int max_n,
                                       int classes = 3) {
  std::uniform_int_distribution<int> pn(1, max_n);
  std::vector<int> per_frame(static_cast<std::size_t>(T));
  for (int& n : per_frame) n = pn(rng);
  return random_trellis(rng, per_frame, classes);
}

}  // namespace testsup
