#include "tubelink/oracle.hpp"

#include <limits>

#include "tubelink/errors.hpp"
#include "tubelink/linking.hpp"

namespace tubelink {

namespace {

void check_nonempty(const StreamDetections& video, const char* who) {
  if (video.frames.empty()) {
    throw_validation(std::string(who) + ": video has no frames");
  }
  for (const FrameProposals& f : video.frames) {
    if (f.proposals.empty()) {
      throw_validation(std::string(who) + ": frame " +
                       std::to_string(f.frame_index) + " has no proposals");
    }
  }
}

}  // namespace

OptimalPath dp_optimal_path(const StreamDetections& video) {
  check_nonempty(video, "dp_optimal_path");
  const int T = video.frame_count();

  // best[t][i]: best achievable suffix score from proposal i of frame t,
  // accumulated right-associated so enumeration can match it exactly.
  std::vector<std::vector<double>> best(static_cast<std::size_t>(T));
  best[T - 1].assign(video.frames[T - 1].proposals.size(), 0.0);
  for (int t = T - 2; t >= 0; --t) {
    const auto& cur = video.frames[t].proposals;
    const auto& nxt = video.frames[t + 1].proposals;
    best[t].resize(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
      double b = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nxt.size(); ++j) {
        const double v = linking_score(cur[i], nxt[j]) + best[t + 1][j];
        if (v > b) b = v;
      }
      best[t][i] = b;
    }
  }

  OptimalPath result;
  result.path.reserve(static_cast<std::size_t>(T));
  // Smallest start index achieving the optimum, then at every step the
  // smallest successor on the optimal value: the lexicographically
  // smallest optimal path.
  std::size_t start = 0;
  for (std::size_t i = 1; i < best[0].size(); ++i) {
    if (best[0][i] > best[0][start]) start = i;
  }
  result.score = best[0][start];
  result.path.push_back(static_cast<int>(start));
  std::size_t cur = start;
  for (int t = 0; t + 1 < T; ++t) {
    const auto& cur_props = video.frames[t].proposals;
    const auto& nxt_props = video.frames[t + 1].proposals;
    for (std::size_t j = 0; j < nxt_props.size(); ++j) {
      if (linking_score(cur_props[cur], nxt_props[j]) + best[t + 1][j] ==
          best[t][cur]) {
        result.path.push_back(static_cast<int>(j));
        cur = j;
        break;
      }
    }
  }
  return result;
}

std::vector<OptimalPath> enumerate_paths(const StreamDetections& video,
                                         std::uint64_t max_paths) {
  check_nonempty(video, "enumerate_paths");
  const int T = video.frame_count();

  std::uint64_t total = 1;
  for (const FrameProposals& f : video.frames) {
    const std::uint64_t n = f.proposals.size();
    if (total > max_paths / n) {
      throw_validation("enumerate_paths: path count exceeds max_paths");
    }
    total *= n;
  }

  std::vector<OptimalPath> out;
  out.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(T), 0);
  while (true) {
    OptimalPath p;
    p.path = idx;
    // Right-associated accumulation, matching the DP recurrence bit for bit.
    double tau = 0.0;
    for (int t = T - 1; t >= 1; --t) {
      const auto& prev = video.frames[t - 1].proposals[idx[t - 1]];
      const auto& next = video.frames[t].proposals[idx[t]];
      tau = linking_score(prev, next) + tau;
    }
    p.score = tau;
    out.push_back(std::move(p));

    int pos = T - 1;
    while (pos >= 0) {
      if (++idx[pos] < static_cast<int>(video.frames[pos].proposals.size())) {
        break;
      }
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return out;
}

}  // namespace tubelink
