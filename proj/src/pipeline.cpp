#include "tubelink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "tubelink/errors.hpp"
#include "tubelink/linking.hpp"
#include "tubelink/scoring.hpp"

namespace tubelink {

namespace {

// Indices into `videos` sorted by video_id; rejects duplicates so output
// order is well defined.
std::vector<std::size_t> video_order(const std::vector<VideoDetections>& videos) {
  std::vector<std::size_t> order(videos.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return videos[a].video_id < videos[b].video_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (videos[order[i - 1]].video_id == videos[order[i]].video_id) {
      throw_validation("duplicate video_id '" + videos[order[i]].video_id + "'");
    }
  }
  return order;
}

// Runs fn(slot) for every slot on cfg.workers threads. The first exception
// wins; remaining slots are abandoned.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  workers = std::clamp<int>(workers, 1, static_cast<int>(count));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr err;
  std::mutex err_mutex;

  const auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t slot = next.fetch_add(1, std::memory_order_relaxed);
      if (slot >= count) return;
      try {
        fn(slot);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
}

int argmax_lowest(const ClassScores& scores) {
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[static_cast<std::size_t>(best)]) {
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

StreamDetections resolve_stream(const VideoDetections& video,
                                const PipelineConfig& cfg) {
  switch (cfg.stream) {
    case StreamMode::rgb_only:
      return video.appearance;
    case StreamMode::flow_only:
      if (!video.motion) {
        throw_validation("video '" + video.video_id +
                         "': stream mode flow_only needs a motion stream");
      }
      return *video.motion;
    case StreamMode::fused:
      return fuse_video(video, cfg.fusion).stream;
  }
  throw_validation("unknown stream mode");
}

std::vector<LabeledTube> link_videos(const std::vector<VideoDetections>& videos,
                                     const PipelineConfig& cfg) {
  validate_config(cfg);
  const std::vector<std::size_t> order = video_order(videos);

  std::vector<std::vector<LabeledTube>> per_video(order.size());
  parallel_for(order.size(), cfg.workers, [&](std::size_t slot) {
    const VideoDetections& video = videos[order[slot]];
    validate_video(video);
    const StreamDetections stream = resolve_stream(video, cfg);
    const std::vector<Tubelet> tubelets = generate_tubelets(stream, cfg.link);
    std::vector<LabeledTube>& out = per_video[slot];
    out.reserve(tubelets.size());
    for (const Tubelet& t : tubelets) {
      const ClassScores scores = tube_class_scores(t, std::nullopt, cfg.scoring);
      out.push_back(label_tube(t, scores, stream, video.video_id));
    }
  });

  std::vector<LabeledTube> tubes;
  for (std::vector<LabeledTube>& v : per_video) {
    for (LabeledTube& t : v) tubes.push_back(std::move(t));
  }
  return tubes;
}

std::vector<LabeledTube> rescore_tubes(const std::vector<LabeledTube>& tubes,
                                       const TunCollection& tun,
                                       const PipelineConfig& cfg) {
  validate_config(cfg);
  std::map<std::string, std::size_t> next_index;  // per-video tube counter
  std::vector<LabeledTube> out;
  out.reserve(tubes.size());
  for (const LabeledTube& tube : tubes) {
    validate_tube(tube, "tube");
    const std::size_t index = next_index[tube.video_id]++;
    LabeledTube rescored = tube;
    const auto it = tun.find({tube.video_id, index});
    if (it != tun.end()) {
      const std::string context = "tun entry for video '" + tube.video_id +
                                  "' tube " + std::to_string(index);
      const std::optional<TunScores> resolved =
          resolve_tun(it->second, cfg.fusion, tube.boxes.size(),
                      tube.class_scores.size(), context);
      if (resolved) {
        rescored.class_scores =
            combine_tube_scores(tube.class_scores, *resolved, cfg.scoring);
        rescored.predicted_class = argmax_lowest(rescored.class_scores);
        rescored.predicted_score = rescored.class_scores[static_cast<std::size_t>(
            rescored.predicted_class)];
      }
    }
    out.push_back(std::move(rescored));
  }
  return out;
}

EvalReport evaluate_tubes(const std::vector<LabeledTube>& tubes,
                          const std::vector<GroundTruthTube>& gts,
                          const PipelineConfig& cfg) {
  validate_config(cfg);
  return video_map(tubes, gts, cfg.eval);
}

std::vector<VideoOraclePath> oracle_paths(
    const std::vector<VideoDetections>& videos, const PipelineConfig& cfg) {
  validate_config(cfg);
  const std::vector<std::size_t> order = video_order(videos);

  std::vector<VideoOraclePath> out(order.size());
  parallel_for(order.size(), cfg.workers, [&](std::size_t slot) {
    const VideoDetections& video = videos[order[slot]];
    validate_video(video);
    const StreamDetections stream = resolve_stream(video, cfg);
    const OptimalPath best = dp_optimal_path(stream);
    out[slot] = {video.video_id, best.path, best.score};
  });
  return out;
}

std::string oracle_paths_to_jsonl(const std::vector<VideoOraclePath>& paths) {
  std::string out;
  for (const VideoOraclePath& p : paths) {
    nlohmann::ordered_json j;
    j["video_id"] = p.video_id;
    j["path"] = p.path;
    j["score"] = p.score;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace tubelink
