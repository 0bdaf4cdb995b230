#pragma once

#include <cstdint>
#include <string>

#include "tubelink/evaluation.hpp"
#include "tubelink/fusion.hpp"
#include "tubelink/linking.hpp"
#include "tubelink/scoring.hpp"
#include "tubelink/synth.hpp"

namespace tubelink {

enum class StreamMode { rgb_only, flow_only, fused };

const char* stream_mode_name(StreamMode mode);
StreamMode parse_stream_mode(const std::string& name);

// Everything one run needs; round-trips through JSON losslessly.
struct PipelineConfig {
  LinkConfig link;
  FusionConfig fusion;
  ScoreConfig scoring;
  EvalConfig eval;
  SynthConfig synth;
  StreamMode stream = StreamMode::rgb_only;
  int workers = 1;
  std::uint64_t seed = 0;
};

void validate_config(const PipelineConfig& cfg);

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig config_from_file(const std::string& path);

}  // namespace tubelink
