#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "tubelink/errors.hpp"
#include "tubelink/fusion.hpp"

using namespace tubelink;
using testsup::frame;
using testsup::prop;
using testsup::stream;

namespace {

const BBox kBoxA{0, 0, 10, 10};
const BBox kBoxB{100, 100, 110, 110};

// rgb and flow carry the same two locations with swapped proposal order,
// so correspondence must cross the indices.
VideoDetections crossed_video() {
  VideoDetections v;
  v.video_id = "vid";
  v.class_names = {"walk", "run"};
  v.appearance = stream({
      frame(1, {prop(kBoxA, {0.6, 0.2}), prop(kBoxB, {0.4, 0.0})}),
      frame(2, {prop(kBoxA, {0.5, 0.1}), prop(kBoxB, {0.3, 0.2})}),
  });
  v.motion = stream({
      frame(1, {prop(kBoxB, {0.0, 0.4}), prop(kBoxA, {0.9, 0.3})}),
      frame(2, {prop(kBoxB, {0.1, 0.5}), prop(kBoxA, {0.8, 0.6})}),
  }, Stream::motion);
  return v;
}

}  // namespace

TEST_CASE("correspond picks the highest-overlap flow proposal") {
  const auto f = frame(1, {prop({50, 50, 60, 60}, {0.1}),
                           prop({2, 0, 12, 10}, {0.1}),
                           prop(kBoxA, {0.1})});
  CHECK(correspond(prop(kBoxA, {0.9}), f) == 2);
  // No overlap anywhere: lowest index wins.
  CHECK(correspond(prop({300, 300, 310, 310}, {0.9}), f) == 0);
  // Equal overlaps: lowest index wins.
  const auto tie = frame(1, {prop(kBoxA, {0.1}), prop(kBoxA, {0.2})});
  CHECK(correspond(prop(kBoxA, {0.9}), tie) == 0);
  CHECK_THROWS_AS(correspond(prop(kBoxA, {0.9}), frame(1, {})), Error);
}

TEST_CASE("fuse_frame_scores weights the two streams") {
  // 1/3 * 0.6 + 2/3 * 0.9 = 0.8, worked by hand.
  FusionConfig cfg;
  const ClassScores fused = fuse_frame_scores({0.6}, {0.9}, cfg);
  REQUIRE(fused.size() == 1);
  CHECK(fused[0] == doctest::Approx(0.8).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(fuse_frame_scores({0.6, 0.1}, {0.9}, cfg),
                       "fuse_frame_scores: length mismatch (2 vs 1)", Error);
}

TEST_CASE("fuse_video keeps rgb geometry and fuses matched scores") {
  const auto v = crossed_video();
  const FusionResult result = fuse_video(v, FusionConfig{});

  REQUIRE(result.stream.frames.size() == 2);
  // Geometry is untouched rgb geometry.
  for (std::size_t t = 0; t < 2; ++t) {
    REQUIRE(result.stream.frames[t].proposals.size() == 2);
    CHECK(result.stream.frames[t].proposals[0].box == kBoxA);
    CHECK(result.stream.frames[t].proposals[1].box == kBoxB);
  }
  // Crossed correspondence recorded per proposal.
  CHECK(result.flow_index ==
        std::vector<std::vector<int>>{{1, 0}, {1, 0}});

  // Frame 1, proposal 0: 1/3*{0.6,0.2} + 2/3*{0.9,0.3} = {0.8, 4/15}.
  const ClassScores& s = result.stream.frames[0].proposals[0].scores;
  CHECK(s[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
  // Frame 1, proposal 1: 1/3*{0.4,0.0} + 2/3*{0.0,0.4} = {2/15, 4/15}.
  const ClassScores& q = result.stream.frames[0].proposals[1].scores;
  CHECK(q[0] == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
}

TEST_CASE("fuse_video validates stream presence and shape") {
  auto v = crossed_video();
  v.motion.reset();
  CHECK_THROWS_AS(fuse_video(v, FusionConfig{}), Error);

  v = crossed_video();
  v.motion->frames[1].proposals.clear();
  try {
    fuse_video(v, FusionConfig{});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("motion frame 2") != std::string::npos);
  }

  v = crossed_video();
  v.motion->frames.pop_back();
  CHECK_THROWS_AS(fuse_video(v, FusionConfig{}), Error);
}

TEST_CASE("lambda2 = 1 reproduces the rgb scores bit for bit") {
  FusionConfig cfg;
  cfg.lambda2 = 1.0;
  const auto v = crossed_video();
  const FusionResult result = fuse_video(v, cfg);
  CHECK(result.stream.frames[0].proposals[0].scores ==
        v.appearance.frames[0].proposals[0].scores);
  CHECK(result.stream.frames[1].proposals[1].scores ==
        v.appearance.frames[1].proposals[1].scores);
}

TEST_CASE("lambda2 = 0 reproduces the matched flow scores") {
  FusionConfig cfg;
  cfg.lambda2 = 0.0;
  const auto v = crossed_video();
  const FusionResult result = fuse_video(v, cfg);
  // rgb proposal 0 (box A) matches flow proposal 1 (box A).
  CHECK(result.stream.frames[0].proposals[0].scores ==
        v.motion->frames[0].proposals[1].scores);
}

TEST_CASE("fusion config validation") {
  FusionConfig cfg;
  cfg.lambda2 = -0.1;
  CHECK_THROWS_AS(validate_fusion_config(cfg), Error);
  cfg.lambda2 = 1.1;
  CHECK_THROWS_AS(validate_fusion_config(cfg), Error);
}

TEST_CASE("flow_twin_indices follows the correspondence map") {
  const auto v = crossed_video();
  const FusionResult result = fuse_video(v, FusionConfig{});

  Tubelet t;
  t.region_indices = {0, 1};
  CHECK(flow_twin_indices(t, result) == std::vector<int>{1, 0});

  t.region_indices = {0, -1};  // carried frames stay carried
  CHECK(flow_twin_indices(t, result) == std::vector<int>{1, -1});

  t.region_indices = {0, 5};
  CHECK_THROWS_AS(flow_twin_indices(t, result), Error);
}
