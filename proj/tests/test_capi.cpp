// Exercises the shared-library surface only: every call goes through the
// C header, the way an external consumer would.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "tubelink.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("tubelink_capi_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const char* name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(tl_version()).find('.') != std::string::npos);
  CHECK(std::string(tl_last_error()).empty());
}

TEST_CASE("config lifecycle and keyed setters") {
  tl_config* cfg = tl_config_create();
  REQUIRE(cfg != nullptr);

  CHECK(tl_config_set_int(cfg, "link.top_k", 5) == TL_OK);
  CHECK(tl_config_set_double(cfg, "link.nms_threshold", 0.4) == TL_OK);
  CHECK(tl_config_set_string(cfg, "link.empty_frame_policy", "carry_forward") ==
        TL_OK);
  CHECK(tl_config_set_double(cfg, "fusion.lambda2", 0.5) == TL_OK);
  CHECK(tl_config_set_string(cfg, "eval.iou_thresholds", "0.25, 0.75") == TL_OK);
  CHECK(tl_config_set_string(cfg, "stream", "fused") == TL_OK);
  CHECK(tl_config_set_int(cfg, "seed", 42) == TL_OK);
  CHECK(tl_config_set_int(cfg, "synth.videos", 3) == TL_OK);

  char* json = nullptr;
  REQUIRE(tl_config_to_json(cfg, &json) == TL_OK);
  const std::string text(json);
  tl_string_free(json);
  CHECK(text.find("\"top_k\": 5") != std::string::npos);
  CHECK(text.find("carry_forward") != std::string::npos);
  CHECK(text.find("fused") != std::string::npos);
  // The run seed drives synthesis too.
  CHECK(text.find("\"seed\": 42") != std::string::npos);

  // Unknown keys and wrong kinds are argument errors with a message.
  CHECK(tl_config_set_int(cfg, "link.nope", 1) == TL_ERR_ARGUMENT);
  CHECK(std::string(tl_last_error()).find("link.nope") != std::string::npos);
  CHECK(tl_config_set_string(cfg, "link.top_k", "five") == TL_ERR_VALIDATION);
  CHECK(tl_config_set_string(cfg, "stream", "sideways") == TL_ERR_VALIDATION);
  CHECK(tl_config_set_int(cfg, "seed", -1) == TL_ERR_VALIDATION);

  // Null handling.
  CHECK(tl_config_set_int(nullptr, "link.top_k", 1) == TL_ERR_ARGUMENT);
  CHECK(std::string(tl_last_error()).find("NULL") != std::string::npos);

  tl_config_destroy(cfg);
  tl_config_destroy(nullptr);  // must be a no-op
}

TEST_CASE("config JSON merge") {
  tl_config* cfg = tl_config_create();
  REQUIRE(cfg != nullptr);
  CHECK(tl_config_load_json(cfg, R"({"link":{"top_k":9},"workers":2})") ==
        TL_OK);
  char* json = nullptr;
  REQUIRE(tl_config_to_json(cfg, &json) == TL_OK);
  std::string text(json);
  tl_string_free(json);
  CHECK(text.find("\"top_k\": 9") != std::string::npos);
  CHECK(text.find("\"workers\": 2") != std::string::npos);

  CHECK(tl_config_load_json(cfg, "nonsense") == TL_ERR_VALIDATION);
  CHECK(tl_config_load_file(cfg, "/nonexistent.json") == TL_ERR_IO);
  tl_config_destroy(cfg);
}

TEST_CASE("full pipeline through the C API") {
  TempDir tmp;
  tl_config* cfg = tl_config_create();
  REQUIRE(cfg != nullptr);
  REQUIRE(tl_config_set_int(cfg, "synth.videos", 4) == TL_OK);
  REQUIRE(tl_config_set_int(cfg, "synth.frames", 6) == TL_OK);
  REQUIRE(tl_config_set_int(cfg, "synth.distractors", 2) == TL_OK);
  REQUIRE(tl_config_set_int(cfg, "seed", 5) == TL_OK);

  const std::string det = tmp.file("det.jsonl");
  const std::string gt = tmp.file("gt.jsonl");
  REQUIRE(tl_synthesize(cfg, det.c_str(), gt.c_str()) == TL_OK);

  tl_corpus* corpus = nullptr;
  REQUIRE(tl_detections_read(det.c_str(), &corpus) == TL_OK);
  CHECK(tl_corpus_video_count(corpus) == 4);
  CHECK(std::string(tl_corpus_video_id(corpus, 0)) == "synth_0000");
  CHECK(tl_corpus_video_id(corpus, 99) == nullptr);

  tl_tubes* tubes = nullptr;
  REQUIRE(tl_link(corpus, cfg, &tubes) == TL_OK);
  CHECK(tl_tubes_count(tubes) >= 4);
  CHECK(tl_tubes_video_count(tubes) == 4);
  CHECK(tl_tubes_count_for_video(tubes, "synth_0001") >= 1);
  CHECK(tl_tubes_count_for_video(tubes, "missing") == 0);

  const std::string tubes_path = tmp.file("tubes.jsonl");
  REQUIRE(tl_tubes_write(tubes, tubes_path.c_str()) == TL_OK);
  tl_tubes* reread = nullptr;
  REQUIRE(tl_tubes_read(tubes_path.c_str(), &reread) == TL_OK);
  CHECK(tl_tubes_count(reread) == tl_tubes_count(tubes));

  // Rescore against an empty TUN file: tubes pass through unchanged.
  const std::string tun_path = tmp.file("tun.jsonl");
  std::ofstream(tun_path).close();
  tl_tubes* rescored = nullptr;
  REQUIRE(tl_rescore(reread, tun_path.c_str(), cfg, &rescored) == TL_OK);
  const std::string rescored_path = tmp.file("rescored.jsonl");
  REQUIRE(tl_tubes_write(rescored, rescored_path.c_str()) == TL_OK);
  CHECK(slurp(rescored_path) == slurp(tubes_path));

  tl_ground_truth* gt_handle = nullptr;
  REQUIRE(tl_ground_truth_read(gt.c_str(), &gt_handle) == TL_OK);

  tl_report* report = nullptr;
  REQUIRE(tl_evaluate(tubes, gt_handle, cfg, &report) == TL_OK);
  REQUIRE(tl_report_threshold_count(report) == 5);
  double threshold = 0.0;
  double map = 0.0;
  REQUIRE(tl_report_threshold(report, 0, &threshold) == TL_OK);
  CHECK(threshold == 0.1);
  REQUIRE(tl_report_mean_ap(report, 4, &map) == TL_OK);
  CHECK(map == 1.0);  // noiseless corpus localizes perfectly
  double accuracy = 0.0;
  REQUIRE(tl_report_accuracy(report, &accuracy) == TL_OK);
  CHECK(accuracy == 1.0);
  CHECK(tl_report_mean_ap(report, 9, &map) == TL_ERR_ARGUMENT);

  char* table = nullptr;
  REQUIRE(tl_report_to_table(report, &table) == TL_OK);
  CHECK(std::string(table).find("video-mAP") != std::string::npos);
  tl_string_free(table);

  char* report_json = nullptr;
  REQUIRE(tl_report_to_json(report, &report_json) == TL_OK);
  CHECK(std::string(report_json).find("classification_accuracy") !=
        std::string::npos);
  tl_string_free(report_json);

  // Oracle report covers every video.
  char* oracle = nullptr;
  REQUIRE(tl_oracle_report(corpus, cfg, &oracle) == TL_OK);
  std::string oracle_text(oracle);
  tl_string_free(oracle);
  CHECK(oracle_text.find("synth_0003") != std::string::npos);

  tl_report_destroy(report);
  tl_ground_truth_destroy(gt_handle);
  tl_tubes_destroy(rescored);
  tl_tubes_destroy(reread);
  tl_tubes_destroy(tubes);
  tl_corpus_destroy(corpus);
  tl_config_destroy(cfg);
}

TEST_CASE("validation failures surface with line context") {
  TempDir tmp;
  const std::string bad = tmp.file("bad.jsonl");
  {
    std::ofstream out(bad);
    out << "this is not json\n";
  }
  tl_corpus* corpus = nullptr;
  CHECK(tl_detections_read(bad.c_str(), &corpus) == TL_ERR_VALIDATION);
  CHECK(corpus == nullptr);
  CHECK(std::string(tl_last_error()).find("line 1") != std::string::npos);

  CHECK(tl_detections_read("/nonexistent.jsonl", &corpus) == TL_ERR_IO);

  // A bad config value is reported when it is used.
  tl_config* cfg = tl_config_create();
  REQUIRE(tl_config_set_double(cfg, "scoring.lambda1", 7.0) == TL_OK);
  CHECK(tl_synthesize(cfg, tmp.file("d.jsonl").c_str(),
                      tmp.file("g.jsonl").c_str()) == TL_ERR_VALIDATION);
  tl_config_destroy(cfg);
}
