// tubelink command-line front end. Talks to the library exclusively through
// the C API so the tool doubles as a smoke test of the shipped ABI.
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tubelink.h"

namespace {

struct ConfigDeleter {
  void operator()(tl_config* p) const { tl_config_destroy(p); }
};
struct CorpusDeleter {
  void operator()(tl_corpus* p) const { tl_corpus_destroy(p); }
};
struct TubesDeleter {
  void operator()(tl_tubes* p) const { tl_tubes_destroy(p); }
};
struct GtDeleter {
  void operator()(tl_ground_truth* p) const { tl_ground_truth_destroy(p); }
};
struct ReportDeleter {
  void operator()(tl_report* p) const { tl_report_destroy(p); }
};

using ConfigPtr = std::unique_ptr<tl_config, ConfigDeleter>;
using CorpusPtr = std::unique_ptr<tl_corpus, CorpusDeleter>;
using TubesPtr = std::unique_ptr<tl_tubes, TubesDeleter>;
using GtPtr = std::unique_ptr<tl_ground_truth, GtDeleter>;
using ReportPtr = std::unique_ptr<tl_report, ReportDeleter>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { tl_string_free(ptr); }
  const char* get() const { return ptr ? ptr : ""; }
};

// Exit codes: 0 ok, 1 validation/usage, 2 I/O.
int exit_code(tl_status status) { return status == TL_ERR_IO ? 2 : 1; }

int report_failure(tl_status status) {
  std::fprintf(stderr, "error: %s\n", tl_last_error());
  return exit_code(status);
}

#define TL_TRY(call)                                    \
  do {                                                  \
    const tl_status status_ = (call);                   \
    if (status_ != TL_OK) return report_failure(status_); \
  } while (0)

// Flags shared by the subcommands. Each flag is applied only when the user
// passed it, after any --config file, so precedence is
// defaults < config file < command line.
struct CommonFlags {
  std::string config_path;
  long long seed = 0;
  int workers = 1;
  std::string stream;
  int top_k = 10;
  double nms_iou = 0.3;
  std::string empty_frame;
  double lambda1 = 2.0 / 3.0;
  double lambda2 = 1.0 / 3.0;
  std::vector<double> deltas;

  CLI::App* cmd = nullptr;

  void add_base(CLI::App& app) {
    cmd = &app;
    app.add_option("--config", config_path, "JSON config file applied first");
    app.add_option("--seed", seed, "run seed (drives synthesis)");
    app.add_option("--workers", workers, "worker threads for per-video work");
  }
  void add_link_knobs() {
    cmd->add_option("--stream", stream, "detection stream: rgb, flow or fused")
        ->check(CLI::IsMember({"rgb", "flow", "fused"}));
    cmd->add_option("--top-k", top_k, "tubelets kept per video while linking");
    cmd->add_option("--nms-iou", nms_iou, "tube overlap above which NMS drops");
    cmd->add_option("--empty-frame", empty_frame,
                    "policy for frames without proposals")
        ->check(CLI::IsMember({"error", "carry_forward"}));
    cmd->add_option("--lambda2", lambda2, "appearance weight in score fusion");
  }
  void add_lambda1() {
    cmd->add_option("--lambda1", lambda1, "tube-score weight vs TUN scores");
  }
  void add_deltas() {
    cmd->add_option("--delta", deltas,
                    "IoU threshold(s) for evaluation, repeatable");
  }

  // Applies config file + explicitly passed flags onto cfg.
  tl_status apply(tl_config* cfg) const {
    tl_status s = TL_OK;
    const auto passed = [&](const char* name) {
      return cmd->count(name) > 0;
    };
    if (passed("--config")) {
      if ((s = tl_config_load_file(cfg, config_path.c_str())) != TL_OK) return s;
    }
    if (passed("--seed")) {
      if ((s = tl_config_set_int(cfg, "seed", seed)) != TL_OK) return s;
    }
    if (passed("--workers")) {
      if ((s = tl_config_set_int(cfg, "workers", workers)) != TL_OK) return s;
    }
    if (cmd->get_option_no_throw("--stream") && passed("--stream")) {
      if ((s = tl_config_set_string(cfg, "stream", stream.c_str())) != TL_OK)
        return s;
    }
    if (cmd->get_option_no_throw("--top-k") && passed("--top-k")) {
      if ((s = tl_config_set_int(cfg, "link.top_k", top_k)) != TL_OK) return s;
    }
    if (cmd->get_option_no_throw("--nms-iou") && passed("--nms-iou")) {
      if ((s = tl_config_set_double(cfg, "link.nms_threshold", nms_iou)) != TL_OK)
        return s;
    }
    if (cmd->get_option_no_throw("--empty-frame") && passed("--empty-frame")) {
      if ((s = tl_config_set_string(cfg, "link.empty_frame_policy",
                                    empty_frame.c_str())) != TL_OK)
        return s;
    }
    if (cmd->get_option_no_throw("--lambda1") && passed("--lambda1")) {
      if ((s = tl_config_set_double(cfg, "scoring.lambda1", lambda1)) != TL_OK)
        return s;
    }
    if (cmd->get_option_no_throw("--lambda2") && passed("--lambda2")) {
      if ((s = tl_config_set_double(cfg, "fusion.lambda2", lambda2)) != TL_OK)
        return s;
    }
    if (cmd->get_option_no_throw("--delta") && passed("--delta")) {
      std::string csv;
      for (double d : deltas) {
        if (!csv.empty()) csv += ',';
        csv += std::to_string(d);
      }
      if ((s = tl_config_set_string(cfg, "eval.iou_thresholds", csv.c_str())) !=
          TL_OK)
        return s;
    }
    return TL_OK;
  }
};

ConfigPtr make_config() { return ConfigPtr(tl_config_create()); }

int write_text_output(const std::string& path, const char* text) {
  if (path.empty()) {
    std::fputs(text, stdout);
    return 0;
  }
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::fprintf(stderr, "error: cannot write '%s'\n", path.c_str());
    return 2;
  }
  return 0;
}

int run_synth(const CommonFlags& flags, const std::string& out_path,
              const std::string& gt_path, long long videos, long long frames,
              long long proposals, long long classes, long long distractors,
              double jitter, double noise, double stream_bias, bool with_motion) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));
  const auto passed = [&](const char* name) {
    return flags.cmd->count(name) > 0;
  };
  if (passed("--videos")) TL_TRY(tl_config_set_int(cfg.get(), "synth.videos", videos));
  if (passed("--frames")) TL_TRY(tl_config_set_int(cfg.get(), "synth.frames", frames));
  if (passed("--proposals"))
    TL_TRY(tl_config_set_int(cfg.get(), "synth.proposals", proposals));
  if (passed("--classes"))
    TL_TRY(tl_config_set_int(cfg.get(), "synth.classes", classes));
  if (passed("--distractors"))
    TL_TRY(tl_config_set_int(cfg.get(), "synth.distractors", distractors));
  if (passed("--jitter"))
    TL_TRY(tl_config_set_double(cfg.get(), "synth.box_jitter", jitter));
  if (passed("--noise"))
    TL_TRY(tl_config_set_double(cfg.get(), "synth.score_noise", noise));
  if (passed("--stream-bias"))
    TL_TRY(tl_config_set_double(cfg.get(), "synth.stream_bias", stream_bias));
  if (passed("--with-motion"))
    TL_TRY(tl_config_set_int(cfg.get(), "synth.with_motion", with_motion ? 1 : 0));

  TL_TRY(tl_synthesize(cfg.get(), out_path.c_str(), gt_path.c_str()));
  std::fprintf(stderr, "[synth] wrote %s and %s\n", out_path.c_str(),
               gt_path.c_str());
  return 0;
}

int run_link(const CommonFlags& flags, const std::string& detections_path,
             const std::string& out_path) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));

  tl_corpus* corpus_raw = nullptr;
  TL_TRY(tl_detections_read(detections_path.c_str(), &corpus_raw));
  CorpusPtr corpus(corpus_raw);

  tl_tubes* tubes_raw = nullptr;
  TL_TRY(tl_link(corpus.get(), cfg.get(), &tubes_raw));
  TubesPtr tubes(tubes_raw);

  const size_t nvideos = tl_tubes_video_count(tubes.get());
  for (size_t i = 0; i < nvideos; ++i) {
    const char* id = tl_tubes_video_id(tubes.get(), i);
    std::fprintf(stderr, "[link] %s: %zu tubes\n", id,
                 tl_tubes_count_for_video(tubes.get(), id));
  }
  TL_TRY(tl_tubes_write(tubes.get(), out_path.c_str()));
  std::fprintf(stderr, "[link] %zu tubes across %zu videos -> %s\n",
               tl_tubes_count(tubes.get()), nvideos, out_path.c_str());
  return 0;
}

int run_score(const CommonFlags& flags, const std::string& tubes_path,
              const std::string& tun_path, const std::string& out_path) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));

  tl_tubes* tubes_raw = nullptr;
  TL_TRY(tl_tubes_read(tubes_path.c_str(), &tubes_raw));
  TubesPtr tubes(tubes_raw);

  tl_tubes* rescored_raw = nullptr;
  TL_TRY(tl_rescore(tubes.get(), tun_path.c_str(), cfg.get(), &rescored_raw));
  TubesPtr rescored(rescored_raw);

  TL_TRY(tl_tubes_write(rescored.get(), out_path.c_str()));
  std::fprintf(stderr, "[score] %zu tubes -> %s\n",
               tl_tubes_count(rescored.get()), out_path.c_str());
  return 0;
}

int run_eval(const CommonFlags& flags, const std::string& tubes_path,
             const std::string& gt_path, const std::string& out_path,
             bool as_json) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));

  tl_tubes* tubes_raw = nullptr;
  TL_TRY(tl_tubes_read(tubes_path.c_str(), &tubes_raw));
  TubesPtr tubes(tubes_raw);

  tl_ground_truth* gt_raw = nullptr;
  TL_TRY(tl_ground_truth_read(gt_path.c_str(), &gt_raw));
  GtPtr gt(gt_raw);

  tl_report* report_raw = nullptr;
  TL_TRY(tl_evaluate(tubes.get(), gt.get(), cfg.get(), &report_raw));
  ReportPtr report(report_raw);

  OwnedString text;
  TL_TRY(as_json ? tl_report_to_json(report.get(), &text.ptr)
                 : tl_report_to_table(report.get(), &text.ptr));
  return write_text_output(out_path, text.get());
}

int run_oracle(const CommonFlags& flags, const std::string& detections_path,
               const std::string& out_path) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));

  tl_corpus* corpus_raw = nullptr;
  TL_TRY(tl_detections_read(detections_path.c_str(), &corpus_raw));
  CorpusPtr corpus(corpus_raw);

  OwnedString jsonl;
  TL_TRY(tl_oracle_report(corpus.get(), cfg.get(), &jsonl.ptr));
  return write_text_output(out_path, jsonl.get());
}

int run_print_config(const CommonFlags& flags) {
  ConfigPtr cfg = make_config();
  TL_TRY(flags.apply(cfg.get()));
  OwnedString json;
  TL_TRY(tl_config_to_json(cfg.get(), &json.ptr));
  std::fputs(json.get(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tubelet proposal linking, fusion, scoring and evaluation"};
  app.set_version_flag("--version", tl_version());
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  CommonFlags synth_flags;
  synth_flags.add_base(*synth);
  std::string synth_out, synth_gt;
  long long sv_videos = 10, sv_frames = 20, sv_proposals = 1, sv_classes = 3,
            sv_distractors = 0;
  double sv_jitter = 0.0, sv_noise = 0.0, sv_bias = 0.0;
  bool sv_motion = false;
  synth->add_option("--out", synth_out, "detections JSONL output")->required();
  synth->add_option("--gt", synth_gt, "ground-truth JSONL output")->required();
  synth->add_option("--videos", sv_videos, "number of videos");
  synth->add_option("--frames", sv_frames, "frames per video");
  synth->add_option("--proposals", sv_proposals, "actor proposals per frame");
  synth->add_option("--classes", sv_classes, "number of action classes");
  synth->add_option("--distractors", sv_distractors,
                    "extra low-score proposals per frame");
  synth->add_option("--jitter", sv_jitter, "box corner jitter stddev, pixels");
  synth->add_option("--noise", sv_noise, "class-score noise stddev");
  synth->add_option("--stream-bias", sv_bias,
                    "per-stream confuser-class score bias cap");
  synth->add_flag("--with-motion", sv_motion, "also emit a motion stream");

  // link
  auto* link = app.add_subcommand("link", "Link detections into tubes");
  CommonFlags link_flags;
  link_flags.add_base(*link);
  link_flags.add_link_knobs();
  std::string link_detections, link_out;
  link->add_option("--detections", link_detections, "detections JSONL input")
      ->required();
  link->add_option("--out", link_out, "tube JSONL output")->required();

  // score
  auto* score = app.add_subcommand("score", "Fold TUN scores into tubes");
  CommonFlags score_flags;
  score_flags.add_base(*score);
  score_flags.add_lambda1();
  score->add_option("--lambda2", score_flags.lambda2,
                    "appearance weight when fusing two TUN streams");
  std::string score_tubes, score_tun, score_out;
  score->add_option("--tubes", score_tubes, "tube JSONL input")->required();
  score->add_option("--tun", score_tun, "TUN score JSONL input")->required();
  score->add_option("--out", score_out, "tube JSONL output")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate tubes against ground truth");
  CommonFlags eval_flags;
  eval_flags.add_base(*eval);
  eval_flags.add_deltas();
  std::string eval_tubes, eval_gt, eval_out;
  bool eval_json = false;
  eval->add_option("--tubes", eval_tubes, "tube JSONL input")->required();
  eval->add_option("--gt", eval_gt, "ground-truth JSONL input")->required();
  eval->add_option("--out", eval_out, "write the report here instead of stdout");
  eval->add_flag("--json", eval_json, "emit JSON instead of a table");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Exact best linking path per video (reference check)");
  CommonFlags oracle_flags;
  oracle_flags.add_base(*oracle);
  oracle_flags.add_link_knobs();
  std::string oracle_detections, oracle_out;
  oracle->add_option("--detections", oracle_detections, "detections JSONL input")
      ->required();
  oracle->add_option("--out", oracle_out,
                     "write the JSONL here instead of stdout");

  // print-config
  auto* print_config =
      app.add_subcommand("print-config", "Dump the effective configuration");
  CommonFlags print_flags;
  print_flags.add_base(*print_config);
  print_flags.add_link_knobs();
  print_flags.add_lambda1();
  print_flags.add_deltas();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  if (synth->parsed()) {
    return run_synth(synth_flags, synth_out, synth_gt, sv_videos, sv_frames,
                     sv_proposals, sv_classes, sv_distractors, sv_jitter,
                     sv_noise, sv_bias, sv_motion);
  }
  if (link->parsed()) return run_link(link_flags, link_detections, link_out);
  if (score->parsed()) {
    return run_score(score_flags, score_tubes, score_tun, score_out);
  }
  if (eval->parsed()) {
    return run_eval(eval_flags, eval_tubes, eval_gt, eval_out, eval_json);
  }
  if (oracle->parsed()) {
    return run_oracle(oracle_flags, oracle_detections, oracle_out);
  }
  if (print_config->parsed()) return run_print_config(print_flags);
  return 1;
}
