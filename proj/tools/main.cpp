#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "evlearn/checkpoint.hpp"
#include "evlearn/config.hpp"
#include "evlearn/dataset.hpp"
#include "evlearn/pipeline.hpp"
#include "evlearn/synthgen.hpp"
#include "evlearn/version.hpp"

namespace {

using evlearn::RunConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;    // bad flags or configuration
constexpr int kExitData = 3;      // unreadable or malformed input files
constexpr int kExitDiverged = 4;  // training aborted on a non-finite loss
constexpr int kExitInternal = 5;

struct CommonFlags {
  std::string config_path;
  bool desk = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string variant;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON configuration file");
  cmd->add_flag("--desk", f.desk, "small model/schedule preset for quick runs");
  cmd->add_option("--seed", f.seed, "master seed override")
      ->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--variant", f.variant,
                  "model variant override: baseline, lstm_i, lstm_w, lstm_crf");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig base;
  if (f.desk) base.apply_desk_preset();
  RunConfig cfg = f.config_path.empty() ? base : RunConfig::from_file(f.config_path, base);
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.variant.empty()) cfg.variant = f.variant;
  cfg.validate();
  return cfg;
}

json config_json(const RunConfig& cfg) { return json::parse(cfg.to_json_text()); }

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw evlearn::IoError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw evlearn::IoError("write failed: " + path);
}

int cmd_gen(const CommonFlags& flags, const std::string& out_dir) {
  RunConfig cfg = resolve_config(flags);
  evlearn::SlotVocabulary vocab = evlearn::SlotVocabulary::standard();
  evlearn::Corpus corpus = evlearn::build_corpus(cfg.gen_config(), vocab);

  std::filesystem::create_directories(out_dir);
  std::string train_path = out_dir + "/train.jsonl";
  std::string test_path = out_dir + "/test.jsonl";
  evlearn::write_segments_jsonl(train_path, corpus.train, vocab);
  evlearn::write_segments_jsonl(test_path, corpus.test, vocab);

  json manifest;
  manifest["format"] = "evlearn.corpus";
  manifest["version"] = 1;
  manifest["tool_version"] = evlearn::kVersion;
  manifest["config"] = config_json(cfg);
  manifest["event_types"] = corpus.event_types;
  json counts;
  counts["sessions"] = corpus.counts.sessions;
  counts["train_sessions"] = corpus.counts.train_sessions;
  counts["test_sessions"] = corpus.counts.test_sessions;
  counts["train_segments"] = corpus.counts.train_segments;
  counts["test_segments"] = corpus.counts.test_segments;
  manifest["counts"] = std::move(counts);
  json split = json::object();
  for (const auto& [id, side] : corpus.split) split[id] = side;
  manifest["split"] = std::move(split);
  json files;
  files["train"] = {{"path", train_path}, {"fingerprint", evlearn::file_fingerprint(train_path)}};
  files["test"] = {{"path", test_path}, {"fingerprint", evlearn::file_fingerprint(test_path)}};
  manifest["files"] = std::move(files);
  write_json_file(out_dir + "/manifest.json", manifest);

  std::cout << "wrote " << corpus.counts.train_segments << " train / "
            << corpus.counts.test_segments << " test segments across "
            << corpus.counts.sessions << " sessions to " << out_dir << "\n";
  return kExitOk;
}

int cmd_train(const CommonFlags& flags, const std::string& corpus_path,
              const std::string& model_path, const std::string& history_path,
              std::string manifest_path) {
  const auto started = std::chrono::steady_clock::now();
  RunConfig cfg = resolve_config(flags);
  evlearn::SlotVocabulary vocab = evlearn::SlotVocabulary::standard();
  std::vector<evlearn::FeatureSegment> data = evlearn::read_segments_jsonl(corpus_path, vocab);
  if (data.empty()) throw evlearn::SchemaError(0, "corpus holds no segments: " + corpus_path);

  json result_info;
  if (cfg.variant == "baseline") {
    evlearn::BaselineModel baseline = evlearn::baseline_most_frequent(data);
    evlearn::save_baseline_checkpoint(model_path, vocab, baseline);
    result_info["frequency"] = baseline.frequency;
    result_info["total"] = baseline.total;
    std::cout << "baseline tuple " << evlearn::render_sentence(vocab, baseline.tuple) << " ("
              << baseline.frequency << "/" << baseline.total << " training segments)\n";
  } else {
    evlearn::TrainConfig tcfg;
    tcfg.variant = evlearn::parse_head_variant(cfg.variant);
    tcfg.epochs = cfg.epochs;
    tcfg.batch_size = cfg.batch_size;
    tcfg.learning_rate = cfg.learning_rate;
    tcfg.keep_prob = cfg.keep_prob;
    tcfg.clip_norm = cfg.clip_norm;
    tcfg.seed = cfg.seed;
    tcfg.on_epoch = [&](int epoch, double loss) {
      std::cout << "epoch " << epoch << "  loss " << loss << "\n";
    };
    evlearn::TrainResult result = evlearn::train(cfg.model_config(), vocab, data, tcfg);
    evlearn::save_checkpoint(model_path, cfg.variant, result.params);
    if (!history_path.empty()) evlearn::write_loss_csv(history_path, result.epoch_losses);
    result_info["steps"] = result.steps;
    result_info["epochs"] = result.epoch_losses.size();
    if (!result.epoch_losses.empty()) result_info["final_loss"] = result.epoch_losses.back();
  }

  if (manifest_path.empty()) manifest_path = model_path + ".manifest.json";
  json manifest;
  manifest["format"] = "evlearn.run";
  manifest["version"] = 1;
  manifest["tool_version"] = evlearn::kVersion;
  manifest["command"] = "train";
  manifest["variant"] = cfg.variant;
  manifest["config"] = config_json(cfg);
  manifest["corpus"] = {{"path", corpus_path},
                        {"fingerprint", evlearn::file_fingerprint(corpus_path)},
                        {"segments", data.size()}};
  manifest["model"] = {{"path", model_path},
                       {"fingerprint", evlearn::file_fingerprint(model_path)}};
  manifest["result"] = std::move(result_info);
  manifest["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_json_file(manifest_path, manifest);
  std::cout << "saved model to " << model_path << "\n";
  return kExitOk;
}

std::unique_ptr<evlearn::Predictor> make_predictor(const evlearn::Checkpoint& cp) {
  if (cp.variant == "baseline") {
    return std::make_unique<evlearn::ConstantPredictor>(cp.baseline->tuple);
  }
  return std::make_unique<evlearn::ModelPredictor>(*cp.params,
                                                   evlearn::parse_head_variant(cp.variant));
}

int cmd_eval(const std::string& model_path, const std::string& corpus_path,
             const std::string& report_path) {
  evlearn::Checkpoint cp = evlearn::load_checkpoint(model_path);
  const evlearn::SlotVocabulary& vocab = *cp.vocab;
  std::vector<evlearn::FeatureSegment> data = evlearn::read_segments_jsonl(corpus_path, vocab);
  if (data.empty()) throw evlearn::SchemaError(0, "corpus holds no segments: " + corpus_path);

  std::unique_ptr<evlearn::Predictor> predictor = make_predictor(cp);
  evlearn::EvalReport report = evlearn::evaluate(*predictor, vocab, data);
  std::string text = report.to_json_text(cp.variant);
  std::cout << text << "\n";
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw evlearn::IoError("cannot open for writing: " + report_path);
    out << text << '\n';
  }
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& corpus_path,
                const std::string& out_path) {
  evlearn::Checkpoint cp = evlearn::load_checkpoint(model_path);
  const evlearn::SlotVocabulary& vocab = *cp.vocab;
  std::vector<evlearn::FeatureSegment> data = evlearn::read_segments_jsonl(corpus_path, vocab);

  std::unique_ptr<evlearn::Predictor> predictor = make_predictor(cp);
  std::vector<const evlearn::Tensor*> frames;
  frames.reserve(data.size());
  for (const auto& seg : data) frames.push_back(&seg.frames);
  std::vector<evlearn::EventTuple> predictions = predictor->predict_many(frames);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw evlearn::IoError("cannot open for writing: " + out_path);
    out = &file;
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    json j;
    j["session_id"] = data[i].session_id;
    j["segment_index"] = data[i].segment_index;
    json label;
    for (evlearn::Slot s : evlearn::kAllSlots) {
      label[std::string(evlearn::slot_name(s))] = vocab.label_name(s, predictions[i][s]);
    }
    j["prediction"] = std::move(label);
    j["sentence"] = evlearn::render_sentence(vocab, predictions[i]);
    j["valid"] = static_cast<bool>(evlearn::is_valid(vocab, predictions[i]));
    (*out) << j.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-tuple learning over synthetic tabletop sessions"};
  app.set_version_flag("--version", evlearn::kVersion);
  app.require_subcommand(1);

  CommonFlags gen_flags;
  std::string gen_out = "data";
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  add_common(gen, gen_flags);
  gen->add_option("--out", gen_out, "output directory")->required();

  CommonFlags train_flags;
  std::string train_corpus, train_model = "model.json", train_history, train_manifest;
  CLI::App* train = app.add_subcommand("train", "train a model on a corpus");
  add_common(train, train_flags);
  train->add_option("--corpus", train_corpus, "training corpus (jsonl)")->required();
  train->add_option("--model", train_model, "checkpoint output path");
  train->add_option("--history", train_history, "per-epoch loss CSV output path");
  train->add_option("--manifest", train_manifest, "run manifest output path");

  std::string eval_model, eval_corpus, eval_report;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval->add_option("--model", eval_model, "checkpoint path")->required();
  eval->add_option("--corpus", eval_corpus, "evaluation corpus (jsonl)")->required();
  eval->add_option("--report", eval_report, "also write the JSON report here");

  std::string pred_model, pred_corpus, pred_out;
  CLI::App* predict = app.add_subcommand("predict", "decode tuples for every segment");
  predict->add_option("--model", pred_model, "checkpoint path")->required();
  predict->add_option("--corpus", pred_corpus, "input corpus (jsonl)")->required();
  predict->add_option("--out", pred_out, "write JSONL here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags, gen_out);
    if (train->parsed()) {
      return cmd_train(train_flags, train_corpus, train_model, train_history, train_manifest);
    }
    if (eval->parsed()) return cmd_eval(eval_model, eval_corpus, eval_report);
    if (predict->parsed()) return cmd_predict(pred_model, pred_corpus, pred_out);
    std::cerr << "error: no command given\n";
    return kExitConfig;
  } catch (const evlearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const evlearn::GenerationError& e) {
    std::cerr << "generation error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const evlearn::SchemaError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const evlearn::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitData;
  } catch (const evlearn::TrainDiverged& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const evlearn::CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
