#include "evlearn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evlearn/dataset.hpp"

namespace evlearn {

using nlohmann::json;

void RunConfig::apply_desk_preset() {
  sessions_per_type = 30;
  duration_frames = 60;
  hidden_size = 64;
  proj_dim = 64;
  epochs = 60;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (sessions_per_type < 2) fail("sessions_per_type must be at least 2");
  if (duration_frames < 20) fail("duration_frames must be at least 20");
  if (!std::isfinite(noise_std) || noise_std < 0.0) {
    fail("noise_std must be finite and non-negative");
  }
  if (window != static_cast<int>(kSegmentFrames)) {
    fail("window must be " + std::to_string(kSegmentFrames) +
         " (the corpus format fixes the segment length)");
  }
  if (stride < 1) fail("stride must be positive");
  if (window > duration_frames) fail("window must not exceed duration_frames");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail("train_fraction must lie strictly between 0 and 1");
  }
  if (variant != "baseline" && variant != "lstm_i" && variant != "lstm_w" &&
      variant != "lstm_crf") {
    fail("variant must be one of baseline, lstm_i, lstm_w, lstm_crf (got \"" + variant + "\")");
  }
  if (hidden_size < 1) fail("hidden_size must be positive");
  if (proj_dim < 1) fail("proj_dim must be positive");
  if (epochs < 1) fail("epochs must be at least 1");
  if (batch_size < 1) fail("batch_size must be positive");
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    fail("learning_rate must be finite and non-negative");
  }
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) fail("keep_prob must lie in (0, 1]");
  if (!std::isfinite(clip_norm) || clip_norm <= 0.0) fail("clip_norm must be finite and positive");
  if (runs < 1) fail("runs must be at least 1");
}

ModelConfig RunConfig::model_config() const {
  ModelConfig m;
  m.input_dim = kFeatureDim;
  m.proj_dim = static_cast<std::size_t>(proj_dim);
  m.hidden = static_cast<std::size_t>(hidden_size);
  m.separate_trunks = separate_trunks;
  return m;
}

GenConfig RunConfig::gen_config() const {
  GenConfig g;
  g.sessions_per_type = sessions_per_type;
  g.duration_frames = duration_frames;
  g.noise_std = noise_std;
  g.window = window;
  g.stride = stride;
  g.train_fraction = train_fraction;
  g.include_pure_verb = include_pure_verb;
  g.seed = seed;
  return g;
}

std::string RunConfig::to_json_text() const {
  json j;
  j["sessions_per_type"] = sessions_per_type;
  j["duration_frames"] = duration_frames;
  j["noise_std"] = noise_std;
  j["window"] = window;
  j["stride"] = stride;
  j["train_fraction"] = train_fraction;
  j["include_pure_verb"] = include_pure_verb;
  j["variant"] = variant;
  j["hidden_size"] = hidden_size;
  j["proj_dim"] = proj_dim;
  j["separate_trunks"] = separate_trunks;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["learning_rate"] = learning_rate;
  j["keep_prob"] = keep_prob;
  j["clip_norm"] = clip_norm;
  j["runs"] = runs;
  j["seed"] = seed;
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  return from_json_text(text, RunConfig{});
}

RunConfig RunConfig::from_json_text(const std::string& text, RunConfig base) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "sessions_per_type", "duration_frames", "noise_std",     "window",
      "stride",            "train_fraction",  "include_pure_verb",
      "variant",           "hidden_size",     "proj_dim",      "separate_trunks",
      "epochs",            "batch_size",      "learning_rate", "keep_prob",
      "clip_norm",         "runs",          "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field \"" + key + "\"");
  }

  RunConfig cfg = base;
  auto get_int = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    out = j[key].get<int>();
  };
  auto get_num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    out = j[key].get<double>();
  };
  auto get_bool = [&](const char* key, bool& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
    out = j[key].get<bool>();
  };
  get_int("sessions_per_type", cfg.sessions_per_type);
  get_int("duration_frames", cfg.duration_frames);
  get_num("noise_std", cfg.noise_std);
  get_int("window", cfg.window);
  get_int("stride", cfg.stride);
  get_num("train_fraction", cfg.train_fraction);
  get_bool("include_pure_verb", cfg.include_pure_verb);
  if (j.contains("variant")) {
    if (!j["variant"].is_string()) throw ConfigError("variant must be a string");
    cfg.variant = j["variant"].get<std::string>();
  }
  get_int("hidden_size", cfg.hidden_size);
  get_int("proj_dim", cfg.proj_dim);
  get_bool("separate_trunks", cfg.separate_trunks);
  get_int("epochs", cfg.epochs);
  get_int("batch_size", cfg.batch_size);
  get_num("learning_rate", cfg.learning_rate);
  get_num("keep_prob", cfg.keep_prob);
  get_num("clip_norm", cfg.clip_norm);
  get_int("runs", cfg.runs);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      throw ConfigError("seed must be an integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_file(path, RunConfig{});
}

RunConfig RunConfig::from_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str(), base);
}

}  // namespace evlearn
