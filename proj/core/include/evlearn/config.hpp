#pragma once

#include <cstdint>
#include <string>

#include "evlearn/lstm.hpp"
#include "evlearn/structured.hpp"
#include "evlearn/synthgen.hpp"

namespace evlearn {

// One flat configuration drives every command; generation fields feed the
// corpus builder, the rest the trainer. Loaded from a JSON object with
// exactly these keys (unknown keys are rejected so typos surface early).
struct RunConfig {
  // generation
  int sessions_per_type = 30;
  int duration_frames = 60;
  double noise_std = 0.01;
  int window = 20;
  int stride = 10;
  double train_fraction = 0.6;
  bool include_pure_verb = false;

  // model
  std::string variant = "lstm_crf";  // baseline | lstm_i | lstm_w | lstm_crf
  int hidden_size = 200;
  int proj_dim = 128;
  bool separate_trunks = false;

  // optimization
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.05;
  double keep_prob = 0.8;
  double clip_norm = 5.0;
  int runs = 1;  // seeded repetitions for averaged experiments

  std::uint64_t seed = 42;

  // Shrinks the model and schedule for quick runs on a single core.
  void apply_desk_preset();

  // Throws ConfigError naming the offending field.
  void validate() const;

  ModelConfig model_config() const;
  GenConfig gen_config() const;

  std::string to_json_text() const;
  // Fields present in the JSON override `base` (defaults when omitted);
  // the result is validated.
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_json_text(const std::string& text, RunConfig base);
  static RunConfig from_file(const std::string& path);
  static RunConfig from_file(const std::string& path, RunConfig base);
};

}  // namespace evlearn
