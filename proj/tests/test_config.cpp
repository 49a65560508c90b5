#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "evlearn/config.hpp"

using namespace evlearn;
namespace fs = std::filesystem;

TEST_SUITE("config") {

TEST_CASE("defaults survive a JSON round trip") {
  RunConfig def;
  RunConfig back = RunConfig::from_json_text(def.to_json_text());
  CHECK(back.sessions_per_type == def.sessions_per_type);
  CHECK(back.duration_frames == def.duration_frames);
  CHECK(back.noise_std == def.noise_std);
  CHECK(back.window == def.window);
  CHECK(back.stride == def.stride);
  CHECK(back.train_fraction == def.train_fraction);
  CHECK(back.include_pure_verb == def.include_pure_verb);
  CHECK(back.variant == def.variant);
  CHECK(back.hidden_size == def.hidden_size);
  CHECK(back.proj_dim == def.proj_dim);
  CHECK(back.separate_trunks == def.separate_trunks);
  CHECK(back.epochs == def.epochs);
  CHECK(back.batch_size == def.batch_size);
  CHECK(back.learning_rate == def.learning_rate);
  CHECK(back.keep_prob == def.keep_prob);
  CHECK(back.clip_norm == def.clip_norm);
  CHECK(back.runs == def.runs);
  CHECK(back.seed == def.seed);
}

TEST_CASE("the desk preset shrinks the model and schedule") {
  RunConfig cfg;
  cfg.apply_desk_preset();
  CHECK(cfg.sessions_per_type == 30);
  CHECK(cfg.duration_frames == 60);
  CHECK(cfg.hidden_size == 64);
  CHECK(cfg.proj_dim == 64);
  CHECK(cfg.epochs == 60);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("partial JSON overrides keep the remaining defaults") {
  RunConfig def;
  RunConfig cfg = RunConfig::from_json_text(R"({"hidden_size": 16, "variant": "lstm_i"})");
  CHECK(cfg.hidden_size == 16);
  CHECK(cfg.variant == "lstm_i");
  CHECK(cfg.epochs == def.epochs);
  CHECK(cfg.sessions_per_type == def.sessions_per_type);
  CHECK(cfg.seed == def.seed);
}

TEST_CASE("overrides apply on top of an explicit base config") {
  RunConfig base;
  base.apply_desk_preset();
  RunConfig cfg = RunConfig::from_json_text(R"({"epochs": 3})", base);
  CHECK(cfg.epochs == 3);
  CHECK(cfg.hidden_size == 64);  // kept from the desk base, not the default 200
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(RunConfig::from_json_text(R"({"hiden_size": 16})"),
                       doctest::Contains("hiden_size"), ConfigError);
}

TEST_CASE("malformed JSON and non-object payloads are rejected") {
  CHECK_THROWS_AS(RunConfig::from_json_text("{"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"epochs": "ten"})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"separate_trunks": 1})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"variant": 4})"), ConfigError);
}

TEST_CASE("validation names the offending field") {
  auto reject = [](const char* body, const char* field) {
    CHECK_THROWS_WITH_AS(RunConfig::from_json_text(body), doctest::Contains(field), ConfigError);
  };
  reject(R"({"window": 16})", "window");
  reject(R"({"epochs": 0})", "epochs");
  reject(R"({"learning_rate": -1.0})", "learning_rate");
  reject(R"({"keep_prob": 0.0})", "keep_prob");
  reject(R"({"keep_prob": 1.2})", "keep_prob");
  reject(R"({"clip_norm": 0.0})", "clip_norm");
  reject(R"({"runs": 0})", "runs");
  reject(R"({"variant": "crf"})", "variant");
  reject(R"({"train_fraction": 1.0})", "train_fraction");
  reject(R"({"sessions_per_type": 1})", "sessions_per_type");
  reject(R"({"duration_frames": 19})", "duration_frames");
  reject(R"({"stride": 0})", "stride");
  reject(R"({"hidden_size": 0})", "hidden_size");
  reject(R"({"batch_size": 0})", "batch_size");
  reject(R"({"noise_std": -0.1})", "noise_std");
}

TEST_CASE("zero learning rate and one epoch are allowed") {
  RunConfig cfg = RunConfig::from_json_text(R"({"learning_rate": 0.0, "epochs": 1})");
  CHECK(cfg.learning_rate == 0.0);
  CHECK(cfg.epochs == 1);
}

TEST_CASE("from_file reads a config and reports unopenable paths") {
  fs::path dir = fs::temp_directory_path() / "evlearn_test_config";
  fs::create_directories(dir);
  fs::path p = dir / "cfg.json";
  {
    std::ofstream out(p);
    out << R"({"epochs": 2, "seed": 123})";
  }
  RunConfig cfg = RunConfig::from_file(p.string());
  CHECK(cfg.epochs == 2);
  CHECK(cfg.seed == 123);
  CHECK_THROWS_WITH_AS(RunConfig::from_file((dir / "absent.json").string()),
                       doctest::Contains("absent.json"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("model_config and gen_config mirror the run fields") {
  RunConfig cfg;
  cfg.hidden_size = 24;
  cfg.proj_dim = 12;
  cfg.separate_trunks = true;
  cfg.sessions_per_type = 4;
  cfg.duration_frames = 44;
  cfg.noise_std = 0.02;
  cfg.stride = 8;
  cfg.train_fraction = 0.5;
  cfg.include_pure_verb = true;
  cfg.seed = 77;

  ModelConfig m = cfg.model_config();
  CHECK(m.input_dim == 63);
  CHECK(m.hidden == 24);
  CHECK(m.proj_dim == 12);
  CHECK(m.separate_trunks);

  GenConfig g = cfg.gen_config();
  CHECK(g.sessions_per_type == 4);
  CHECK(g.duration_frames == 44);
  CHECK(g.noise_std == 0.02);
  CHECK(g.window == 20);
  CHECK(g.stride == 8);
  CHECK(g.train_fraction == 0.5);
  CHECK(g.include_pure_verb);
  CHECK(g.seed == 77);
}

}  // TEST_SUITE
