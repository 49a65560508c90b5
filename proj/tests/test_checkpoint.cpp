#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evlearn/checkpoint.hpp"
#include "evlearn/dataset.hpp"
#include "evlearn/rng.hpp"

using namespace evlearn;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "evlearn_test_checkpoint";
  fs::create_directories(dir);
  return dir;
}

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.input_dim = 6;
  cfg.proj_dim = 4;
  cfg.hidden = 5;
  return cfg;
}

ModelParams jittered_params(std::uint64_t seed) {
  ModelParams p = ModelParams::init(small_config(), SlotVocabulary::standard(), seed);
  Rng rng(seed + 1);
  for (auto& [name, tensor] : p.named_tensors()) {
    for (double& v : tensor->data) v += rng.uniform(-0.5, 0.5);
  }
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void rewrite(const fs::path& p, const std::string& from, const std::string& to) {
  std::string text = slurp(p);
  auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, from.size(), to);
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_SUITE("checkpoint") {

TEST_CASE("lstm_crf checkpoints round-trip every tensor bitwise") {
  fs::path path = scratch() / "crf.json";
  ModelParams p = jittered_params(3);
  save_checkpoint(path.string(), "lstm_crf", p);

  Checkpoint cp = load_checkpoint(path.string());
  CHECK(cp.variant == "lstm_crf");
  REQUIRE(cp.params.has_value());
  REQUIRE(cp.vocab.has_value());
  CHECK(cp.vocab->symbols() == p.vocab.symbols());
  CHECK(cp.params->config.input_dim == 6);
  CHECK(cp.params->config.proj_dim == 4);
  CHECK(cp.params->config.hidden == 5);

  auto expect = p.named_tensors();
  auto got = cp.params->named_tensors();
  REQUIRE(expect.size() == got.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(expect[i].first == got[i].first);
    CHECK(expect[i].second->shape == got[i].second->shape);
    CHECK(expect[i].second->data == got[i].second->data);
  }
}

TEST_CASE("non-CRF checkpoints drop edge potentials and reload them as zeros") {
  fs::path path = scratch() / "lstm_i.json";
  ModelParams p = jittered_params(5);  // jitter leaves the edges nonzero
  CHECK(p.edges.subj_verb.data[0] != 0.0);
  save_checkpoint(path.string(), "lstm_i", p);

  CHECK(slurp(path).find("edge_") == std::string::npos);
  CHECK(slurp(scratch() / "crf.json").find("edge_loc_prep") != std::string::npos);

  Checkpoint cp = load_checkpoint(path.string());
  CHECK(cp.variant == "lstm_i");
  REQUIRE(cp.params.has_value());
  for (const double v : cp.params->edges.subj_verb.data) CHECK(v == 0.0);
  for (const double v : cp.params->edges.start_loc.data) CHECK(v == 0.0);
  // Non-edge tensors still match bitwise.
  CHECK(cp.params->w_in.data == p.w_in.data);
  CHECK(cp.params->heads[0].w.data == p.heads[0].w.data);
}

TEST_CASE("separate-trunk checkpoints restore the topology flag") {
  fs::path path = scratch() / "sep.json";
  ModelConfig cfg = small_config();
  cfg.separate_trunks = true;
  ModelParams p = ModelParams::init(cfg, SlotVocabulary::standard(), 9);
  save_checkpoint(path.string(), "lstm_w", p);
  Checkpoint cp = load_checkpoint(path.string());
  REQUIRE(cp.params.has_value());
  CHECK(cp.params->config.separate_trunks);
  CHECK(cp.params->trunks.size() == 5);
}

TEST_CASE("unsupported versions and foreign files are refused") {
  fs::path path = scratch() / "versioned.json";
  save_checkpoint(path.string(), "lstm_crf", jittered_params(7));
  rewrite(path, "\"version\": 1", "\"version\": 99");
  CHECK_THROWS_WITH_AS(load_checkpoint(path.string()), doctest::Contains("version"),
                       CheckpointError);

  fs::path foreign = scratch() / "foreign.json";
  {
    std::ofstream out(foreign);
    out << R"({"format": "something.else", "version": 1})";
  }
  CHECK_THROWS_WITH_AS(load_checkpoint(foreign.string()), doctest::Contains("format"),
                       CheckpointError);

  fs::path garbage = scratch() / "garbage.json";
  {
    std::ofstream out(garbage);
    out << "not json at all";
  }
  CHECK_THROWS_AS(load_checkpoint(garbage.string()), CheckpointError);

  CHECK_THROWS_AS(load_checkpoint((scratch() / "no_such_file.json").string()), IoError);
}

TEST_CASE("tampered tensors are caught") {
  SUBCASE("shape mismatch") {
    fs::path path = scratch() / "reshaped.json";
    save_checkpoint(path.string(), "lstm_crf", jittered_params(11));
    // b_in has shape [4]; swap it for a wrong length without touching data.
    rewrite(path, "\"hidden\": 5", "\"hidden\": 7");
    CHECK_THROWS_WITH_AS(load_checkpoint(path.string()), doctest::Contains("shape"),
                         CheckpointError);
  }
  SUBCASE("missing tensor") {
    fs::path path = scratch() / "gutted.json";
    save_checkpoint(path.string(), "lstm_crf", jittered_params(13));
    rewrite(path, "\"b_in\"", "\"b_out\"");
    CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointError);
  }
  SUBCASE("non-finite value") {
    fs::path path = scratch() / "nonfinite.json";
    save_checkpoint(path.string(), "lstm_crf", jittered_params(15));
    Checkpoint before = load_checkpoint(path.string());  // sane before tampering
    CHECK(before.params.has_value());
    std::string text = slurp(path);
    // Overflow the first stored value; "1e999" parses to infinity.
    auto data_pos = text.find("\"data\": [");
    REQUIRE(data_pos != std::string::npos);
    auto val_start = data_pos + 9;
    auto val_end = text.find_first_of(",]", val_start);
    text.replace(val_start, val_end - val_start, "1e999");
    std::ofstream(path) << text;
    CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointError);
  }
}

TEST_CASE("baseline checkpoints store the modal tuple by name") {
  fs::path path = scratch() / "baseline.json";
  SlotVocabulary vocab = SlotVocabulary::standard();
  BaselineModel model;
  model.tuple.subject = vocab.index_of(Slot::kSubject, "Performer");
  model.tuple.object = vocab.index_of(Slot::kObject, "B");
  model.tuple.locative = vocab.index_of(Slot::kLocative, "A");
  model.tuple.verb = vocab.index_of(Slot::kVerb, "pull");
  model.tuple.preposition = vocab.index_of(Slot::kPreposition, "away_from");
  model.frequency = 17;
  model.total = 40;
  save_baseline_checkpoint(path.string(), vocab, model);

  Checkpoint cp = load_checkpoint(path.string());
  CHECK(cp.variant == "baseline");
  CHECK_FALSE(cp.params.has_value());
  REQUIRE(cp.baseline.has_value());
  CHECK(cp.baseline->tuple == model.tuple);
  CHECK(cp.baseline->frequency == 17);
  CHECK(cp.baseline->total == 40);
  CHECK(slurp(path).find("\"pull\"") != std::string::npos);

  rewrite(path, "\"pull\"", "\"yank\"");
  CHECK_THROWS_AS(load_checkpoint(path.string()), CheckpointError);
}

}  // TEST_SUITE
