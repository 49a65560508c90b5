#include "evlearn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evlearn/dataset.hpp"

namespace evlearn {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "evlearn.checkpoint";
constexpr int kFormatVersion = 1;

json tensor_to_json(const Tensor& t) {
  json j;
  j["shape"] = t.shape;
  j["data"] = t.data;
  return j;
}

Tensor tensor_from_json(const json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
    throw CheckpointError("tensor \"" + name + "\" must carry shape and data");
  }
  std::vector<std::size_t> shape = j["shape"].get<std::vector<std::size_t>>();
  std::vector<double> data = j["data"].get<std::vector<double>>();
  if (shape_numel(shape) != data.size()) {
    throw CheckpointError("tensor \"" + name + "\": shape does not match data length");
  }
  return Tensor(shape, std::move(data));
}

json vocab_to_json(const SlotVocabulary& vocab) {
  json j;
  j["symbols"] = vocab.symbols();
  json slots;
  for (Slot s : kAllSlots) slots[std::string(slot_name(s))] = vocab.slot_symbols(s);
  j["slots"] = std::move(slots);
  return j;
}

SlotVocabulary vocab_from_json(const json& j) {
  if (!j.is_object() || !j.contains("symbols") || !j.contains("slots")) {
    throw CheckpointError("vocabulary must carry symbols and slots");
  }
  std::vector<std::string> symbols = j["symbols"].get<std::vector<std::string>>();
  std::array<std::vector<int>, kNumSlots> slots;
  for (Slot s : kAllSlots) {
    std::string key(slot_name(s));
    if (!j["slots"].contains(key)) throw CheckpointError("vocabulary is missing slot " + key);
    slots[static_cast<int>(s)] = j["slots"][key].get<std::vector<int>>();
  }
  return SlotVocabulary(std::move(symbols), std::move(slots));
}

json header(const std::string& variant) {
  json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["variant"] = variant;
  return j;
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& variant,
                     const ModelParams& params) {
  json j = header(variant);
  json cfg;
  cfg["input_dim"] = params.config.input_dim;
  cfg["proj_dim"] = params.config.proj_dim;
  cfg["hidden"] = params.config.hidden;
  cfg["separate_trunks"] = params.config.separate_trunks;
  j["config"] = std::move(cfg);
  j["vocabulary"] = vocab_to_json(params.vocab);
  json tensors;
  for (const auto& [name, tensor] : params.named_tensors()) {
    if (variant != "lstm_crf" && name.rfind("edge_", 0) == 0) continue;
    tensors[name] = tensor_to_json(*tensor);
  }
  j["tensors"] = std::move(tensors);
  write_file(path, j);
}

void save_baseline_checkpoint(const std::string& path, const SlotVocabulary& vocab,
                              const BaselineModel& baseline) {
  json j = header("baseline");
  j["vocabulary"] = vocab_to_json(vocab);
  json b;
  json tuple;
  for (Slot s : kAllSlots) {
    tuple[std::string(slot_name(s))] = vocab.label_name(s, baseline.tuple[s]);
  }
  b["tuple"] = std::move(tuple);
  b["frequency"] = baseline.frequency;
  b["total"] = baseline.total;
  j["baseline"] = std::move(b);
  write_file(path, j);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw CheckpointError("checkpoint is not valid JSON");
  if (!j.is_object() || !j.contains("format") || j["format"] != kFormatTag) {
    throw CheckpointError("not a model checkpoint (missing format tag)");
  }
  if (!j.contains("version") || !j["version"].is_number_integer() ||
      j["version"].get<int>() != kFormatVersion) {
    throw CheckpointError("unsupported checkpoint version");
  }
  if (!j.contains("variant") || !j["variant"].is_string()) {
    throw CheckpointError("checkpoint is missing its variant");
  }

  Checkpoint cp;
  cp.variant = j["variant"].get<std::string>();
  if (!j.contains("vocabulary")) throw CheckpointError("checkpoint is missing its vocabulary");
  cp.vocab.emplace(vocab_from_json(j["vocabulary"]));
  const SlotVocabulary& vocab = *cp.vocab;

  if (cp.variant == "baseline") {
    if (!j.contains("baseline")) throw CheckpointError("baseline checkpoint lacks its payload");
    const json& b = j["baseline"];
    BaselineModel model;
    for (Slot s : kAllSlots) {
      std::string key(slot_name(s));
      std::string name = b.at("tuple").at(key).get<std::string>();
      int idx = vocab.index_of(s, name);
      if (idx < 0) throw CheckpointError("baseline tuple has unknown " + key + " label");
      model.tuple[s] = idx;
    }
    model.frequency = b.value("frequency", 0u);
    model.total = b.value("total", 0u);
    cp.baseline = model;
    return cp;
  }

  if (cp.variant != "lstm_i" && cp.variant != "lstm_w" && cp.variant != "lstm_crf") {
    throw CheckpointError("unknown checkpoint variant \"" + cp.variant + "\"");
  }
  if (!j.contains("config") || !j.contains("tensors")) {
    throw CheckpointError("model checkpoint lacks config or tensors");
  }
  const json& cfgj = j["config"];
  ModelConfig cfg;
  cfg.input_dim = cfgj.value("input_dim", 0u);
  cfg.proj_dim = cfgj.value("proj_dim", 0u);
  cfg.hidden = cfgj.value("hidden", 0u);
  cfg.separate_trunks = cfgj.value("separate_trunks", false);
  if (cfg.input_dim == 0 || cfg.proj_dim == 0 || cfg.hidden == 0) {
    throw CheckpointError("checkpoint config has non-positive dimensions");
  }

  ModelParams params = ModelParams::init(cfg, vocab, 0);
  const json& tensors = j["tensors"];
  for (auto& [name, tensor] : params.named_tensors()) {
    if (!tensors.contains(name)) {
      if (name.rfind("edge_", 0) == 0 && cp.variant != "lstm_crf") {
        tensor->data.assign(tensor->data.size(), 0.0);
        continue;
      }
      throw CheckpointError("checkpoint is missing tensor \"" + name + "\"");
    }
    Tensor loaded = tensor_from_json(tensors[name], name);
    if (loaded.shape != tensor->shape) {
      throw CheckpointError("tensor \"" + name + "\" has shape " + shape_str(loaded.shape) +
                            ", expected " + shape_str(tensor->shape));
    }
    *tensor = std::move(loaded);
  }
  if (!params.all_finite()) throw CheckpointError("checkpoint holds non-finite parameters");
  cp.params.emplace(std::move(params));
  return cp;
}

}  // namespace evlearn
