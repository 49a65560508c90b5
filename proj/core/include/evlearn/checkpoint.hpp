#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "evlearn/event.hpp"
#include "evlearn/lstm.hpp"

namespace evlearn {

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& what) : std::runtime_error(what) {}
};

// Most-frequent-tuple baseline.
struct BaselineModel {
  EventTuple tuple;
  std::size_t frequency = 0;  // times the modal tuple occurred
  std::size_t total = 0;      // training segments counted
};

// On disk: one JSON object with a format tag and version, the variant,
// the vocabulary, and either the parameter tensors or the baseline
// payload. Edge potentials are stored for lstm_crf only; the other
// variants reload them as zeros.
struct Checkpoint {
  std::string variant;  // baseline | lstm_i | lstm_w | lstm_crf
  std::optional<SlotVocabulary> vocab;
  std::optional<ModelParams> params;    // model variants
  std::optional<BaselineModel> baseline;  // baseline variant
};

void save_checkpoint(const std::string& path, const std::string& variant,
                     const ModelParams& params);
void save_baseline_checkpoint(const std::string& path, const SlotVocabulary& vocab,
                              const BaselineModel& baseline);

// Throws CheckpointError on a bad format tag, unsupported version,
// missing tensors or shape mismatches; IoError when unreadable.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace evlearn
