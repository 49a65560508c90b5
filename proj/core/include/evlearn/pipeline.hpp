#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "evlearn/checkpoint.hpp"
#include "evlearn/dataset.hpp"
#include "evlearn/lstm.hpp"
#include "evlearn/structured.hpp"

namespace evlearn {

// Raised when a training step produces a non-finite loss; carries the
// epoch and step for the abort message.
class TrainDiverged : public std::runtime_error {
 public:
  TrainDiverged(int epoch, int step, const std::string& what)
      : std::runtime_error(what), epoch_(epoch), step_(step) {}
  int epoch() const { return epoch_; }
  int step() const { return step_; }

 private:
  int epoch_, step_;
};

struct TrainConfig {
  HeadVariant variant = HeadVariant::kCrf;
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.05;
  double keep_prob = 0.8;   // inverted dropout on the head input
  double clip_norm = 5.0;   // global-norm gradient clip
  std::uint64_t seed = 42;
  // Called after each epoch with (epoch, mean loss); may be empty.
  std::function<void(int, double)> on_epoch;
};

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_losses;  // mean per-segment loss, one per epoch
  int steps = 0;                     // optimizer updates taken
};

// Mini-batch SGD from a fresh ModelParams::init. Deterministic given
// (config, data order, seed): one derived stream each for init, epoch
// shuffling and dropout.
TrainResult train(const ModelConfig& mcfg, const SlotVocabulary& vocab,
                  const std::vector<FeatureSegment>& data, const TrainConfig& tcfg);

// --- prediction --------------------------------------------------------------

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual EventTuple predict_one(const Tensor& frames) = 0;
  // Default implementation loops; ModelPredictor batches the encoder pass.
  virtual std::vector<EventTuple> predict_many(const std::vector<const Tensor*>& frames);
};

class ModelPredictor : public Predictor {
 public:
  ModelPredictor(ModelParams params, HeadVariant variant)
      : params_(std::move(params)), variant_(variant) {}

  EventTuple predict_one(const Tensor& frames) override;
  std::vector<EventTuple> predict_many(const std::vector<const Tensor*>& frames) override;

  const ModelParams& params() const { return params_; }
  HeadVariant variant() const { return variant_; }

 private:
  ModelParams params_;
  HeadVariant variant_;
};

// Emits one fixed tuple; the baseline and a handy test double.
class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(EventTuple tuple) : tuple_(tuple) {}
  EventTuple predict_one(const Tensor&) override { return tuple_; }

 private:
  EventTuple tuple_;
};

// Modal gold tuple of the training set; ties go to the tuple seen first.
// Throws std::invalid_argument on an empty set.
BaselineModel baseline_most_frequent(const std::vector<FeatureSegment>& train);

// --- evaluation ---------------------------------------------------------------

struct EvalReport {
  std::size_t total = 0;
  std::array<std::size_t, kNumSlots> label_correct{};
  std::size_t exact_correct = 0;  // full five-slot match
  std::size_t invalid = 0;        // predictions failing the output constraints
  std::array<std::size_t, kNumSlots> slot_sizes{};
  // Per slot: n x n counts flattened row-major, row = gold, column = predicted.
  std::array<std::vector<std::size_t>, kNumSlots> confusion;

  double per_label_precision(Slot s) const;
  double mean_label_precision() const;
  double exact_precision() const;
  double invalid_rate() const;
  std::string to_json_text(const std::string& variant) const;
};

EvalReport evaluate(Predictor& predictor, const SlotVocabulary& vocab,
                    const std::vector<FeatureSegment>& data);

// Trains `runs` models that differ only in their derived seed, evaluates
// each on the test split, and averages the headline metrics.
struct MultiRunReport {
  std::vector<EvalReport> runs;
  double mean_exact_precision = 0.0;
  double mean_invalid_rate = 0.0;
  std::array<double, kNumSlots> mean_per_label{};
  std::string to_json_text(const std::string& variant) const;
};

MultiRunReport run_experiment(const ModelConfig& mcfg, const SlotVocabulary& vocab,
                              const std::vector<FeatureSegment>& train_set,
                              const std::vector<FeatureSegment>& test_set,
                              const TrainConfig& base, int runs);

// One "loss" column, one row per epoch, for plotting.
void write_loss_csv(const std::string& path, const std::vector<double>& losses);

}  // namespace evlearn
