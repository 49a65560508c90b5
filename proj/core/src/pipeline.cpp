#include "evlearn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "evlearn/rng.hpp"

namespace evlearn {

namespace {

ad::Var loss_node_for(HeadVariant v, const VarPotentials& p, const EventTuple& gold) {
  switch (v) {
    case HeadVariant::kIndependent: return loss_independent_node(p, gold);
    case HeadVariant::kJoint: return loss_joint_node(p, gold);
    case HeadVariant::kCrf: return loss_crf_node(p, gold);
  }
  throw std::logic_error("unreachable head variant");
}

void check_training_inputs(const ModelConfig& mcfg, const SlotVocabulary& vocab,
                           const std::vector<FeatureSegment>& data, const TrainConfig& tcfg) {
  if (data.empty()) throw std::invalid_argument("training set is empty");
  std::size_t rows = data.front().frames.rows();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Tensor& f = data[i].frames;
    if (f.rank() != 2 || f.cols() != mcfg.input_dim) {
      throw std::invalid_argument("segment " + std::to_string(i) + " has shape " + shape_str(f) +
                                  ", expected (frames x " + std::to_string(mcfg.input_dim) + ")");
    }
    if (f.rows() != rows) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  " has a different frame count than the first segment");
    }
    if (!vocab.in_range(data[i].gold)) {
      throw std::invalid_argument("segment " + std::to_string(i) +
                                  " carries an out-of-range gold label");
    }
  }
  if (tcfg.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (tcfg.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (!std::isfinite(tcfg.learning_rate) || tcfg.learning_rate < 0.0) {
    throw ConfigError("learning_rate must be finite and non-negative");
  }
  if (!(tcfg.keep_prob > 0.0 && tcfg.keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must lie in (0, 1]");
  }
  if (!std::isfinite(tcfg.clip_norm) || tcfg.clip_norm <= 0.0) {
    throw ConfigError("clip_norm must be finite and positive");
  }
}

}  // namespace

TrainResult train(const ModelConfig& mcfg, const SlotVocabulary& vocab,
                  const std::vector<FeatureSegment>& data, const TrainConfig& tcfg) {
  check_training_inputs(mcfg, vocab, data, tcfg);

  TrainResult result{ModelParams::init(mcfg, vocab, derive_seed(tcfg.seed, 0)), {}, 0};
  Rng shuffle_rng(derive_seed(tcfg.seed, 1));
  Rng dropout_rng(derive_seed(tcfg.seed, 2));

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n = data.size();
  const std::size_t batch = static_cast<std::size_t>(tcfg.batch_size);

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates on the sample order
      std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);
    }

    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      std::size_t end = std::min(n, begin + batch);
      ad::Graph g;
      VarParams vp = lift(g, result.params);

      std::vector<const Tensor*> blocks;
      blocks.reserve(end - begin);
      for (std::size_t k = begin; k < end; ++k) blocks.push_back(&data[order[k]].frames);

      DropoutSpec dropout{tcfg.keep_prob < 1.0, tcfg.keep_prob};
      std::array<ad::Var, kNumSlots> heads = encode(g, vp, blocks, dropout, &dropout_rng);

      VarPotentials shared = vp.edges();
      std::vector<ad::Var> losses;
      losses.reserve(end - begin);
      for (std::size_t b = 0; b < end - begin; ++b) {
        VarPotentials p = shared;
        for (std::size_t s = 0; s < kNumSlots; ++s) p.unary[s] = ad::row(heads[s], b);
        losses.push_back(loss_node_for(tcfg.variant, p, data[order[begin + b]].gold));
      }
      ad::Var root = ad::scale(ad::add_n(losses), 1.0 / double(losses.size()));

      double batch_loss = root.value().value();
      if (!std::isfinite(batch_loss)) {
        throw TrainDiverged(epoch, result.steps,
                            "training aborted: non-finite loss at epoch " +
                                std::to_string(epoch) + ", step " + std::to_string(result.steps));
      }
      g.backward(root);

      auto named = result.params.named_tensors();
      std::vector<Tensor> grads;
      grads.reserve(named.size());
      for (const ad::Var& v : vp.all) grads.push_back(v.grad());
      std::vector<Tensor*> grad_ptrs;
      grad_ptrs.reserve(grads.size());
      for (Tensor& t : grads) grad_ptrs.push_back(&t);
      clip_global_norm(grad_ptrs, tcfg.clip_norm);

      for (std::size_t i = 0; i < named.size(); ++i) {
        Tensor& param = *named[i].second;
        const Tensor& grad = grads[i];
        for (std::size_t k = 0; k < param.data.size(); ++k) {
          param.data[k] -= tcfg.learning_rate * grad.data[k];
        }
      }

      loss_sum += batch_loss * double(losses.size());
      ++result.steps;
    }

    double mean = loss_sum / double(n);
    result.epoch_losses.push_back(mean);
    if (tcfg.on_epoch) tcfg.on_epoch(epoch, mean);
  }
  return result;
}

std::vector<EventTuple> Predictor::predict_many(const std::vector<const Tensor*>& frames) {
  std::vector<EventTuple> out;
  out.reserve(frames.size());
  for (const Tensor* f : frames) out.push_back(predict_one(*f));
  return out;
}

EventTuple ModelPredictor::predict_one(const Tensor& frames) {
  return predict_many({&frames}).front();
}

std::vector<EventTuple> ModelPredictor::predict_many(const std::vector<const Tensor*>& frames) {
  std::vector<EventTuple> out;
  out.reserve(frames.size());
  const std::size_t chunk = 128;  // bound the tape size
  for (std::size_t begin = 0; begin < frames.size(); begin += chunk) {
    std::size_t end = std::min(frames.size(), begin + chunk);
    ad::Graph g;
    VarParams vp = lift(g, params_);
    std::vector<const Tensor*> blocks(frames.begin() + begin, frames.begin() + end);
    std::array<ad::Var, kNumSlots> heads = encode(g, vp, blocks, DropoutSpec{}, nullptr);

    for (std::size_t b = 0; b < end - begin; ++b) {
      PotentialTable table;
      for (std::size_t s = 0; s < kNumSlots; ++s) {
        const Tensor& m = heads[s].value();
        Tensor u = Tensor::zeros({m.cols()});
        for (std::size_t j = 0; j < m.cols(); ++j) u.data[j] = m.at(b, j);
        table.unary[s] = std::move(u);
      }
      table.edges = params_.edges;
      out.push_back(predict(variant_, table));
    }
  }
  return out;
}

BaselineModel baseline_most_frequent(const std::vector<FeatureSegment>& train) {
  if (train.empty()) throw std::invalid_argument("baseline needs a non-empty training set");
  std::map<std::array<int, 5>, std::size_t> first_seen;
  std::vector<std::pair<EventTuple, std::size_t>> counts;  // in first-seen order
  for (const FeatureSegment& seg : train) {
    std::array<int, 5> key{seg.gold.subject, seg.gold.object, seg.gold.locative, seg.gold.verb,
                           seg.gold.preposition};
    auto [it, fresh] = first_seen.try_emplace(key, counts.size());
    if (fresh) counts.push_back({seg.gold, 0});
    ++counts[it->second].second;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i].second > counts[best].second) best = i;  // ties keep the earlier tuple
  }
  BaselineModel model;
  model.tuple = counts[best].first;
  model.frequency = counts[best].second;
  model.total = train.size();
  return model;
}

double EvalReport::per_label_precision(Slot s) const {
  return total == 0 ? 0.0 : double(label_correct[static_cast<int>(s)]) / double(total);
}

double EvalReport::mean_label_precision() const {
  double acc = 0.0;
  for (Slot s : kAllSlots) acc += per_label_precision(s);
  return acc / double(kNumSlots);
}

double EvalReport::exact_precision() const {
  return total == 0 ? 0.0 : double(exact_correct) / double(total);
}

double EvalReport::invalid_rate() const {
  return total == 0 ? 0.0 : double(invalid) / double(total);
}

namespace {

nlohmann::json report_body(const EvalReport& r) {
  nlohmann::json j;
  j["total"] = r.total;
  nlohmann::json per_label;
  for (Slot s : kAllSlots) {
    nlohmann::json entry;
    entry["correct"] = r.label_correct[static_cast<int>(s)];
    entry["precision"] = r.per_label_precision(s);
    per_label[std::string(slot_name(s))] = std::move(entry);
  }
  j["per_label"] = std::move(per_label);
  j["mean_label_precision"] = r.mean_label_precision();
  j["exact_correct"] = r.exact_correct;
  j["exact_precision"] = r.exact_precision();
  j["invalid"] = r.invalid;
  j["invalid_rate"] = r.invalid_rate();
  nlohmann::json confusion;
  for (Slot s : kAllSlots) {
    std::size_t n = r.slot_sizes[static_cast<int>(s)];
    const auto& counts = r.confusion[static_cast<int>(s)];
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t g = 0; g < n; ++g) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t p = 0; p < n; ++p) row.push_back(counts[g * n + p]);
      rows.push_back(std::move(row));
    }
    confusion[std::string(slot_name(s))] = std::move(rows);
  }
  j["confusion"] = std::move(confusion);
  return j;
}

}  // namespace

std::string EvalReport::to_json_text(const std::string& variant) const {
  nlohmann::json j = report_body(*this);
  j["format"] = "evlearn.report";
  j["version"] = 1;
  j["variant"] = variant;
  return j.dump(2);
}

EvalReport evaluate(Predictor& predictor, const SlotVocabulary& vocab,
                    const std::vector<FeatureSegment>& data) {
  EvalReport report;
  report.total = data.size();
  for (Slot s : kAllSlots) {
    std::size_t n = vocab.slot_size(s);
    report.slot_sizes[static_cast<int>(s)] = n;
    report.confusion[static_cast<int>(s)].assign(n * n, 0);
  }
  std::vector<const Tensor*> frames;
  frames.reserve(data.size());
  for (const FeatureSegment& seg : data) frames.push_back(&seg.frames);
  std::vector<EventTuple> predictions = predictor.predict_many(frames);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const EventTuple& gold = data[i].gold;
    const EventTuple& guess = predictions[i];
    bool all = true;
    for (Slot s : kAllSlots) {
      int k = static_cast<int>(s);
      if (guess[s] == gold[s]) ++report.label_correct[k];
      else all = false;
      std::size_t n = report.slot_sizes[k];
      ++report.confusion[k][std::size_t(gold[s]) * n + std::size_t(guess[s])];
    }
    if (all) ++report.exact_correct;
    if (!is_valid(vocab, guess)) ++report.invalid;
  }
  return report;
}

std::string MultiRunReport::to_json_text(const std::string& variant) const {
  nlohmann::json j;
  j["format"] = "evlearn.report";
  j["version"] = 1;
  j["variant"] = variant;
  j["runs"] = nlohmann::json::array();
  for (const EvalReport& r : runs) j["runs"].push_back(report_body(r));
  j["mean_exact_precision"] = mean_exact_precision;
  j["mean_invalid_rate"] = mean_invalid_rate;
  nlohmann::json per_label;
  for (Slot s : kAllSlots) {
    per_label[std::string(slot_name(s))] = mean_per_label[static_cast<int>(s)];
  }
  j["mean_per_label"] = std::move(per_label);
  return j.dump(2);
}

MultiRunReport run_experiment(const ModelConfig& mcfg, const SlotVocabulary& vocab,
                              const std::vector<FeatureSegment>& train_set,
                              const std::vector<FeatureSegment>& test_set,
                              const TrainConfig& base, int runs) {
  if (runs < 1) throw ConfigError("runs must be at least 1");
  MultiRunReport out;
  for (int r = 0; r < runs; ++r) {
    TrainConfig tcfg = base;
    tcfg.seed = derive_seed(base.seed, static_cast<std::uint64_t>(r));
    TrainResult trained = train(mcfg, vocab, train_set, tcfg);
    ModelPredictor predictor(std::move(trained.params), base.variant);
    out.runs.push_back(evaluate(predictor, vocab, test_set));
  }
  for (const EvalReport& r : out.runs) {
    out.mean_exact_precision += r.exact_precision();
    out.mean_invalid_rate += r.invalid_rate();
    for (Slot s : kAllSlots) out.mean_per_label[static_cast<int>(s)] += r.per_label_precision(s);
  }
  out.mean_exact_precision /= double(out.runs.size());
  out.mean_invalid_rate /= double(out.runs.size());
  for (Slot s : kAllSlots) out.mean_per_label[static_cast<int>(s)] /= double(out.runs.size());
  return out;
}

void write_loss_csv(const std::string& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, losses[i]);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace evlearn
