#include <benchmark/benchmark.h>

#include <vector>

#include "evlearn/lstm.hpp"
#include "evlearn/pipeline.hpp"
#include "evlearn/rng.hpp"
#include "evlearn/structured.hpp"
#include "evlearn/synthgen.hpp"

using namespace evlearn;

namespace {

PotentialTable standard_table(std::uint64_t seed) {
  SlotVocabulary vocab = SlotVocabulary::standard();
  PotentialTable p = PotentialTable::zeros(
      vocab.slot_size(Slot::kSubject), vocab.slot_size(Slot::kObject),
      vocab.slot_size(Slot::kLocative), vocab.slot_size(Slot::kVerb),
      vocab.slot_size(Slot::kPreposition));
  Rng rng(seed);
  for (auto& u : p.unary)
    for (double& x : u.data) x = rng.uniform(-2.0, 2.0);
  for (Tensor* e : {&p.edges.start_loc, &p.edges.loc_subj, &p.edges.loc_obj, &p.edges.loc_prep,
                    &p.edges.subj_verb})
    for (double& x : e->data) x = rng.uniform(-2.0, 2.0);
  return p;
}

ModelParams desk_params(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.input_dim = 63;
  cfg.proj_dim = 64;
  cfg.hidden = 64;
  return ModelParams::init(cfg, SlotVocabulary::standard(), seed);
}

std::vector<Tensor> random_frames(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Tensor> out(count, Tensor::zeros({20, 63}));
  for (Tensor& t : out)
    for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return out;
}

void BM_LogPartition(benchmark::State& state) {
  PotentialTable p = standard_table(1);
  for (auto _ : state) benchmark::DoNotOptimize(log_partition(p));
}
BENCHMARK(BM_LogPartition);

void BM_Decode(benchmark::State& state) {
  PotentialTable p = standard_table(2);
  for (auto _ : state) benchmark::DoNotOptimize(decode(p));
}
BENCHMARK(BM_Decode);

void BM_EncodeBatch(benchmark::State& state) {
  ModelParams params = desk_params(3);
  std::vector<Tensor> frames = random_frames(std::size_t(state.range(0)), 4);
  std::vector<const Tensor*> blocks;
  for (const Tensor& t : frames) blocks.push_back(&t);
  for (auto _ : state) {
    ad::Graph g;
    VarParams vp = lift(g, params);
    auto heads = encode(g, vp, blocks, DropoutSpec{}, nullptr);
    benchmark::DoNotOptimize(heads[0].value().data[0]);
  }
}
BENCHMARK(BM_EncodeBatch)->Arg(1)->Arg(8)->Arg(32);

void BM_LossCrfBackward(benchmark::State& state) {
  ModelParams params = desk_params(5);
  std::vector<Tensor> frames = random_frames(1, 6);
  SlotVocabulary vocab = SlotVocabulary::standard();
  EventTuple gold = vocab.all_none();
  for (auto _ : state) {
    ad::Graph g;
    VarParams vp = lift(g, params);
    auto heads = encode(g, vp, {&frames[0]}, DropoutSpec{}, nullptr);
    VarPotentials pot = vp.edges();
    for (std::size_t s = 0; s < kNumSlots; ++s) pot.unary[s] = ad::row(heads[s], 0);
    ad::Var loss = loss_crf_node(pot, gold);
    g.backward(loss);
    benchmark::DoNotOptimize(vp.all[0].grad().data[0]);
  }
}
BENCHMARK(BM_LossCrfBackward);

void BM_GenerateSession(benchmark::State& state) {
  SceneSpec spec;
  spec.verb = Verb::kSlide;
  spec.preposition = Prep::kPast;
  spec.duration_frames = int(state.range(0));
  spec.rng_seed = 7;
  for (auto _ : state) benchmark::DoNotOptimize(generate_session(spec));
}
BENCHMARK(BM_GenerateSession)->Arg(60)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
