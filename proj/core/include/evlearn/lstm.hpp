#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evlearn/autodiff.hpp"
#include "evlearn/event.hpp"
#include "evlearn/rng.hpp"
#include "evlearn/structured.hpp"
#include "evlearn/tensor.hpp"

namespace evlearn {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ModelConfig {
  std::size_t input_dim = 63;   // features per frame
  std::size_t proj_dim = 128;   // linear projection width before the LSTM
  std::size_t hidden = 200;     // LSTM state size
  // LSTM-I topology switch: one shared recurrent trunk feeding five heads
  // (default), or five fully separate LSTMs, one per output slot.
  bool separate_trunks = false;
  double init_range = 0.08;     // uniform init half-width
};

// One set of gate weights. Gates read the concatenated [x; h] vector.
struct LstmWeights {
  Tensor w_input, w_forget, w_output, w_cand;  // (proj+hidden) x hidden
  Tensor b_input, b_forget, b_output, b_cand;  // (hidden)
};

struct SlotHead {
  Tensor w;  // hidden x n_labels
  Tensor b;  // n_labels
};

// All trainable state: input projection, one or five LSTM trunks, five
// slot heads and the CRF edge potentials (zero unless trained by the
// CRF head).
struct ModelParams {
  ModelConfig config;
  SlotVocabulary vocab;
  Tensor w_in, b_in;                   // input_dim x proj_dim, proj_dim
  std::vector<LstmWeights> trunks;     // size 1, or kNumSlots when separate
  std::array<SlotHead, kNumSlots> heads;
  EdgePotentials edges;

  // Uniform init in [-init_range, init_range], forget-gate bias 1.0,
  // edge potentials zero.
  static ModelParams init(const ModelConfig& cfg, const SlotVocabulary& vocab,
                          std::uint64_t seed);

  // Stable name -> tensor enumeration; drives lifting, the update loop
  // and checkpoint io.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;

  bool all_finite() const;
};

// Inverted-dropout mask: each unit is 1/keep_prob with probability
// keep_prob, else 0. Throws ConfigError unless 0 < keep_prob <= 1.
Tensor dropout_mask(const std::vector<std::size_t>& shape, double keep_prob, Rng& rng);

// Applies inverted dropout; keep_prob == 1 returns the input unchanged
// without consuming randomness.
Tensor apply_dropout(const Tensor& h, double keep_prob, Rng& rng);

// One LSTM step on a (batch x proj_dim) input block:
//   i,f,o = sigmoid([x;h] W + b), g = tanh([x;h] W + b),
//   c' = f*c + i*g, h' = o*tanh(c').
struct LstmState {
  ad::Var h, c;  // each (batch x hidden)
};
LstmState lstm_cell(ad::Graph& g, const LstmWeights& w, ad::Var x, LstmState state);

// Graph-lifted parameters, in named_tensors() order.
struct VarParams {
  ModelConfig config;
  ad::Var w_in, b_in;
  struct VarLstm {
    ad::Var w_input, w_forget, w_output, w_cand;
    ad::Var b_input, b_forget, b_output, b_cand;
  };
  std::vector<VarLstm> trunks;
  struct VarHead {
    ad::Var w, b;
  };
  std::array<VarHead, kNumSlots> heads;
  VarPotentials edges() const;          // unaries unset; edge vars only
  ad::Var edge_start_loc, edge_loc_subj, edge_loc_obj, edge_loc_prep, edge_subj_verb;
  std::vector<ad::Var> all;             // named_tensors() order
};

VarParams lift(ad::Graph& g, const ModelParams& params);

// Gate computation on already-lifted weights; lstm_cell wraps this with
// constant weights for standalone use.
LstmState lstm_cell_vars(const VarParams::VarLstm& w, ad::Var x, LstmState state);

struct DropoutSpec {
  bool active = false;
  double keep_prob = 1.0;
};

// Encodes a batch of equally shaped frame blocks (each frames x input_dim)
// through projection + recurrence from a zero state, optional dropout on
// the final hidden state, and the five slot heads. Returns one
// (batch x n_labels) unary score matrix per slot.
std::array<ad::Var, kNumSlots> encode(ad::Graph& g, const VarParams& p,
                                      const std::vector<const Tensor*>& frame_blocks,
                                      DropoutSpec dropout, Rng* rng);

// Single-sample convenience: runs encode with batch 1 and copies the scores
// and the model's edge potentials into a PotentialTable.
PotentialTable potentials_for(const ModelParams& params, const Tensor& frames);

// Rescales every gradient by threshold/norm when the joint euclidean
// norm exceeds the threshold. Returns the pre-clip global norm.
double clip_global_norm(std::vector<Tensor*> grads, double threshold);

}  // namespace evlearn
