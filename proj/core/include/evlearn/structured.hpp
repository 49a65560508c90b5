#pragma once

#include <array>
#include <string>

#include "evlearn/autodiff.hpp"
#include "evlearn/event.hpp"
#include "evlearn/tensor.hpp"

namespace evlearn {

// Pairwise score matrices on the tree edges
// START->LOC, LOC->SUBJ, LOC->OBJ, LOC->PREP, SUBJ->VERB.
struct EdgePotentials {
  Tensor start_loc;  // (n_loc)
  Tensor loc_subj;   // (n_loc x n_subj)
  Tensor loc_obj;    // (n_loc x n_obj)
  Tensor loc_prep;   // (n_loc x n_prep)
  Tensor subj_verb;  // (n_subj x n_verb)

  static EdgePotentials zeros(std::size_t n_subj, std::size_t n_obj, std::size_t n_loc,
                              std::size_t n_verb, std::size_t n_prep);
};

// Per-sample unary score vectors plus the (shared, trained) edge scores.
struct PotentialTable {
  std::array<Tensor, kNumSlots> unary;  // indexed by Slot, each rank-1
  EdgePotentials edges;

  static PotentialTable zeros(std::size_t n_subj, std::size_t n_obj, std::size_t n_loc,
                              std::size_t n_verb, std::size_t n_prep);
  std::size_t slot_size(Slot s) const { return unary[static_cast<int>(s)].numel(); }
};

// Sum of the five unaries and five edge potentials for one tuple.
double tuple_score(const PotentialTable& p, const EventTuple& t);

// log sum over all tuples of exp(tuple_score), via the tree factorization.
// Cost is the sum of pairwise table sizes, never the full n^5 product.
double log_partition(const PotentialTable& p);

struct Decoded {
  EventTuple tuple;
  double score = 0.0;
};

// Max-product message passing with backpointers. Ties broken toward the
// lowest label index at every argmax. The returned score is tuple_score
// of the returned tuple, recomputed, so the two agree exactly.
Decoded decode(const PotentialTable& p);

// --- loss heads -------------------------------------------------------------

// LSTM-CRF: log_partition(p) - tuple_score(p, gold).
double loss_crf(const PotentialTable& p, const EventTuple& gold);

// LSTM-W: joint normalization over the sum of unaries (edges absent);
// the log-partition factorizes as sum over slots of log_sum_exp(unary).
double loss_joint(const PotentialTable& p, const EventTuple& gold);

// LSTM-I: sum over slots of per-slot softmax cross-entropy.
double loss_independent(const PotentialTable& p, const EventTuple& gold);

enum class HeadVariant { kIndependent, kJoint, kCrf };

// "lstm_i" / "lstm_w" / "lstm_crf" -> variant; throws std::invalid_argument
// on anything else.
HeadVariant parse_head_variant(const std::string& name);
const char* head_variant_name(HeadVariant v);

// I and W reduce to the per-slot argmax of the unaries; CRF decodes the tree.
EventTuple predict(HeadVariant variant, const PotentialTable& p);

// --- differentiable versions (graph nodes) ----------------------------------

// PotentialTable with every tensor lifted onto a graph.
struct VarPotentials {
  std::array<ad::Var, kNumSlots> unary;
  ad::Var start_loc, loc_subj, loc_obj, loc_prep, subj_verb;
};

VarPotentials lift(ad::Graph& g, const PotentialTable& p);

ad::Var tuple_score_node(const VarPotentials& p, const EventTuple& t);
ad::Var log_partition_node(const VarPotentials& p);
ad::Var loss_crf_node(const VarPotentials& p, const EventTuple& gold);
ad::Var loss_joint_node(const VarPotentials& p, const EventTuple& gold);
ad::Var loss_independent_node(const VarPotentials& p, const EventTuple& gold);

}  // namespace evlearn
