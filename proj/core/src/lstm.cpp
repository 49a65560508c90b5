#include "evlearn/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace evlearn {

namespace {

void fill_uniform(Tensor& t, double range, Rng& rng) {
  for (double& v : t.data) v = rng.uniform(-range, range);
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, const SlotVocabulary& vocab,
                              std::uint64_t seed) {
  if (cfg.input_dim == 0 || cfg.proj_dim == 0 || cfg.hidden == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  ModelParams p{cfg, vocab, {}, {}, {}, {}, {}};
  std::size_t gate_in = cfg.proj_dim + cfg.hidden;
  p.w_in = Tensor::zeros({cfg.input_dim, cfg.proj_dim});
  p.b_in = Tensor::zeros({cfg.proj_dim});
  std::size_t n_trunks = cfg.separate_trunks ? kNumSlots : 1;
  for (std::size_t k = 0; k < n_trunks; ++k) {
    LstmWeights w;
    w.w_input = Tensor::zeros({gate_in, cfg.hidden});
    w.w_forget = Tensor::zeros({gate_in, cfg.hidden});
    w.w_output = Tensor::zeros({gate_in, cfg.hidden});
    w.w_cand = Tensor::zeros({gate_in, cfg.hidden});
    w.b_input = Tensor::zeros({cfg.hidden});
    w.b_forget = Tensor::zeros({cfg.hidden});
    w.b_output = Tensor::zeros({cfg.hidden});
    w.b_cand = Tensor::zeros({cfg.hidden});
    p.trunks.push_back(std::move(w));
  }
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    std::size_t n = vocab.slot_size(kAllSlots[k]);
    p.heads[k].w = Tensor::zeros({cfg.hidden, n});
    p.heads[k].b = Tensor::zeros({n});
  }
  p.edges = EdgePotentials::zeros(
      vocab.slot_size(Slot::kSubject), vocab.slot_size(Slot::kObject),
      vocab.slot_size(Slot::kLocative), vocab.slot_size(Slot::kVerb),
      vocab.slot_size(Slot::kPreposition));

  Rng rng(seed);
  for (auto& [name, tensor] : p.named_tensors()) {
    if (name.starts_with("edge_")) continue;  // zero until the CRF head trains them
    if (name.find("b_forget") != std::string::npos) {
      for (double& v : tensor->data) v = 1.0;
      continue;
    }
    fill_uniform(*tensor, cfg.init_range, rng);
  }
  return p;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  std::vector<std::pair<std::string, Tensor*>> out;
  out.emplace_back("w_in", &w_in);
  out.emplace_back("b_in", &b_in);
  for (std::size_t k = 0; k < trunks.size(); ++k) {
    std::string prefix = trunks.size() == 1 ? "lstm." : "lstm" + std::to_string(k) + ".";
    LstmWeights& w = trunks[k];
    out.emplace_back(prefix + "w_input", &w.w_input);
    out.emplace_back(prefix + "w_forget", &w.w_forget);
    out.emplace_back(prefix + "w_output", &w.w_output);
    out.emplace_back(prefix + "w_cand", &w.w_cand);
    out.emplace_back(prefix + "b_input", &w.b_input);
    out.emplace_back(prefix + "b_forget", &w.b_forget);
    out.emplace_back(prefix + "b_output", &w.b_output);
    out.emplace_back(prefix + "b_cand", &w.b_cand);
  }
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    std::string prefix = std::string("head_") + slot_name(kAllSlots[k]) + ".";
    out.emplace_back(prefix + "w", &heads[k].w);
    out.emplace_back(prefix + "b", &heads[k].b);
  }
  out.emplace_back("edge_start_loc", &edges.start_loc);
  out.emplace_back("edge_loc_subj", &edges.loc_subj);
  out.emplace_back("edge_loc_obj", &edges.loc_obj);
  out.emplace_back("edge_loc_prep", &edges.loc_prep);
  out.emplace_back("edge_subj_verb", &edges.subj_verb);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  auto mut = const_cast<ModelParams*>(this)->named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(mut.size());
  for (auto& [n, t] : mut) out.emplace_back(n, t);
  return out;
}

bool ModelParams::all_finite() const {
  for (auto& [name, t] : named_tensors()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

Tensor dropout_mask(const std::vector<std::size_t>& shape, double keep_prob, Rng& rng) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must be in (0, 1], got " + std::to_string(keep_prob));
  }
  Tensor mask = Tensor::zeros(shape);
  double inv = 1.0 / keep_prob;
  for (double& v : mask.data) v = rng.uniform() < keep_prob ? inv : 0.0;
  return mask;
}

Tensor apply_dropout(const Tensor& h, double keep_prob, Rng& rng) {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must be in (0, 1], got " + std::to_string(keep_prob));
  }
  if (keep_prob == 1.0) return h;
  Tensor mask = dropout_mask(h.shape, keep_prob, rng);
  Tensor out = h;
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= mask.data[i];
  return out;
}

LstmState lstm_cell(ad::Graph& g, const LstmWeights& w, ad::Var x, LstmState state) {
  VarParams::VarLstm vw{g.constant(w.w_input),  g.constant(w.w_forget),
                        g.constant(w.w_output), g.constant(w.w_cand),
                        g.constant(w.b_input),  g.constant(w.b_forget),
                        g.constant(w.b_output), g.constant(w.b_cand)};
  return lstm_cell_vars(vw, x, state);
}

LstmState lstm_cell_vars(const VarParams::VarLstm& w, ad::Var x, LstmState state) {
  using namespace ad;
  Var xh = concat(x, state.h);
  Var gate_i = sigmoid(add_row_broadcast(matmul(xh, w.w_input), w.b_input));
  Var gate_f = sigmoid(add_row_broadcast(matmul(xh, w.w_forget), w.b_forget));
  Var gate_o = sigmoid(add_row_broadcast(matmul(xh, w.w_output), w.b_output));
  Var cand = tanh(add_row_broadcast(matmul(xh, w.w_cand), w.b_cand));
  Var c_next = add(mul(gate_f, state.c), mul(gate_i, cand));
  Var h_next = mul(gate_o, tanh(c_next));
  return LstmState{h_next, c_next};
}

VarPotentials VarParams::edges() const {
  VarPotentials vp;
  vp.start_loc = edge_start_loc;
  vp.loc_subj = edge_loc_subj;
  vp.loc_obj = edge_loc_obj;
  vp.loc_prep = edge_loc_prep;
  vp.subj_verb = edge_subj_verb;
  return vp;
}

VarParams lift(ad::Graph& g, const ModelParams& params) {
  VarParams vp;
  vp.config = params.config;
  auto named = params.named_tensors();
  std::vector<ad::Var> vars;
  vars.reserve(named.size());
  for (auto& [name, t] : named) vars.push_back(g.leaf(*t));
  vp.all = vars;

  std::size_t i = 0;
  vp.w_in = vars[i++];
  vp.b_in = vars[i++];
  for (std::size_t k = 0; k < params.trunks.size(); ++k) {
    VarParams::VarLstm w;
    w.w_input = vars[i++];
    w.w_forget = vars[i++];
    w.w_output = vars[i++];
    w.w_cand = vars[i++];
    w.b_input = vars[i++];
    w.b_forget = vars[i++];
    w.b_output = vars[i++];
    w.b_cand = vars[i++];
    vp.trunks.push_back(w);
  }
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    vp.heads[k].w = vars[i++];
    vp.heads[k].b = vars[i++];
  }
  vp.edge_start_loc = vars[i++];
  vp.edge_loc_subj = vars[i++];
  vp.edge_loc_obj = vars[i++];
  vp.edge_loc_prep = vars[i++];
  vp.edge_subj_verb = vars[i++];
  return vp;
}

std::array<ad::Var, kNumSlots> encode(ad::Graph& g, const VarParams& p,
                                      const std::vector<const Tensor*>& frame_blocks,
                                      DropoutSpec dropout, Rng* rng) {
  using namespace ad;
  if (frame_blocks.empty()) throw ShapeError("encode: empty batch");
  const Tensor& first = *frame_blocks[0];
  if (first.rank() != 2 || first.cols() != p.config.input_dim) {
    throw ShapeError("encode: frame block must be (frames x " +
                     std::to_string(p.config.input_dim) + "), got " + shape_str(first));
  }
  std::size_t n_frames = first.rows();
  std::size_t batch = frame_blocks.size();
  for (const Tensor* t : frame_blocks) {
    if (!t->same_shape(first)) {
      throw ShapeError("encode: inconsistent frame blocks " + shape_str(first) + " vs " +
                       shape_str(*t));
    }
  }
  if (dropout.active && rng == nullptr) {
    throw ConfigError("encode: dropout requires a random source");
  }

  // project all frames, one (batch x input_dim) block per time step
  std::vector<Var> projected;
  projected.reserve(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    Tensor x = Tensor::zeros({batch, p.config.input_dim});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t j = 0; j < p.config.input_dim; ++j) {
        x.at(b, j) = frame_blocks[b]->at(t, j);
      }
    }
    projected.push_back(add_row_broadcast(matmul(g.constant(std::move(x)), p.w_in), p.b_in));
  }

  // recurrence from zero state, one pass per trunk
  std::vector<Var> finals;
  for (std::size_t k = 0; k < p.trunks.size(); ++k) {
    LstmState st{g.constant(Tensor::zeros({batch, p.config.hidden})),
                 g.constant(Tensor::zeros({batch, p.config.hidden}))};
    for (std::size_t t = 0; t < n_frames; ++t) {
      st = lstm_cell_vars(p.trunks[k], projected[t], st);
    }
    Var h = st.h;
    if (dropout.active && dropout.keep_prob < 1.0) {
      h = mul(h, g.constant(dropout_mask({batch, p.config.hidden}, dropout.keep_prob, *rng)));
    }
    finals.push_back(h);
  }

  std::array<Var, kNumSlots> scores;
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    Var h = p.config.separate_trunks ? finals[k] : finals[0];
    scores[k] = add_row_broadcast(matmul(h, p.heads[k].w), p.heads[k].b);
  }
  return scores;
}

PotentialTable potentials_for(const ModelParams& params, const Tensor& frames) {
  ad::Graph g;
  VarParams vp = lift(g, params);
  auto scores = encode(g, vp, {&frames}, DropoutSpec{}, nullptr);
  PotentialTable table;
  for (std::size_t k = 0; k < kNumSlots; ++k) {
    const Tensor& s = scores[k].value();
    Tensor u = Tensor::zeros({s.cols()});
    for (std::size_t j = 0; j < s.cols(); ++j) u.at(j) = s.at(0, j);
    table.unary[k] = std::move(u);
  }
  table.edges = params.edges;
  return table;
}

double clip_global_norm(std::vector<Tensor*> grads, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("clip threshold must be positive");
  double ssq = 0.0;
  for (const Tensor* t : grads) {
    for (double v : t->data) ssq += v * v;
  }
  double norm = std::sqrt(ssq);
  if (norm > threshold) {
    double factor = threshold / norm;
    for (Tensor* t : grads) {
      for (double& v : t->data) v *= factor;
    }
  }
  return norm;
}

}  // namespace evlearn
