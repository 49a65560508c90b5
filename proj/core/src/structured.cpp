#include "evlearn/structured.hpp"

#include <stdexcept>

namespace evlearn {

EdgePotentials EdgePotentials::zeros(std::size_t n_subj, std::size_t n_obj,
                                     std::size_t n_loc, std::size_t n_verb,
                                     std::size_t n_prep) {
  EdgePotentials e;
  e.start_loc = Tensor::zeros({n_loc});
  e.loc_subj = Tensor::zeros({n_loc, n_subj});
  e.loc_obj = Tensor::zeros({n_loc, n_obj});
  e.loc_prep = Tensor::zeros({n_loc, n_prep});
  e.subj_verb = Tensor::zeros({n_subj, n_verb});
  return e;
}

PotentialTable PotentialTable::zeros(std::size_t n_subj, std::size_t n_obj,
                                     std::size_t n_loc, std::size_t n_verb,
                                     std::size_t n_prep) {
  PotentialTable p;
  p.unary[static_cast<int>(Slot::kSubject)] = Tensor::zeros({n_subj});
  p.unary[static_cast<int>(Slot::kObject)] = Tensor::zeros({n_obj});
  p.unary[static_cast<int>(Slot::kLocative)] = Tensor::zeros({n_loc});
  p.unary[static_cast<int>(Slot::kVerb)] = Tensor::zeros({n_verb});
  p.unary[static_cast<int>(Slot::kPreposition)] = Tensor::zeros({n_prep});
  p.edges = EdgePotentials::zeros(n_subj, n_obj, n_loc, n_verb, n_prep);
  return p;
}

namespace {
const Tensor& unary(const PotentialTable& p, Slot s) {
  return p.unary[static_cast<int>(s)];
}
}  // namespace

double tuple_score(const PotentialTable& p, const EventTuple& t) {
  // fixed term order: the five unaries (l,s,o,p,v) then the five edges
  double sc = unary(p, Slot::kLocative).at(t.locative);
  sc += unary(p, Slot::kSubject).at(t.subject);
  sc += unary(p, Slot::kObject).at(t.object);
  sc += unary(p, Slot::kPreposition).at(t.preposition);
  sc += unary(p, Slot::kVerb).at(t.verb);
  sc += p.edges.start_loc.at(t.locative);
  sc += p.edges.loc_subj.at(t.locative, t.subject);
  sc += p.edges.loc_obj.at(t.locative, t.object);
  sc += p.edges.loc_prep.at(t.locative, t.preposition);
  sc += p.edges.subj_verb.at(t.subject, t.verb);
  return sc;
}

double log_partition(const PotentialTable& p) {
  ad::Graph g;
  VarPotentials vp = lift(g, p);
  return log_partition_node(vp).value().value();
}

Decoded decode(const PotentialTable& p) {
  const Tensor& ts = unary(p, Slot::kSubject);
  const Tensor& to = unary(p, Slot::kObject);
  const Tensor& tl = unary(p, Slot::kLocative);
  const Tensor& tv = unary(p, Slot::kVerb);
  const Tensor& tp = unary(p, Slot::kPreposition);
  std::size_t n_s = ts.numel(), n_o = to.numel(), n_l = tl.numel(), n_v = tv.numel(),
              n_p = tp.numel();

  // running max with ascending scan and strict '>' keeps the lowest index on ties
  auto arg_max = [](const std::vector<double>& xs) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (xs[i] > xs[best]) best = i;
    }
    return best;
  };

  // VERB message into SUBJ
  std::vector<double> max_v(n_s);
  std::vector<std::size_t> bp_v(n_s);
  for (std::size_t s = 0; s < n_s; ++s) {
    std::vector<double> cand(n_v);
    for (std::size_t v = 0; v < n_v; ++v) cand[v] = tv.at(v) + p.edges.subj_verb.at(s, v);
    bp_v[s] = arg_max(cand);
    max_v[s] = cand[bp_v[s]];
  }

  // SUBJ, OBJ, PREP messages into LOC
  std::vector<double> max_s(n_l), max_o(n_l), max_p(n_l);
  std::vector<std::size_t> bp_s(n_l), bp_o(n_l), bp_p(n_l);
  for (std::size_t l = 0; l < n_l; ++l) {
    std::vector<double> cs(n_s), co(n_o), cp(n_p);
    for (std::size_t s = 0; s < n_s; ++s)
      cs[s] = ts.at(s) + p.edges.loc_subj.at(l, s) + max_v[s];
    for (std::size_t o = 0; o < n_o; ++o) co[o] = to.at(o) + p.edges.loc_obj.at(l, o);
    for (std::size_t q = 0; q < n_p; ++q) cp[q] = tp.at(q) + p.edges.loc_prep.at(l, q);
    bp_s[l] = arg_max(cs);
    max_s[l] = cs[bp_s[l]];
    bp_o[l] = arg_max(co);
    max_o[l] = co[bp_o[l]];
    bp_p[l] = arg_max(cp);
    max_p[l] = cp[bp_p[l]];
  }

  std::vector<double> root(n_l);
  for (std::size_t l = 0; l < n_l; ++l) {
    root[l] = tl.at(l) + p.edges.start_loc.at(l) + max_s[l] + max_o[l] + max_p[l];
  }
  std::size_t l_star = arg_max(root);

  Decoded d;
  d.tuple.locative = static_cast<int>(l_star);
  d.tuple.subject = static_cast<int>(bp_s[l_star]);
  d.tuple.object = static_cast<int>(bp_o[l_star]);
  d.tuple.preposition = static_cast<int>(bp_p[l_star]);
  d.tuple.verb = static_cast<int>(bp_v[bp_s[l_star]]);
  d.score = tuple_score(p, d.tuple);
  return d;
}

double loss_crf(const PotentialTable& p, const EventTuple& gold) {
  ad::Graph g;
  VarPotentials vp = lift(g, p);
  return loss_crf_node(vp, gold).value().value();
}

double loss_joint(const PotentialTable& p, const EventTuple& gold) {
  ad::Graph g;
  VarPotentials vp = lift(g, p);
  return loss_joint_node(vp, gold).value().value();
}

double loss_independent(const PotentialTable& p, const EventTuple& gold) {
  ad::Graph g;
  VarPotentials vp = lift(g, p);
  return loss_independent_node(vp, gold).value().value();
}

HeadVariant parse_head_variant(const std::string& name) {
  if (name == "lstm_i") return HeadVariant::kIndependent;
  if (name == "lstm_w") return HeadVariant::kJoint;
  if (name == "lstm_crf") return HeadVariant::kCrf;
  throw std::invalid_argument("unknown head variant: " + name);
}

const char* head_variant_name(HeadVariant v) {
  switch (v) {
    case HeadVariant::kIndependent: return "lstm_i";
    case HeadVariant::kJoint: return "lstm_w";
    case HeadVariant::kCrf: return "lstm_crf";
  }
  return "?";
}

EventTuple predict(HeadVariant variant, const PotentialTable& p) {
  if (variant == HeadVariant::kCrf) return decode(p).tuple;
  EventTuple t;
  for (Slot s : kAllSlots) {
    const Tensor& u = unary(p, s);
    int best = 0;
    for (std::size_t i = 1; i < u.numel(); ++i) {
      if (u.at(i) > u.at(best)) best = static_cast<int>(i);
    }
    t[s] = best;
  }
  return t;
}

VarPotentials lift(ad::Graph& g, const PotentialTable& p) {
  VarPotentials vp;
  for (std::size_t i = 0; i < kNumSlots; ++i) vp.unary[i] = g.leaf(p.unary[i]);
  vp.start_loc = g.leaf(p.edges.start_loc);
  vp.loc_subj = g.leaf(p.edges.loc_subj);
  vp.loc_obj = g.leaf(p.edges.loc_obj);
  vp.loc_prep = g.leaf(p.edges.loc_prep);
  vp.subj_verb = g.leaf(p.edges.subj_verb);
  return vp;
}

namespace {
ad::Var slot_unary(const VarPotentials& p, Slot s) {
  return p.unary[static_cast<int>(s)];
}
}  // namespace

ad::Var tuple_score_node(const VarPotentials& p, const EventTuple& t) {
  using ad::pick;
  using ad::row;
  std::vector<ad::Var> terms = {
      pick(slot_unary(p, Slot::kLocative), t.locative),
      pick(slot_unary(p, Slot::kSubject), t.subject),
      pick(slot_unary(p, Slot::kObject), t.object),
      pick(slot_unary(p, Slot::kPreposition), t.preposition),
      pick(slot_unary(p, Slot::kVerb), t.verb),
      pick(p.start_loc, t.locative),
      pick(row(p.loc_subj, t.locative), t.subject),
      pick(row(p.loc_obj, t.locative), t.object),
      pick(row(p.loc_prep, t.locative), t.preposition),
      pick(row(p.subj_verb, t.subject), t.verb),
  };
  return ad::add_n(terms);
}

// Upward pass over the tree START->LOC->{SUBJ->VERB, OBJ, PREP}: each child
// folds its unaries (plus any grandchild message) through the pairwise edge
// matrix with a row-wise log-sum-exp, so only pairwise tables are touched.
ad::Var log_partition_node(const VarPotentials& p) {
  using namespace ad;
  Var msg_verb = lse_rows(add_row_broadcast(p.subj_verb, slot_unary(p, Slot::kVerb)));
  Var msg_subj = lse_rows(
      add_row_broadcast(p.loc_subj, add(slot_unary(p, Slot::kSubject), msg_verb)));
  Var msg_obj = lse_rows(add_row_broadcast(p.loc_obj, slot_unary(p, Slot::kObject)));
  Var msg_prep = lse_rows(add_row_broadcast(p.loc_prep, slot_unary(p, Slot::kPreposition)));
  Var root = add_n({slot_unary(p, Slot::kLocative), p.start_loc, msg_subj, msg_obj, msg_prep});
  return log_sum_exp(root);
}

ad::Var loss_crf_node(const VarPotentials& p, const EventTuple& gold) {
  return ad::sub(log_partition_node(p), tuple_score_node(p, gold));
}

ad::Var loss_joint_node(const VarPotentials& p, const EventTuple& gold) {
  std::vector<ad::Var> lses, picks;
  for (Slot s : kAllSlots) {
    lses.push_back(ad::log_sum_exp(slot_unary(p, s)));
    picks.push_back(ad::pick(slot_unary(p, s), gold[s]));
  }
  return ad::sub(ad::add_n(lses), ad::add_n(picks));
}

ad::Var loss_independent_node(const VarPotentials& p, const EventTuple& gold) {
  std::vector<ad::Var> terms;
  for (Slot s : kAllSlots) {
    ad::Var u = slot_unary(p, s);
    terms.push_back(ad::sub(ad::log_sum_exp(u), ad::pick(u, gold[s])));
  }
  return ad::add_n(terms);
}

}  // namespace evlearn
