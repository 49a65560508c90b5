#pragma once

// Shared fixtures: random potential tables and the brute-force enumeration
// oracles the message-passing implementations are checked against.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "evlearn/event.hpp"
#include "evlearn/rng.hpp"
#include "evlearn/structured.hpp"

namespace evtest {

struct Sizes {
  std::size_t subj, obj, loc, verb, prep;
};

// (loc, subj, obj, verb, prep) = (3, 4, 3, 4, 5): 720 tuples.
inline constexpr Sizes kMixedSizes{4, 3, 3, 4, 5};

inline evlearn::PotentialTable random_table(evlearn::Rng& rng, Sizes n, double lo = -2.0,
                                            double hi = 2.0) {
  evlearn::PotentialTable p =
      evlearn::PotentialTable::zeros(n.subj, n.obj, n.loc, n.verb, n.prep);
  for (auto& u : p.unary)
    for (double& x : u.data) x = rng.uniform(lo, hi);
  for (evlearn::Tensor* e : {&p.edges.start_loc, &p.edges.loc_subj, &p.edges.loc_obj,
                             &p.edges.loc_prep, &p.edges.subj_verb})
    for (double& x : e->data) x = rng.uniform(lo, hi);
  return p;
}

inline Sizes random_sizes(evlearn::Rng& rng, std::size_t max_size = 6) {
  auto draw = [&] { return 1 + rng.uniform_index(max_size); };
  return {draw(), draw(), draw(), draw(), draw()};
}

template <typename Fn>
void for_each_tuple(const evlearn::PotentialTable& p, Fn&& fn) {
  using evlearn::EventTuple;
  using evlearn::Slot;
  std::size_t n_s = p.slot_size(Slot::kSubject), n_o = p.slot_size(Slot::kObject),
              n_l = p.slot_size(Slot::kLocative), n_v = p.slot_size(Slot::kVerb),
              n_p = p.slot_size(Slot::kPreposition);
  EventTuple t;
  // Locative outermost and verb after subject mirrors decode's tie-break.
  for (t.locative = 0; t.locative < int(n_l); ++t.locative)
    for (t.subject = 0; t.subject < int(n_s); ++t.subject)
      for (t.object = 0; t.object < int(n_o); ++t.object)
        for (t.preposition = 0; t.preposition < int(n_p); ++t.preposition)
          for (t.verb = 0; t.verb < int(n_v); ++t.verb) fn(t);
}

inline double brute_logZ(const evlearn::PotentialTable& p) {
  double max_score = -1e300;
  for_each_tuple(p, [&](const evlearn::EventTuple& t) {
    max_score = std::max(max_score, tuple_score(p, t));
  });
  double acc = 0.0;
  for_each_tuple(p, [&](const evlearn::EventTuple& t) {
    acc += std::exp(tuple_score(p, t) - max_score);
  });
  return max_score + std::log(acc);
}

inline evlearn::Decoded brute_decode(const evlearn::PotentialTable& p) {
  evlearn::Decoded best;
  bool first = true;
  for_each_tuple(p, [&](const evlearn::EventTuple& t) {
    double s = tuple_score(p, t);
    if (first || s > best.score) {
      best = {t, s};
      first = false;
    }
  });
  return best;
}

inline evlearn::EventTuple random_tuple(evlearn::Rng& rng, const evlearn::PotentialTable& p) {
  evlearn::EventTuple t;
  for (evlearn::Slot s : evlearn::kAllSlots) {
    t[s] = static_cast<int>(rng.uniform_index(p.slot_size(s)));
  }
  return t;
}

// Tuple from label names in (subject, object, locative, verb, preposition) order.
inline evlearn::EventTuple tuple_of(const evlearn::SlotVocabulary& v, const std::string& subj,
                                    const std::string& obj, const std::string& loc,
                                    const std::string& verb, const std::string& prep) {
  using evlearn::Slot;
  evlearn::EventTuple t;
  t.subject = v.index_of(Slot::kSubject, subj);
  t.object = v.index_of(Slot::kObject, obj);
  t.locative = v.index_of(Slot::kLocative, loc);
  t.verb = v.index_of(Slot::kVerb, verb);
  t.preposition = v.index_of(Slot::kPreposition, prep);
  return t;
}

}  // namespace evtest
