#include "evlearn/event.hpp"

#include <algorithm>
#include <stdexcept>

namespace evlearn {

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::kSubject: return "subject";
    case Slot::kObject: return "object";
    case Slot::kLocative: return "locative";
    case Slot::kVerb: return "verb";
    case Slot::kPreposition: return "preposition";
  }
  return "?";
}

int& EventTuple::operator[](Slot s) {
  switch (s) {
    case Slot::kSubject: return subject;
    case Slot::kObject: return object;
    case Slot::kLocative: return locative;
    case Slot::kVerb: return verb;
    case Slot::kPreposition: return preposition;
  }
  throw std::logic_error("bad slot");
}

int EventTuple::operator[](Slot s) const {
  return const_cast<EventTuple&>(*this)[s];
}

SlotVocabulary::SlotVocabulary(std::vector<std::string> symbols,
                               std::array<std::vector<int>, kNumSlots> slots)
    : symbols_(std::move(symbols)), slots_(std::move(slots)) {
  auto it = std::find(symbols_.begin(), symbols_.end(), "None");
  if (it == symbols_.end()) throw std::invalid_argument("vocabulary: no None symbol");
  none_symbol_ = static_cast<int>(it - symbols_.begin());
  for (Slot s : kAllSlots) {
    const auto& inv = slots_[static_cast<int>(s)];
    for (std::size_t i = 0; i < inv.size(); ++i) {
      if (inv[i] < 0 || inv[i] >= static_cast<int>(symbols_.size())) {
        throw std::invalid_argument("vocabulary: bad symbol id in slot");
      }
      for (std::size_t j = i + 1; j < inv.size(); ++j) {
        if (inv[i] == inv[j]) {
          throw std::invalid_argument(std::string("vocabulary: duplicate label in ") +
                                      slot_name(s));
        }
      }
    }
    if (std::find(inv.begin(), inv.end(), none_symbol_) == inv.end()) {
      throw std::invalid_argument(std::string("vocabulary: ") + slot_name(s) +
                                  " has no None label");
    }
  }
}

SlotVocabulary SlotVocabulary::standard() {
  std::vector<std::string> sym = {"None",  "Performer", "A",      "B",
                                  "push",  "pull",      "slide",  "roll",
                                  "toward", "away_from", "past"};
  auto id = [&](const char* s) {
    return static_cast<int>(std::find(sym.begin(), sym.end(), s) - sym.begin());
  };
  std::array<std::vector<int>, kNumSlots> slots;
  slots[static_cast<int>(Slot::kSubject)] = {id("Performer"), id("A"), id("B"), id("None")};
  slots[static_cast<int>(Slot::kObject)] = {id("A"), id("B"), id("None")};
  slots[static_cast<int>(Slot::kLocative)] = {id("A"), id("B"), id("None")};
  slots[static_cast<int>(Slot::kVerb)] = {id("push"), id("pull"), id("slide"), id("roll"),
                                          id("None")};
  slots[static_cast<int>(Slot::kPreposition)] = {id("toward"), id("away_from"), id("past"),
                                                 id("None")};
  return SlotVocabulary(std::move(sym), std::move(slots));
}

int SlotVocabulary::symbol_id(Slot s, int label_index) const {
  const auto& inv = slots_[static_cast<int>(s)];
  if (label_index < 0 || label_index >= static_cast<int>(inv.size())) {
    throw std::out_of_range(std::string("label index out of range for ") + slot_name(s));
  }
  return inv[label_index];
}

const std::string& SlotVocabulary::label_name(Slot s, int label_index) const {
  return symbols_[symbol_id(s, label_index)];
}

int SlotVocabulary::index_of(Slot s, const std::string& symbol) const {
  const auto& inv = slots_[static_cast<int>(s)];
  for (std::size_t i = 0; i < inv.size(); ++i) {
    if (symbols_[inv[i]] == symbol) return static_cast<int>(i);
  }
  return -1;
}

int SlotVocabulary::none_index(Slot s) const {
  const auto& inv = slots_[static_cast<int>(s)];
  for (std::size_t i = 0; i < inv.size(); ++i) {
    if (inv[i] == none_symbol_) return static_cast<int>(i);
  }
  return -1;  // unreachable, constructor enforces presence
}

bool SlotVocabulary::is_none(Slot s, int label_index) const {
  return symbol_id(s, label_index) == none_symbol_;
}

bool SlotVocabulary::in_range(const EventTuple& t) const {
  for (Slot s : kAllSlots) {
    if (t[s] < 0 || t[s] >= static_cast<int>(slot_size(s))) return false;
  }
  return true;
}

EventTuple SlotVocabulary::all_none() const {
  EventTuple t;
  for (Slot s : kAllSlots) t[s] = none_index(s);
  return t;
}

ValidityResult is_valid(const SlotVocabulary& vocab, const EventTuple& t) {
  ValidityResult r;
  auto fail = [&](Violation v, std::string msg) {
    r.ok = false;
    r.violations.push_back(v);
    r.messages.push_back(std::move(msg));
  };

  // (a) one entity may not fill two of subject/object/locative
  const std::array<Slot, 3> entity_slots = {Slot::kSubject, Slot::kObject, Slot::kLocative};
  for (std::size_t i = 0; i < entity_slots.size(); ++i) {
    for (std::size_t j = i + 1; j < entity_slots.size(); ++j) {
      Slot a = entity_slots[i], b = entity_slots[j];
      if (vocab.is_none(a, t[a]) || vocab.is_none(b, t[b])) continue;
      if (vocab.symbol_id(a, t[a]) == vocab.symbol_id(b, t[b])) {
        fail(Violation::kDuplicateEntity,
             vocab.label_name(a, t[a]) + " fills both " + slot_name(a) + " and " +
                 slot_name(b));
      }
    }
  }

  // (b) verb None forces every other slot to None
  if (vocab.is_none(Slot::kVerb, t.verb)) {
    for (Slot s : {Slot::kSubject, Slot::kObject, Slot::kLocative, Slot::kPreposition}) {
      if (!vocab.is_none(s, t[s])) {
        fail(Violation::kNoneVerbNonNoneSlot,
             std::string("verb is None but ") + slot_name(s) + " is " +
                 vocab.label_name(s, t[s]));
      }
    }
  }

  // (c) locative and preposition are None together
  bool loc_none = vocab.is_none(Slot::kLocative, t.locative);
  bool prep_none = vocab.is_none(Slot::kPreposition, t.preposition);
  if (loc_none != prep_none) {
    fail(Violation::kLocativePrepMismatch,
         std::string("locative is ") + vocab.label_name(Slot::kLocative, t.locative) +
             " but preposition is " + vocab.label_name(Slot::kPreposition, t.preposition));
  }
  return r;
}

namespace {
std::string verb_form(const std::string& verb) {
  if (verb == "push") return "pushes";
  if (verb == "pull") return "pulls";
  if (verb == "slide") return "slides";
  if (verb == "roll") return "rolls";
  return verb;
}

std::string prep_form(const std::string& prep) {
  if (prep == "away_from") return "away from";
  return prep;
}
}  // namespace

std::string render_sentence(const SlotVocabulary& vocab, const EventTuple& t) {
  if (vocab.is_none(Slot::kVerb, t.verb)) return "None";
  std::string subj = vocab.label_name(Slot::kSubject, t.subject);
  std::string out = (subj == "Performer") ? "The performer" : subj;
  if (subj == "None") out = "None";  // degenerate (invalid) tuple, render as-is
  out += " " + verb_form(vocab.label_name(Slot::kVerb, t.verb));
  if (!vocab.is_none(Slot::kObject, t.object)) {
    out += " " + vocab.label_name(Slot::kObject, t.object);
  }
  if (!vocab.is_none(Slot::kPreposition, t.preposition)) {
    out += " " + prep_form(vocab.label_name(Slot::kPreposition, t.preposition));
    if (!vocab.is_none(Slot::kLocative, t.locative)) {
      out += " " + vocab.label_name(Slot::kLocative, t.locative);
    }
  }
  return out;
}

}  // namespace evlearn
