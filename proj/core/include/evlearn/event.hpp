#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace evlearn {

// Output slots in tuple order (Y1..Y5).
enum class Slot { kSubject = 0, kObject, kLocative, kVerb, kPreposition };

inline constexpr std::size_t kNumSlots = 5;
inline constexpr std::array<Slot, kNumSlots> kAllSlots = {
    Slot::kSubject, Slot::kObject, Slot::kLocative, Slot::kVerb, Slot::kPreposition};

const char* slot_name(Slot s);

// Five-slot structured label; one per-slot label index each.
struct EventTuple {
  int subject = 0;
  int object = 0;
  int locative = 0;
  int verb = 0;
  int preposition = 0;

  int& operator[](Slot s);
  int operator[](Slot s) const;
  bool operator==(const EventTuple&) const = default;
};

// Per-slot label inventories drawn from one shared symbol table. A slot
// entry is an index into `symbols`; tuple indices are positions within a
// slot's inventory.
class SlotVocabulary {
 public:
  SlotVocabulary(std::vector<std::string> symbols,
                 std::array<std::vector<int>, kNumSlots> slots);

  // The inventory used throughout: subject {Performer,A,B,None},
  // object/locative {A,B,None}, verb {push,pull,slide,roll,None},
  // preposition {toward,away_from,past,None}.
  static SlotVocabulary standard();

  std::size_t slot_size(Slot s) const { return slots_[static_cast<int>(s)].size(); }
  // Shared-table symbol id of a slot label.
  int symbol_id(Slot s, int label_index) const;
  const std::string& label_name(Slot s, int label_index) const;
  // Index of a symbol within a slot, or -1.
  int index_of(Slot s, const std::string& symbol) const;
  int none_index(Slot s) const;
  bool is_none(Slot s, int label_index) const;

  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<int>& slot_symbols(Slot s) const {
    return slots_[static_cast<int>(s)];
  }

  bool in_range(const EventTuple& t) const;
  EventTuple all_none() const;

 private:
  std::vector<std::string> symbols_;
  std::array<std::vector<int>, kNumSlots> slots_;
  int none_symbol_;
};

enum class Violation {
  kDuplicateEntity,        // one entity fills two of subject/object/locative
  kNoneVerbNonNoneSlot,    // verb is None but another slot is not
  kLocativePrepMismatch,   // exactly one of locative/preposition is None
};

struct ValidityResult {
  bool ok = true;
  std::vector<Violation> violations;
  std::vector<std::string> messages;
  explicit operator bool() const { return ok; }
};

// Checks the three output constraints: no entity may fill two of
// {subject, object, locative}; verb None forces all slots None; locative
// and preposition are None together or not at all.
ValidityResult is_valid(const SlotVocabulary& vocab, const EventTuple& t);

// Textual form, e.g. "The performer pushes A toward B", "A slides toward B",
// or "None" for the empty event.
std::string render_sentence(const SlotVocabulary& vocab, const EventTuple& t);

}  // namespace evlearn
