#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evlearn/event.hpp"
#include "evlearn/tensor.hpp"

namespace evlearn {

// One training/eval sample: a fixed window of per-frame feature vectors
// sliced from a session, plus its gold tuple.
struct FeatureSegment {
  std::string session_id;
  int segment_index = 0;
  int start_frame = 0;
  Tensor frames;  // (window x feature_dim), row per frame
  EventTuple gold;
};

inline constexpr std::size_t kSegmentFrames = 20;
inline constexpr std::size_t kFeatureDim = 63;

// Malformed corpus line; carries the 1-based line number.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// One JSON object per line:
// {"session_id", "segment_index", "start_frame", "frames": [[63 floats] x 20],
//  "label": {"subject", "object", "locative", "verb", "preposition"}}
void write_segments_jsonl(const std::string& path,
                          const std::vector<FeatureSegment>& segments,
                          const SlotVocabulary& vocab);

// Parses and validates a corpus file. Throws SchemaError with the line
// number on any malformed line, IoError if the file cannot be read.
std::vector<FeatureSegment> read_segments_jsonl(const std::string& path,
                                                const SlotVocabulary& vocab);

// FNV-1a 64 of a file's bytes, as 16 hex digits. Fingerprint for manifests.
std::string file_fingerprint(const std::string& path);

}  // namespace evlearn
