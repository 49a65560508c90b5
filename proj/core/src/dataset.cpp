#include "evlearn/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace evlearn {

using nlohmann::json;

namespace {

json label_to_json(const EventTuple& t, const SlotVocabulary& vocab) {
  json j;
  for (Slot slot : kAllSlots) {
    j[std::string(slot_name(slot))] = vocab.label_name(slot, t[slot]);
  }
  return j;
}

EventTuple label_from_json(const json& j, const SlotVocabulary& vocab, std::size_t line) {
  if (!j.is_object()) throw SchemaError(line, "\"label\" must be an object");
  EventTuple t;
  for (Slot slot : kAllSlots) {
    std::string key(slot_name(slot));
    if (!j.contains(key) || !j[key].is_string()) {
      throw SchemaError(line, "label is missing string field \"" + key + "\"");
    }
    std::string name = j[key].get<std::string>();
    int idx = vocab.index_of(slot, name);
    if (idx < 0) {
      throw SchemaError(line, "unknown " + key + " label \"" + name + "\"");
    }
    t[slot] = idx;
  }
  return t;
}

}  // namespace

void write_segments_jsonl(const std::string& path,
                          const std::vector<FeatureSegment>& segments,
                          const SlotVocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::size_t line_no = 0;
  for (const FeatureSegment& seg : segments) {
    ++line_no;
    if (seg.frames.rank() != 2 || seg.frames.rows() != kSegmentFrames ||
        seg.frames.cols() != kFeatureDim) {
      throw SchemaError(line_no, "segment frames must be " + std::to_string(kSegmentFrames) +
                                     " x " + std::to_string(kFeatureDim) + ", got " +
                                     shape_str(seg.frames));
    }
    if (!seg.frames.all_finite()) {
      throw SchemaError(line_no, "segment frames must be finite");
    }
    json j;
    j["session_id"] = seg.session_id;
    j["segment_index"] = seg.segment_index;
    j["start_frame"] = seg.start_frame;
    json frames = json::array();
    for (std::size_t r = 0; r < seg.frames.rows(); ++r) {
      json rowj = json::array();
      for (std::size_t c = 0; c < seg.frames.cols(); ++c) rowj.push_back(seg.frames.at(r, c));
      frames.push_back(std::move(rowj));
    }
    j["frames"] = std::move(frames);
    j["label"] = label_to_json(seg.gold, vocab);
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<FeatureSegment> read_segments_jsonl(const std::string& path,
                                                const SlotVocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<FeatureSegment> segments;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SchemaError(line_no, "not valid JSON");
    if (!j.is_object()) throw SchemaError(line_no, "expected a JSON object");
    for (const char* key : {"session_id", "segment_index", "start_frame", "frames", "label"}) {
      if (!j.contains(key)) throw SchemaError(line_no, std::string("missing field \"") + key + "\"");
    }
    FeatureSegment seg;
    if (!j["session_id"].is_string()) throw SchemaError(line_no, "\"session_id\" must be a string");
    seg.session_id = j["session_id"].get<std::string>();
    if (!j["segment_index"].is_number_integer()) {
      throw SchemaError(line_no, "\"segment_index\" must be an integer");
    }
    seg.segment_index = j["segment_index"].get<int>();
    if (!j["start_frame"].is_number_integer()) {
      throw SchemaError(line_no, "\"start_frame\" must be an integer");
    }
    seg.start_frame = j["start_frame"].get<int>();

    const json& frames = j["frames"];
    if (!frames.is_array() || frames.size() != kSegmentFrames) {
      throw SchemaError(line_no, "\"frames\" must be an array of " +
                                     std::to_string(kSegmentFrames) + " rows");
    }
    Tensor block = Tensor::zeros({kSegmentFrames, kFeatureDim});
    for (std::size_t r = 0; r < kSegmentFrames; ++r) {
      const json& rowj = frames[r];
      if (!rowj.is_array() || rowj.size() != kFeatureDim) {
        throw SchemaError(line_no, "frame row " + std::to_string(r) + " must hold " +
                                       std::to_string(kFeatureDim) + " numbers");
      }
      for (std::size_t c = 0; c < kFeatureDim; ++c) {
        if (!rowj[c].is_number()) {
          throw SchemaError(line_no, "frame row " + std::to_string(r) + " has a non-numeric entry");
        }
        double v = rowj[c].get<double>();
        if (!std::isfinite(v)) {
          throw SchemaError(line_no, "frame row " + std::to_string(r) + " has a non-finite entry");
        }
        block.at(r, c) = v;
      }
    }
    seg.frames = std::move(block);
    seg.gold = label_from_json(j["label"], vocab, line_no);
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(out);
}

}  // namespace evlearn
