#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evlearn/dataset.hpp"
#include "evlearn/event.hpp"
#include "evlearn/tensor.hpp"

namespace evlearn {

class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

class SlicingError : public std::runtime_error {
 public:
  explicit SlicingError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 operator+(Vec3 a, Vec3 b);
Vec3 operator-(Vec3 a, Vec3 b);
Vec3 operator*(double s, Vec3 v);
double dot(Vec3 a, Vec3 b);
double norm(Vec3 v);

enum class Verb { kPush, kPull, kSlide, kRoll };
enum class Prep { kToward, kAwayFrom, kPast };

const char* verb_label(Verb v);   // "push" | "pull" | "slide" | "roll"
const char* prep_label(Prep p);   // "toward" | "away_from" | "past"

// One scripted tabletop manipulation. The table surface is the y=0 plane;
// x spans the table width, z its depth away from the performer. Units are
// meters, 30 frames/s nominal.
struct SceneSpec {
  Verb verb = Verb::kPush;
  std::optional<Prep> preposition;  // empty = pure verb, no reference object
  char moving_object = 'A';         // 'A' or 'B'; the other is the reference
  int duration_frames = 60;         // >= 20
  double noise_std = 0.01;          // per-coordinate Gaussian, meters
  std::uint64_t rng_seed = 0;

  // Optional placement overrides. Validated against the preposition's
  // geometric definition; infeasible placements raise GenerationError.
  std::optional<Vec3> moving_start;
  std::optional<Vec3> reference_position;

  std::optional<char> reference_object() const;
};

enum class Phase { kIdle, kReach, kContactMotion, kFreeMotion, kRest };

const char* phase_name(Phase p);

// Joint order within a frame's feature vector (x,y,z triples, then the
// 4 marker corners of object A, then of object B; 13*3 + 2*4*3 = 63).
enum Joint {
  kSpineBase = 0, kSpineMid, kSpineShoulder, kNeck, kHead,
  kShoulderLeft, kElbowLeft, kWristLeft, kHandLeft,
  kShoulderRight, kElbowRight, kWristRight, kHandRight,
  kNumJoints
};

struct Session {
  SceneSpec spec;
  std::string id = "session";
  Tensor frames;        // (duration x 63), with noise applied
  Tensor clean_frames;  // (duration x 63), before noise
  std::vector<Phase> phase_track;

  // Centroid of an object's 4 marker corners in the pre-noise frames.
  Vec3 clean_centroid(char object, std::size_t frame) const;
  Vec3 clean_joint(Joint j, std::size_t frame) const;
};

// Scripts the motion described by `spec` and renders per-frame features.
Session generate_session(const SceneSpec& spec);

// Cuts the session into overlapping windows. Every returned segment holds
// `window` complete frames (a trailing remainder shorter than the window
// is dropped). Labels are left zeroed; see auto_annotate.
std::vector<FeatureSegment> slice_session(const Session& session,
                                          std::size_t window = kSegmentFrames,
                                          std::size_t stride = 10);

// Gold tuple for a segment by phase plurality over its frames, with ties
// resolved contact > free > other. Contact-motion windows yield the full
// performer tuple; free-motion windows the inchoative reading (moving
// object as subject, verb slide/roll); anything else the empty event.
EventTuple auto_annotate(const FeatureSegment& segment, const Session& session,
                         const SlotVocabulary& vocab);

struct GenConfig {
  int sessions_per_type = 30;  // >= 2
  int duration_frames = 60;
  double noise_std = 0.01;
  int window = static_cast<int>(kSegmentFrames);
  int stride = 10;
  double train_fraction = 0.6;
  bool include_pure_verb = false;  // add prepositionless sessions per verb
  std::uint64_t seed = 42;
};

struct CorpusCounts {
  std::size_t sessions = 0;
  std::size_t train_sessions = 0;
  std::size_t test_sessions = 0;
  std::size_t train_segments = 0;
  std::size_t test_segments = 0;
};

struct Corpus {
  std::vector<FeatureSegment> train;
  std::vector<FeatureSegment> test;
  std::vector<std::string> event_types;            // e.g. "push_toward"
  std::vector<std::pair<std::string, std::string>> split;  // session id -> "train"/"test"
  CorpusCounts counts;
};

// Generates sessions for every (verb, preposition) pairing, slices and
// annotates them, and splits train/test at session granularity so no
// session contributes segments to both sides.
Corpus build_corpus(const GenConfig& cfg, const SlotVocabulary& vocab);

}  // namespace evlearn
