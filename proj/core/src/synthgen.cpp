#include "evlearn/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "evlearn/rng.hpp"

namespace evlearn {

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

const char* verb_label(Verb v) {
  switch (v) {
    case Verb::kPush: return "push";
    case Verb::kPull: return "pull";
    case Verb::kSlide: return "slide";
    case Verb::kRoll: return "roll";
  }
  return "?";
}

const char* prep_label(Prep p) {
  switch (p) {
    case Prep::kToward: return "toward";
    case Prep::kAwayFrom: return "away_from";
    case Prep::kPast: return "past";
  }
  return "?";
}

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kIdle: return "idle";
    case Phase::kReach: return "reach";
    case Phase::kContactMotion: return "contact_motion";
    case Phase::kFreeMotion: return "free_motion";
    case Phase::kRest: return "rest";
  }
  return "?";
}

std::optional<char> SceneSpec::reference_object() const {
  if (!preposition) return std::nullopt;
  return moving_object == 'A' ? 'B' : 'A';
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kObjHalf = 0.04;      // marker square half side
constexpr double kObjHeight = 0.04;    // centroid height above the table
constexpr double kRollRadius = 0.04;
constexpr double kGraspBack = 0.06;    // hand trails the centroid against the motion
constexpr double kGraspUp = 0.05;
constexpr double kRetreatStep = 0.12;  // hand speed cap while returning to rest

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// Seated pose facing +z across the table edge at z=0. The right elbow,
// wrist and hand are recomputed from the hand target every frame; their
// entries here give the resting hand target and placeholders.
const Vec3 kRestPose[kNumJoints] = {
    {0.00, -0.15, -0.45},   // spine_base
    {0.00, 0.05, -0.44},    // spine_mid
    {0.00, 0.22, -0.43},    // spine_shoulder
    {0.00, 0.30, -0.43},    // neck
    {0.00, 0.42, -0.44},    // head
    {-0.18, 0.24, -0.42},   // shoulder_left
    {-0.24, 0.02, -0.33},   // elbow_left
    {-0.22, -0.04, -0.20},  // wrist_left
    {-0.21, -0.05, -0.14},  // hand_left
    {0.18, 0.24, -0.42},    // shoulder_right
    {0.24, 0.02, -0.33},    // elbow_right
    {0.20, 0.02, -0.05},    // wrist_right
    {0.15, 0.05, 0.05},     // hand_right
};

struct PhasePlan {
  int idle = 0, reach = 0, contact = 0, free_motion = 0, rest = 0;
  int motion() const { return contact + free_motion; }
  int motion_start() const { return idle + reach; }
};

PhasePlan plan_phases(const SceneSpec& spec) {
  int n = spec.duration_frames;
  PhasePlan p;
  p.idle = std::max(1, static_cast<int>(std::lround(0.08 * n)));
  p.reach = std::max(8, static_cast<int>(std::lround(0.15 * n)));
  p.rest = std::max(1, static_cast<int>(std::lround(0.10 * n)));
  int motion = n - p.idle - p.reach - p.rest;
  if (motion < 8) {
    throw GenerationError("duration_frames " + std::to_string(n) +
                          " leaves too few motion frames");
  }
  bool releases = spec.verb == Verb::kSlide || spec.verb == Verb::kRoll;
  p.contact = releases ? std::max(1, static_cast<int>(std::lround(0.6 * motion))) : motion;
  p.free_motion = motion - p.contact;
  return p;
}

struct MotionScript {
  Vec3 u;        // unit motion direction, in the table plane
  Vec3 lateral;  // horizontal unit perpendicular to u
  Vec3 start;    // moving-object centroid before motion
  double travel = 0.0;
  Vec3 other_pos;  // the stationary object (the reference when a preposition is set)
  bool roll = false;
};

bool on_table(Vec3 p) { return p.x >= -0.60 && p.x <= 0.60 && p.z >= 0.02 && p.z <= 1.00; }

MotionScript build_script(const SceneSpec& spec, Rng& rng) {
  MotionScript s;
  switch (spec.verb) {
    case Verb::kPush:
      s.u = {0, 0, 1};
      s.lateral = {1, 0, 0};
      s.start = {rng.uniform(-0.10, 0.10), kObjHeight, rng.uniform(0.28, 0.33)};
      s.travel = rng.uniform(0.30, 0.38);
      break;
    case Verb::kPull:
      s.u = {0, 0, -1};
      s.lateral = {1, 0, 0};
      s.start = {rng.uniform(-0.10, 0.10), kObjHeight, rng.uniform(0.58, 0.64)};
      s.travel = rng.uniform(0.30, 0.38);
      break;
    case Verb::kSlide:
    case Verb::kRoll:
      s.u = {1, 0, 0};
      s.lateral = {0, 0, 1};
      s.start = {rng.uniform(-0.32, -0.26), kObjHeight, rng.uniform(0.30, 0.40)};
      s.travel = rng.uniform(0.45, 0.55);
      s.roll = spec.verb == Verb::kRoll;
      break;
  }
  if (spec.moving_start) s.start = {spec.moving_start->x, kObjHeight, spec.moving_start->z};
  if (!on_table(s.start) || !on_table(s.start + s.travel * s.u)) {
    throw GenerationError("infeasible placement: the moving object leaves the table");
  }

  if (!spec.preposition) {
    if (spec.reference_position) {
      throw GenerationError("reference_position requires a preposition");
    }
    // Keep the second object well off the motion line.
    s.other_pos = s.start - 0.22 * s.u + 0.28 * s.lateral;
    return s;
  }

  Prep prep = *spec.preposition;
  if (spec.reference_position) {
    Vec3 ref = {spec.reference_position->x, kObjHeight, spec.reference_position->z};
    Vec3 d = ref - s.start;
    double along = dot(d, s.u);
    double lat = norm(d - along * s.u);
    switch (prep) {
      case Prep::kToward:
        if (along < s.travel + 0.05 || lat > 0.02) {
          throw GenerationError(
              "infeasible 'toward' reference: must lie on the motion line beyond the end point");
        }
        break;
      case Prep::kAwayFrom:
        if (along > -0.05 || lat > 0.02) {
          throw GenerationError(
              "infeasible 'away_from' reference: must lie on the motion line behind the start");
        }
        break;
      case Prep::kPast:
        if (along < 0.15 * s.travel || along > 0.85 * s.travel || lat < 0.05 || lat > 0.35) {
          throw GenerationError(
              "infeasible 'past' reference: must sit beside the middle of the path");
        }
        break;
    }
    s.other_pos = ref;
    return s;
  }

  switch (prep) {
    case Prep::kToward:
      s.other_pos = s.start + (s.travel + rng.uniform(0.12, 0.20)) * s.u;
      break;
    case Prep::kAwayFrom:
      s.other_pos = s.start - rng.uniform(0.10, 0.18) * s.u;
      break;
    case Prep::kPast: {
      double c = rng.uniform(0.35, 0.65);
      double off = rng.uniform(0.12, 0.18);
      double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      Vec3 ref = s.start + (c * s.travel) * s.u + (sign * off) * s.lateral;
      if (!on_table(ref)) ref = s.start + (c * s.travel) * s.u - (sign * off) * s.lateral;
      s.other_pos = ref;
      break;
    }
  }
  return s;
}

void write_vec(Tensor& frames, int t, int col, Vec3 v) {
  frames.at(t, col) = v.x;
  frames.at(t, col + 1) = v.y;
  frames.at(t, col + 2) = v.z;
}

}  // namespace

Vec3 Session::clean_centroid(char object, std::size_t frame) const {
  int base = object == 'A' ? 39 : 51;
  Vec3 c{0, 0, 0};
  for (int j = 0; j < 4; ++j) {
    c = c + Vec3{clean_frames.at(frame, base + 3 * j), clean_frames.at(frame, base + 3 * j + 1),
                 clean_frames.at(frame, base + 3 * j + 2)};
  }
  return 0.25 * c;
}

Vec3 Session::clean_joint(Joint j, std::size_t frame) const {
  return {clean_frames.at(frame, 3 * j), clean_frames.at(frame, 3 * j + 1),
          clean_frames.at(frame, 3 * j + 2)};
}

Session generate_session(const SceneSpec& spec) {
  if (spec.duration_frames < 20) throw GenerationError("duration_frames must be at least 20");
  if (!std::isfinite(spec.noise_std) || spec.noise_std < 0.0) {
    throw GenerationError("noise_std must be finite and non-negative");
  }
  if (spec.moving_object != 'A' && spec.moving_object != 'B') {
    throw GenerationError("moving_object must be 'A' or 'B'");
  }

  Rng rng(spec.rng_seed);
  MotionScript script = build_script(spec, rng);
  PhasePlan plan = plan_phases(spec);
  int n = spec.duration_frames;

  Session out;
  out.spec = spec;
  out.clean_frames = Tensor::zeros({static_cast<std::size_t>(n), kFeatureDim});
  out.phase_track.resize(n);

  int ms = plan.motion_start();
  for (int t = 0; t < n; ++t) {
    if (t < plan.idle) out.phase_track[t] = Phase::kIdle;
    else if (t < ms) out.phase_track[t] = Phase::kReach;
    else if (t < ms + plan.contact) out.phase_track[t] = Phase::kContactMotion;
    else if (t < ms + plan.motion()) out.phase_track[t] = Phase::kFreeMotion;
    else out.phase_track[t] = Phase::kRest;
  }

  std::vector<double> sigma(n, 0.0);  // motion progress in [0, 1]
  for (int t = 0; t < n; ++t) {
    if (t < ms) sigma[t] = 0.0;
    else if (t < ms + plan.motion()) sigma[t] = smoothstep(double(t - ms + 1) / plan.motion());
    else sigma[t] = 1.0;
  }

  int mov_base = spec.moving_object == 'A' ? 39 : 51;
  int other_base = spec.moving_object == 'A' ? 51 : 39;
  const double corner_angle[4] = {kPi / 4, 3 * kPi / 4, 5 * kPi / 4, 7 * kPi / 4};
  const double corner_r = std::sqrt(2.0) * kObjHalf;

  Vec3 grasp_off = (-kGraspBack) * script.u + Vec3{0, kGraspUp, 0};
  Vec3 grasp0 = script.start + grasp_off;
  Vec3 hand_prev = kRestPose[kHandRight];

  for (int t = 0; t < n; ++t) {
    Vec3 centroid = script.start + (script.travel * sigma[t]) * script.u;
    double theta = script.roll ? script.travel * sigma[t] / kRollRadius : 0.0;

    for (int j = 0; j < 4; ++j) {
      Vec3 off;
      if (script.roll) {
        double a = corner_angle[j] - theta;  // rolling forward spins the marker
        off = (corner_r * std::cos(a)) * script.u + Vec3{0, corner_r * std::sin(a), 0};
      } else {
        double sx = (j == 0 || j == 3) ? 1.0 : -1.0;
        double sy = (j == 0 || j == 1) ? 1.0 : -1.0;
        off = {sx * kObjHalf, sy * kObjHalf, 0};
      }
      write_vec(out.clean_frames, t, mov_base + 3 * j, centroid + off);
    }
    for (int j = 0; j < 4; ++j) {
      double sx = (j == 0 || j == 3) ? 1.0 : -1.0;
      double sy = (j == 0 || j == 1) ? 1.0 : -1.0;
      write_vec(out.clean_frames, t, other_base + 3 * j,
                script.other_pos + Vec3{sx * kObjHalf, sy * kObjHalf, 0});
    }

    Vec3 hand;
    switch (out.phase_track[t]) {
      case Phase::kIdle:
        hand = kRestPose[kHandRight];
        break;
      case Phase::kReach: {
        double sg = smoothstep(double(t - plan.idle + 1) / plan.reach);
        hand = kRestPose[kHandRight] + sg * (grasp0 - kRestPose[kHandRight]);
        break;
      }
      case Phase::kContactMotion:
        hand = centroid + grasp_off;
        break;
      default: {  // free motion or rest: hand withdraws at capped speed
        Vec3 d = kRestPose[kHandRight] - hand_prev;
        double dist = norm(d);
        hand = dist <= kRetreatStep ? kRestPose[kHandRight]
                                    : hand_prev + (kRetreatStep / dist) * d;
        break;
      }
    }
    hand_prev = hand;

    Vec3 joints[kNumJoints];
    for (int j = 0; j < kNumJoints; ++j) {
      joints[j] = kRestPose[j];
      joints[j].y += 0.002 * std::sin(2 * kPi * t / 45.0 + 0.7 * j);
    }
    Vec3 shoulder = joints[kShoulderRight];
    joints[kHandRight] = hand;
    joints[kWristRight] = hand + 0.18 * (shoulder - hand);
    joints[kElbowRight] = hand + 0.55 * (shoulder - hand) + Vec3{0, -0.05, 0};
    for (int j = 0; j < kNumJoints; ++j) write_vec(out.clean_frames, t, 3 * j, joints[j]);
  }

  out.frames = out.clean_frames;
  if (spec.noise_std > 0.0) {
    for (std::size_t i = 0; i < out.frames.data.size(); ++i) {
      out.frames.data[i] += spec.noise_std * rng.normal();
    }
  }
  return out;
}

std::vector<FeatureSegment> slice_session(const Session& session, std::size_t window,
                                          std::size_t stride) {
  if (window == 0 || stride == 0) throw SlicingError("window and stride must be positive");
  std::size_t n = session.frames.rows();
  if (window > n) {
    throw SlicingError("window " + std::to_string(window) + " exceeds session length " +
                       std::to_string(n));
  }
  std::vector<FeatureSegment> segments;
  int index = 0;
  for (std::size_t start = 0; start + window <= n; start += stride) {
    FeatureSegment seg;
    seg.session_id = session.id;
    seg.segment_index = index++;
    seg.start_frame = static_cast<int>(start);
    seg.frames = Tensor::zeros({window, session.frames.cols()});
    for (std::size_t r = 0; r < window; ++r) {
      for (std::size_t c = 0; c < session.frames.cols(); ++c) {
        seg.frames.at(r, c) = session.frames.at(start + r, c);
      }
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

EventTuple auto_annotate(const FeatureSegment& segment, const Session& session,
                         const SlotVocabulary& vocab) {
  std::size_t start = static_cast<std::size_t>(segment.start_frame);
  std::size_t window = segment.frames.rows();
  if (start + window > session.phase_track.size()) {
    throw SlicingError("segment extends past the session it was cut from");
  }
  std::size_t contact = 0, free_motion = 0, other = 0;
  for (std::size_t t = start; t < start + window; ++t) {
    switch (session.phase_track[t]) {
      case Phase::kContactMotion: ++contact; break;
      case Phase::kFreeMotion: ++free_motion; break;
      default: ++other; break;
    }
  }

  const SceneSpec& spec = session.spec;
  std::string moving(1, spec.moving_object);
  EventTuple t = vocab.all_none();
  if (contact >= free_motion && contact >= other) {
    t[Slot::kSubject] = vocab.index_of(Slot::kSubject, "Performer");
    t[Slot::kObject] = vocab.index_of(Slot::kObject, moving);
    t[Slot::kVerb] = vocab.index_of(Slot::kVerb, verb_label(spec.verb));
  } else if (free_motion >= other) {
    t[Slot::kSubject] = vocab.index_of(Slot::kSubject, moving);
    t[Slot::kVerb] = vocab.index_of(
        Slot::kVerb, spec.verb == Verb::kRoll ? "roll" : "slide");
  } else {
    return t;  // the empty event
  }
  if (spec.preposition) {
    std::string ref(1, *spec.reference_object());
    t[Slot::kLocative] = vocab.index_of(Slot::kLocative, ref);
    t[Slot::kPreposition] = vocab.index_of(Slot::kPreposition, prep_label(*spec.preposition));
  }
  return t;
}

Corpus build_corpus(const GenConfig& cfg, const SlotVocabulary& vocab) {
  if (cfg.sessions_per_type < 2) throw GenerationError("sessions_per_type must be at least 2");
  if (cfg.duration_frames < 20) throw GenerationError("duration_frames must be at least 20");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw GenerationError("train_fraction must lie strictly between 0 and 1");
  }
  if (cfg.window < 1 || cfg.stride < 1) throw GenerationError("window and stride must be positive");
  if (cfg.window > cfg.duration_frames) {
    throw GenerationError("window must not exceed duration_frames");
  }

  const Verb verbs[] = {Verb::kPush, Verb::kPull, Verb::kSlide, Verb::kRoll};
  const Prep preps[] = {Prep::kToward, Prep::kAwayFrom, Prep::kPast};
  std::vector<std::pair<Verb, std::optional<Prep>>> types;
  for (Verb v : verbs)
    for (Prep p : preps) types.push_back({v, p});
  if (cfg.include_pure_verb)
    for (Verb v : verbs) types.push_back({v, std::nullopt});

  int train_count = static_cast<int>(std::lround(cfg.train_fraction * cfg.sessions_per_type));
  train_count = std::clamp(train_count, 1, cfg.sessions_per_type - 1);

  Corpus corpus;
  std::uint64_t ordinal = 0;
  for (const auto& [verb, prep] : types) {
    std::string type_name = std::string(verb_label(verb)) + "_" +
                            (prep ? prep_label(*prep) : "none");
    corpus.event_types.push_back(type_name);
    for (int i = 0; i < cfg.sessions_per_type; ++i, ++ordinal) {
      SceneSpec spec;
      spec.verb = verb;
      spec.preposition = prep;
      spec.moving_object = (ordinal % 2 == 0) ? 'A' : 'B';
      spec.duration_frames = cfg.duration_frames;
      spec.noise_std = cfg.noise_std;
      spec.rng_seed = derive_seed(cfg.seed, ordinal);
      Session session = generate_session(spec);
      char idbuf[16];
      std::snprintf(idbuf, sizeof(idbuf), "_%03d", i);
      session.id = type_name + idbuf;

      std::vector<FeatureSegment> segments =
          slice_session(session, static_cast<std::size_t>(cfg.window),
                        static_cast<std::size_t>(cfg.stride));
      for (FeatureSegment& seg : segments) seg.gold = auto_annotate(seg, session, vocab);

      bool is_train = i < train_count;
      corpus.split.push_back({session.id, is_train ? "train" : "test"});
      auto& side = is_train ? corpus.train : corpus.test;
      for (FeatureSegment& seg : segments) side.push_back(std::move(seg));
      ++(is_train ? corpus.counts.train_sessions : corpus.counts.test_sessions);
      ++corpus.counts.sessions;
    }
  }
  corpus.counts.train_segments = corpus.train.size();
  corpus.counts.test_segments = corpus.test.size();
  return corpus;
}

}  // namespace evlearn
