#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "evlearn/rng.hpp"
#include "evlearn/synthgen.hpp"
#include "helpers.hpp"

using namespace evlearn;

namespace {

// Frames whose phase is contact or free motion, i.e. the object moves.
std::vector<std::size_t> motion_frames(const Session& s) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < s.phase_track.size(); ++t) {
    if (s.phase_track[t] == Phase::kContactMotion || s.phase_track[t] == Phase::kFreeMotion) {
      out.push_back(t);
    }
  }
  return out;
}

std::vector<double> reference_distances(const Session& s) {
  char mov = s.spec.moving_object;
  char ref = mov == 'A' ? 'B' : 'A';
  std::vector<double> d;
  for (std::size_t t : motion_frames(s)) {
    d.push_back(norm(s.clean_centroid(mov, t) - s.clean_centroid(ref, t)));
  }
  return d;
}

SceneSpec basic_spec(Verb v, std::optional<Prep> p, std::uint64_t seed, int duration = 60) {
  SceneSpec spec;
  spec.verb = v;
  spec.preposition = p;
  spec.moving_object = 'A';
  spec.duration_frames = duration;
  spec.noise_std = 0.01;
  spec.rng_seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE("synthgen") {

TEST_CASE("sessions carry full-length 63-wide frames and a phase per frame") {
  Session s = generate_session(basic_spec(Verb::kPush, Prep::kToward, 7));
  CHECK(s.frames.shape == std::vector<std::size_t>{60, 63});
  CHECK(s.clean_frames.shape == std::vector<std::size_t>{60, 63});
  CHECK(s.phase_track.size() == 60);
  CHECK(s.frames.all_finite());
  // Noise means the noisy and clean channels differ.
  CHECK(s.frames.data != s.clean_frames.data);
}

TEST_CASE("object corners stay a rigid square before noise") {
  for (Verb v : {Verb::kPush, Verb::kRoll}) {
    Session s = generate_session(basic_spec(v, Prep::kToward, 11));
    for (int base : {39, 51}) {
      for (std::size_t t = 0; t < s.clean_frames.rows(); ++t) {
        Vec3 c[4];
        for (int j = 0; j < 4; ++j) {
          c[j] = {s.clean_frames.at(t, base + 3 * j), s.clean_frames.at(t, base + 3 * j + 1),
                  s.clean_frames.at(t, base + 3 * j + 2)};
        }
        // Sides 0.08, diagonals 0.08*sqrt(2), in corner order.
        for (int j = 0; j < 4; ++j) {
          CHECK(norm(c[j] - c[(j + 1) % 4]) == doctest::Approx(0.08).epsilon(1e-9));
        }
        CHECK(norm(c[0] - c[2]) == doctest::Approx(0.08 * std::sqrt(2.0)).epsilon(1e-9));
        CHECK(norm(c[1] - c[3]) == doctest::Approx(0.08 * std::sqrt(2.0)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("trajectories are continuous: no point jumps more than 0.15 m between frames") {
  Rng rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    Verb v = static_cast<Verb>(rng.uniform_index(4));
    Prep p = static_cast<Prep>(rng.uniform_index(3));
    SceneSpec spec = basic_spec(v, p, rng.next_word(), 40 + int(rng.uniform_index(80)));
    spec.noise_std = 0.0;
    Session s = generate_session(spec);
    for (std::size_t t = 1; t < s.clean_frames.rows(); ++t) {
      for (std::size_t col = 0; col < 63; col += 3) {
        Vec3 now{s.clean_frames.at(t, col), s.clean_frames.at(t, col + 1),
                 s.clean_frames.at(t, col + 2)};
        Vec3 prev{s.clean_frames.at(t - 1, col), s.clean_frames.at(t - 1, col + 1),
                  s.clean_frames.at(t - 1, col + 2)};
        CHECK(norm(now - prev) <= 0.15);
      }
    }
  }
}

TEST_CASE("toward makes the reference distance strictly decrease while moving") {
  Session s = generate_session(basic_spec(Verb::kPush, Prep::kToward, 7));
  std::vector<double> d = reference_distances(s);
  REQUIRE(d.size() >= 8);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < d[i - 1]);
}

TEST_CASE("away_from makes the reference distance strictly increase while moving") {
  Session s = generate_session(basic_spec(Verb::kPull, Prep::kAwayFrom, 9));
  std::vector<double> d = reference_distances(s);
  REQUIRE(d.size() >= 8);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
}

TEST_CASE("past passes the reference: distance falls to a unique minimum then rises") {
  Session s = generate_session(basic_spec(Verb::kSlide, Prep::kPast, 13));
  std::vector<double> d = reference_distances(s);
  REQUIRE(d.size() >= 8);
  std::size_t argmin = std::min_element(d.begin(), d.end()) - d.begin();
  CHECK(argmin > 0);
  CHECK(argmin + 1 < d.size());
  for (std::size_t i = 1; i <= argmin; ++i) CHECK(d[i] < d[i - 1]);
  for (std::size_t i = argmin + 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
}

TEST_CASE("roll away_from spins the corner markers while the centroid recedes") {
  Session s = generate_session(basic_spec(Verb::kRoll, Prep::kAwayFrom, 17));
  std::vector<double> d = reference_distances(s);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);

  // Corner 0's offset from the centroid rotates in the (travel, vertical) plane.
  std::vector<std::size_t> frames = motion_frames(s);
  Vec3 u{1, 0, 0};  // slide/roll travel runs along +x
  double total_rotation = 0.0;
  double prev_angle = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    Vec3 off = Vec3{s.clean_frames.at(frames[i], 39), s.clean_frames.at(frames[i], 40),
                    s.clean_frames.at(frames[i], 41)} -
               s.clean_centroid('A', frames[i]);
    double angle = std::atan2(off.y, dot(off, u));
    if (i > 0) {
      double step = angle - prev_angle;
      while (step > std::numbers::pi) step -= 2 * std::numbers::pi;
      while (step < -std::numbers::pi) step += 2 * std::numbers::pi;
      total_rotation += std::abs(step);
    }
    prev_angle = angle;
  }
  CHECK(total_rotation > 1.0);

  // Slide keeps the square axis-aligned: corner offsets never rotate.
  Session slide = generate_session(basic_spec(Verb::kSlide, Prep::kAwayFrom, 17));
  Vec3 off0 = Vec3{slide.clean_frames.at(0, 39), slide.clean_frames.at(0, 40),
                   slide.clean_frames.at(0, 41)} -
              slide.clean_centroid('A', 0);
  std::size_t last = slide.clean_frames.rows() - 1;
  Vec3 off1 = Vec3{slide.clean_frames.at(last, 39), slide.clean_frames.at(last, 40),
                   slide.clean_frames.at(last, 41)} -
              slide.clean_centroid('A', last);
  CHECK(norm(off1 - off0) < 1e-9);
}

TEST_CASE("push and pull hold contact throughout; slide and roll release the object") {
  auto phases = [](Verb v) {
    Session s = generate_session(basic_spec(v, Prep::kToward, 23));
    std::set<Phase> seen(s.phase_track.begin(), s.phase_track.end());
    return seen;
  };
  CHECK_FALSE(phases(Verb::kPush).count(Phase::kFreeMotion));
  CHECK_FALSE(phases(Verb::kPull).count(Phase::kFreeMotion));
  CHECK(phases(Verb::kSlide).count(Phase::kFreeMotion));
  CHECK(phases(Verb::kRoll).count(Phase::kFreeMotion));
}

TEST_CASE("generation is deterministic in the seed") {
  SceneSpec spec = basic_spec(Verb::kSlide, Prep::kPast, 29);
  Session a = generate_session(spec);
  Session b = generate_session(spec);
  CHECK(a.frames.data == b.frames.data);
  spec.rng_seed = 30;
  Session c = generate_session(spec);
  CHECK(a.frames.data != c.frames.data);
}

TEST_CASE("invalid specs are rejected") {
  SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 1);
  spec.duration_frames = 19;
  CHECK_THROWS_AS(generate_session(spec), GenerationError);
  spec = basic_spec(Verb::kPush, Prep::kToward, 1);
  spec.noise_std = -0.5;
  CHECK_THROWS_AS(generate_session(spec), GenerationError);
  spec = basic_spec(Verb::kPush, Prep::kToward, 1);
  spec.moving_object = 'C';
  CHECK_THROWS_AS(generate_session(spec), GenerationError);
}

TEST_CASE("placement overrides are validated against the preposition geometry") {
  // Push travels +z from around z=0.3; travel is at most 0.38.
  SUBCASE("toward accepts a reference straight ahead, past the end point") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.30};
    spec.reference_position = Vec3{0.0, 0.0, 0.95};
    Session s = generate_session(spec);
    std::vector<double> d = reference_distances(s);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < d[i - 1]);
  }
  SUBCASE("toward rejects a reference behind the start") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.30};
    spec.reference_position = Vec3{0.0, 0.0, 0.10};
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
  SUBCASE("toward rejects a reference off the motion line") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.30};
    spec.reference_position = Vec3{0.30, 0.0, 0.95};
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
  SUBCASE("away_from accepts a reference behind the start") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kAwayFrom, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.30};
    spec.reference_position = Vec3{0.0, 0.0, 0.15};
    Session s = generate_session(spec);
    std::vector<double> d = reference_distances(s);
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
  }
  SUBCASE("away_from rejects a reference in front of the motion") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kAwayFrom, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.30};
    spec.reference_position = Vec3{0.0, 0.0, 0.60};
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
  SUBCASE("past needs a laterally offset reference beside the middle of the path") {
    SceneSpec spec = basic_spec(Verb::kSlide, Prep::kPast, 31);
    spec.moving_start = Vec3{-0.30, 0.0, 0.35};
    spec.reference_position = Vec3{-0.05, 0.0, 0.50};
    Session s = generate_session(spec);
    std::vector<double> d = reference_distances(s);
    std::size_t argmin = std::min_element(d.begin(), d.end()) - d.begin();
    CHECK(argmin > 0);
    CHECK(argmin + 1 < d.size());
  }
  SUBCASE("past rejects a reference sitting on the motion line") {
    SceneSpec spec = basic_spec(Verb::kSlide, Prep::kPast, 31);
    spec.moving_start = Vec3{-0.30, 0.0, 0.35};
    spec.reference_position = Vec3{-0.05, 0.0, 0.35};
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
  SUBCASE("a reference position without a preposition is meaningless") {
    SceneSpec spec = basic_spec(Verb::kPush, std::nullopt, 31);
    spec.reference_position = Vec3{0.0, 0.0, 0.8};
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
  SUBCASE("a start that pushes the object off the table is rejected") {
    SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 31);
    spec.moving_start = Vec3{0.0, 0.0, 0.90};  // travel >= 0.30 exits the table
    CHECK_THROWS_AS(generate_session(spec), GenerationError);
  }
}

TEST_CASE("slice_session count arithmetic") {
  SceneSpec spec = basic_spec(Verb::kPush, Prep::kToward, 37, 100);
  Session s = generate_session(spec);
  CHECK(slice_session(s, 20, 20).size() == 5);
  CHECK(slice_session(s, 20, 10).size() == 9);
  std::vector<FeatureSegment> segs = slice_session(s, 20, 10);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(segs[i].start_frame == int(10 * i));
    CHECK(segs[i].segment_index == int(i));
    CHECK(segs[i].frames.shape == std::vector<std::size_t>{20, 63});
  }

  Session exact = generate_session(basic_spec(Verb::kPush, Prep::kToward, 37, 20));
  CHECK(slice_session(exact, 20, 10).size() == 1);

  CHECK_THROWS_AS(slice_session(exact, 21, 10), SlicingError);
  CHECK_THROWS_AS(slice_session(exact, 20, 0), SlicingError);
}

TEST_CASE("sliced frames copy the session verbatim") {
  Session s = generate_session(basic_spec(Verb::kPull, Prep::kPast, 41, 50));
  std::vector<FeatureSegment> segs = slice_session(s, 20, 10);
  for (const FeatureSegment& seg : segs) {
    for (std::size_t r = 0; r < 20; ++r) {
      for (std::size_t c = 0; c < 63; ++c) {
        CHECK(seg.frames.at(r, c) == s.frames.at(seg.start_frame + r, c));
      }
    }
  }
}

TEST_CASE("auto_annotate labels contact, idle and free-motion windows") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  // Long session: idle = 24 frames, so a pure-idle window exists.
  Session s = generate_session(basic_spec(Verb::kPush, Prep::kToward, 43, 300));
  std::vector<FeatureSegment> segs = slice_session(s, 20, 1);

  auto pure = [&](Phase p) -> const FeatureSegment* {
    for (const FeatureSegment& seg : segs) {
      bool all = true;
      for (int t = seg.start_frame; t < seg.start_frame + 20; ++t) {
        all &= s.phase_track[t] == p;
      }
      if (all) return &seg;
    }
    return nullptr;
  };

  const FeatureSegment* idle = pure(Phase::kIdle);
  REQUIRE(idle);
  CHECK(auto_annotate(*idle, s, vocab) == vocab.all_none());

  const FeatureSegment* contact = pure(Phase::kContactMotion);
  REQUIRE(contact);
  CHECK(auto_annotate(*contact, s, vocab) ==
        evtest::tuple_of(vocab, "Performer", "A", "B", "push", "toward"));

  // A released roll: free-motion windows read as "A rolls toward B".
  Session roll = generate_session(basic_spec(Verb::kRoll, Prep::kToward, 47, 300));
  std::vector<FeatureSegment> roll_segs = slice_session(roll, 20, 1);
  const FeatureSegment* free_seg = nullptr;
  for (const FeatureSegment& seg : roll_segs) {
    bool all = true;
    for (int t = seg.start_frame; t < seg.start_frame + 20; ++t) {
      all &= roll.phase_track[t] == Phase::kFreeMotion;
    }
    if (all) {
      free_seg = &seg;
      break;
    }
  }
  REQUIRE(free_seg);
  CHECK(auto_annotate(*free_seg, roll, vocab) ==
        evtest::tuple_of(vocab, "A", "None", "B", "roll", "toward"));
}

TEST_CASE("every auto-annotated tuple is valid") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  Rng rng(51);
  for (int trial = 0; trial < 12; ++trial) {
    Verb v = static_cast<Verb>(rng.uniform_index(4));
    bool with_prep = rng.bernoulli(0.75);
    std::optional<Prep> p;
    if (with_prep) p = static_cast<Prep>(rng.uniform_index(3));
    SceneSpec spec = basic_spec(v, p, rng.next_word(), 40 + int(rng.uniform_index(60)));
    spec.moving_object = rng.bernoulli(0.5) ? 'A' : 'B';
    Session s = generate_session(spec);
    for (const FeatureSegment& seg : slice_session(s, 20, 10)) {
      CHECK(is_valid(vocab, auto_annotate(seg, s, vocab)).ok);
    }
  }
}

TEST_CASE("segments from another session are rejected by auto_annotate") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  Session s = generate_session(basic_spec(Verb::kPush, Prep::kToward, 53, 40));
  FeatureSegment seg = slice_session(s, 20, 10).back();
  seg.start_frame = 35;  // extends past the 40-frame session
  CHECK_THROWS_AS(auto_annotate(seg, s, vocab), SlicingError);
}

TEST_CASE("build_corpus splits sessions 60/40 and never leaks a session across sides") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 5;
  cfg.duration_frames = 40;
  cfg.seed = 99;
  Corpus corpus = build_corpus(cfg, vocab);

  CHECK(corpus.event_types.size() == 12);
  CHECK(corpus.counts.sessions == 60);
  CHECK(corpus.counts.train_sessions == 36);  // 3 of 5 per type
  CHECK(corpus.counts.test_sessions == 24);
  // 40 frames, window 20, stride 10: 3 segments per session.
  CHECK(corpus.counts.train_segments == 108);
  CHECK(corpus.counts.test_segments == 72);
  CHECK(corpus.train.size() == 108);
  CHECK(corpus.test.size() == 72);

  std::set<std::string> train_ids, test_ids;
  for (const auto& [id, side] : corpus.split) {
    (side == "train" ? train_ids : test_ids).insert(id);
  }
  CHECK(train_ids.size() == 36);
  CHECK(test_ids.size() == 24);
  for (const std::string& id : train_ids) CHECK_FALSE(test_ids.count(id));
  for (const FeatureSegment& seg : corpus.train) CHECK(train_ids.count(seg.session_id));
  for (const FeatureSegment& seg : corpus.test) CHECK(test_ids.count(seg.session_id));
}

TEST_CASE("thirty sessions per type split 18/12 as in the capture protocol") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 30;
  cfg.duration_frames = 24;
  cfg.seed = 42;
  Corpus corpus = build_corpus(cfg, vocab);
  CHECK(corpus.counts.train_sessions == 12 * 18);
  CHECK(corpus.counts.test_sessions == 12 * 12);
  for (const std::string& type : corpus.event_types) {
    int train_of_type = 0, test_of_type = 0;
    for (const auto& [id, side] : corpus.split) {
      if (id.rfind(type + "_", 0) == 0) ++(side == "train" ? train_of_type : test_of_type);
    }
    CHECK(train_of_type == 18);
    CHECK(test_of_type == 12);
  }
}

TEST_CASE("build_corpus is a pure function of config and seed") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 3;
  cfg.duration_frames = 30;
  cfg.seed = 7;
  Corpus a = build_corpus(cfg, vocab);
  Corpus b = build_corpus(cfg, vocab);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].frames.data == b.train[i].frames.data);
    CHECK(a.train[i].gold == b.train[i].gold);
    CHECK(a.train[i].session_id == b.train[i].session_id);
  }
  cfg.seed = 8;
  Corpus c = build_corpus(cfg, vocab);
  CHECK(a.train[0].frames.data != c.train[0].frames.data);
}

TEST_CASE("pure-verb sessions extend the inventory to sixteen types") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 2;
  cfg.duration_frames = 24;
  cfg.include_pure_verb = true;
  Corpus corpus = build_corpus(cfg, vocab);
  CHECK(corpus.event_types.size() == 16);
  CHECK(std::count(corpus.event_types.begin(), corpus.event_types.end(), "push_none") == 1);
  // Pure-verb golds leave locative and preposition empty.
  SlotVocabulary& v = vocab;
  bool saw_pure_contact = false;
  for (const FeatureSegment& seg : corpus.train) {
    if (seg.session_id.find("_none_") == std::string::npos) continue;
    if (!v.is_none(Slot::kVerb, seg.gold.verb)) {
      CHECK(v.is_none(Slot::kLocative, seg.gold.locative));
      CHECK(v.is_none(Slot::kPreposition, seg.gold.preposition));
      saw_pure_contact = true;
    }
  }
  CHECK(saw_pure_contact);
}

TEST_CASE("corpus golds cover None, contact and inchoative tuples at default settings") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 2;
  cfg.duration_frames = 60;
  Corpus corpus = build_corpus(cfg, vocab);
  int none = 0, contact = 0, inchoative = 0;
  auto tally = [&](const std::vector<FeatureSegment>& segs) {
    for (const FeatureSegment& seg : segs) {
      if (vocab.is_none(Slot::kVerb, seg.gold.verb)) ++none;
      else if (seg.gold.subject == vocab.index_of(Slot::kSubject, "Performer")) ++contact;
      else ++inchoative;
    }
  };
  tally(corpus.train);
  tally(corpus.test);
  CHECK(none > 0);
  CHECK(contact > 0);
  CHECK(inchoative > 0);
}

TEST_CASE("bad generation configs are rejected with a field message") {
  SlotVocabulary vocab = SlotVocabulary::standard();
  GenConfig cfg;
  cfg.sessions_per_type = 1;
  CHECK_THROWS_WITH_AS(build_corpus(cfg, vocab), doctest::Contains("sessions_per_type"),
                       GenerationError);
  cfg = GenConfig{};
  cfg.train_fraction = 1.0;
  CHECK_THROWS_WITH_AS(build_corpus(cfg, vocab), doctest::Contains("train_fraction"),
                       GenerationError);
  cfg = GenConfig{};
  cfg.window = 30;
  cfg.duration_frames = 25;
  CHECK_THROWS_WITH_AS(build_corpus(cfg, vocab), doctest::Contains("window"), GenerationError);
}

}  // TEST_SUITE
