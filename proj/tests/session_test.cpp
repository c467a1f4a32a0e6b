#include <doctest.h>

#include <string>
#include <vector>

#include "core/session.hpp"

using namespace evolif;

namespace {

std::vector<TopicSpec> session_corpus() {
  std::vector<TopicSpec> c;
  const char* ids[] = {"tides", "lanterns", "orchards", "glaciers", "murals", "comets"};
  const char* words[][4] = {
      {"ocean", "current", "moonrise", "shoreline"}, {"lantern", "wick", "festival", "glow"},
      {"orchard", "grafting", "harvest", "cider"},   {"glacier", "moraine", "crevasse", "firn"},
      {"mural", "pigment", "fresco", "plaster"},     {"comet", "nucleus", "perihelion", "coma"},
  };
  for (int i = 0; i < 6; ++i) {
    TopicSpec t;
    t.id = ids[i];
    t.description = std::string("write about ") + ids[i];
    t.keywords.assign(words[i], words[i] + 4);
    c.push_back(std::move(t));
  }
  return c;
}

class ThrowOnTurnAdapter : public ModelAdapter {
 public:
  explicit ThrowOnTurnAdapter(int fail_turn) : fail_turn_(fail_turn) {}
  std::string identity() const override { return "oracle:throwing"; }
  void observe_plan(const TurnPlan& plan) override { plan_ = plan; }
  std::string respond(const std::vector<Message>& history) override {
    ++turn_;
    if (turn_ == fail_turn_) throw TransportFailure("socket reset");
    (void)history;
    auto text = compose_satisfying(plan_.instruction);
    REQUIRE(text.has_value());
    return *text;
  }

 private:
  int fail_turn_;
  int turn_ = 0;
  TurnPlan plan_;
};

}  // namespace

TEST_CASE("patience update rule") {
  PatienceState s{3, 3};
  s = update_patience(s, false);
  CHECK(s.current == 2);
  s = update_patience(s, false);
  CHECK(s.current == 1);
  s = update_patience(s, true);
  CHECK(s.current == 3);  // reset to maximum on success
  s = update_patience(s, false);
  s = update_patience(s, false);
  s = update_patience(s, false);
  CHECK(s.current == 0);
}

TEST_CASE("an always-failing model lasts exactly patience_max turns") {
  auto corpus = session_corpus();
  for (std::uint32_t p : {1u, 2u, 3u, 5u}) {
    SessionConfig cfg;
    cfg.patience_max = p;
    AlwaysFailAgent agent;
    SessionTranscript t = run_session(corpus, cfg, 11, agent);
    CHECK(t.termination == Termination::PatienceExhausted);
    REQUIRE(t.records.size() == p);
    for (std::uint32_t i = 0; i < p; ++i) {
      CHECK_FALSE(t.records[i].turn_success);
      CHECK(t.records[i].patience_after == p - 1 - i);
    }
  }
}

TEST_CASE("an always-passing model runs to the turn cap") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  AlwaysPassAgent agent;
  SessionTranscript t = run_session(corpus, cfg, 21, agent);
  CHECK(t.termination == Termination::CapReached);
  CHECK(t.records.size() == cfg.evolution.max_turns_cap);
  for (const auto& r : t.records) {
    CHECK(r.turn_success);
    CHECK(r.patience_after == cfg.patience_max);
    CHECK(r.verdicts.all_satisfied);
  }
}

TEST_CASE("pattern agent alternates and patience recovers on success") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  cfg.patience_max = 2;
  PatternAgent agent({true, false});  // S F S F ... never two failures in a row
  SessionTranscript t = run_session(corpus, cfg, 31, agent);
  CHECK(t.termination == Termination::CapReached);
  REQUIRE(t.records.size() == cfg.evolution.max_turns_cap);
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(t.records[i].turn_success == (i % 2 == 0));
  }
}

TEST_CASE("double failure under patience two ends the session") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  cfg.patience_max = 2;
  PatternAgent agent({true, false, false});
  SessionTranscript t = run_session(corpus, cfg, 31, agent);
  CHECK(t.termination == Termination::PatienceExhausted);
  CHECK(t.records.size() == 3);
}

TEST_CASE("a transport failure terminates without consuming patience") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  ThrowOnTurnAdapter agent(4);
  SessionTranscript t = run_session(corpus, cfg, 41, agent);
  CHECK(t.termination == Termination::TransportFailure);
  CHECK(t.records.size() == 3);  // the failing turn is not recorded
  CHECK_FALSE(t.transport_error.empty());
  for (const auto& r : t.records) CHECK(r.patience_after == cfg.patience_max);
}

TEST_CASE("constructive satisfaction passes its own verifier on sampled instructions") {
  Rng rng(77);
  SamplerConfig scfg;
  std::vector<std::string> pool{"ocean", "lantern", "orchard", "glacier", "mural", "comet"};
  int composed = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    Instruction ins;
    int wanted = 1 + static_cast<int>(rng.below(5));
    int guard = 0;
    while (static_cast<int>(ins.size()) < wanted && guard++ < 60) {
      Group g = static_cast<Group>(rng.below(kGroupCount));
      if (ins.find(g)) continue;
      ConstraintSpec c = sample_constraint(g, pool, rng, scfg);
      bool clash = false;
      for (const auto& existing : ins.constraints) {
        if (conflicts_with(existing, c)) clash = true;
      }
      if (!clash) ins.put(c);
    }
    auto text = compose_satisfying(ins);
    REQUIRE_MESSAGE(text.has_value(), "conflict-free instruction must be satisfiable");
    ++composed;
    InstructionVerdict v = verify_instruction(ins, *text);
    if (!v.all_satisfied) {
      for (const auto& verdict : v.verdicts) {
        if (!verdict.satisfied) {
          CAPTURE(group_name(verdict.constraint.group));
          CAPTURE(variant_name(verdict.constraint));
          CAPTURE(verdict.detail);
          CAPTURE(*text);
          CHECK(verdict.satisfied);
        }
      }
    }
    CHECK(v.all_satisfied);
  }
  CHECK(composed == 1500);
}

TEST_CASE("conflicting instructions are reported unsatisfiable") {
  Instruction ins;
  ConstraintSpec ext;
  ext.group = Group::EXT;
  ext.keyword = "ocean";
  ext.count = 2;
  ConstraintSpec fbd;
  fbd.group = Group::FBD;
  fbd.keyword = "ocean";
  ins.put(ext);
  ins.put(fbd);
  CHECK_FALSE(compose_satisfying(ins).has_value());
}

TEST_CASE("compose_violating always fails at least one constraint") {
  Rng rng(78);
  SamplerConfig scfg;
  std::vector<std::string> pool{"ocean", "lantern", "orchard", "glacier"};
  for (int trial = 0; trial < 800; ++trial) {
    Instruction ins;
    Group g = static_cast<Group>(rng.below(kGroupCount));
    ins.put(sample_constraint(g, pool, rng, scfg));
    if (rng.below(2)) {
      Group h = static_cast<Group>(rng.below(kGroupCount));
      if (!ins.find(h)) {
        ConstraintSpec c = sample_constraint(h, pool, rng, scfg);
        if (!conflicts_with(ins.constraints[0], c)) ins.put(c);
      }
    }
    std::string text = compose_violating(ins);
    CHECK_FALSE(verify_instruction(ins, text).all_satisfied);
  }
}

TEST_CASE("bernoulli agent extremes") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  BernoulliAgent sure(1.0, 5);
  SessionTranscript ts = run_session(corpus, cfg, 51, sure);
  CHECK(ts.termination == Termination::CapReached);
  BernoulliAgent never(0.0, 5);
  SessionTranscript tf = run_session(corpus, cfg, 51, never);
  CHECK(tf.termination == Termination::PatienceExhausted);
  CHECK(tf.records.size() == cfg.patience_max);
}

TEST_CASE("session runs are deterministic for a fixed seed") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  PatternAgent a({true, true, false});
  PatternAgent b({true, true, false});
  SessionTranscript ta = run_session(corpus, cfg, 61, a);
  SessionTranscript tb = run_session(corpus, cfg, 61, b);
  CHECK(transcript_to_jsonl(ta) == transcript_to_jsonl(tb));
}

TEST_CASE("transcript jsonl round trip") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  PatternAgent agent({true, false, true, false, false, false});
  SessionTranscript t = run_session(corpus, cfg, 71, agent);
  std::string jsonl = transcript_to_jsonl(t);
  SessionTranscript back = transcript_from_jsonl(jsonl);
  CHECK(back.session_id == t.session_id);
  CHECK(back.seed == t.seed);
  CHECK(back.adapter_id == t.adapter_id);
  CHECK(back.patience_max == t.patience_max);
  CHECK(back.termination == t.termination);
  REQUIRE(back.records.size() == t.records.size());
  for (std::size_t i = 0; i < t.records.size(); ++i) {
    CHECK(back.records[i].turn_success == t.records[i].turn_success);
    CHECK(back.records[i].response == t.records[i].response);
    CHECK(back.records[i].plan.instruction.constraints ==
          t.records[i].plan.instruction.constraints);
  }
  CHECK(transcript_to_jsonl(back) == jsonl);
}

TEST_CASE("truncated transcripts are rejected") {
  auto corpus = session_corpus();
  SessionConfig cfg;
  AlwaysFailAgent agent;
  std::string jsonl = transcript_to_jsonl(run_session(corpus, cfg, 81, agent));
  std::size_t last_line = jsonl.rfind('\n', jsonl.size() - 2);
  CHECK_THROWS(transcript_from_jsonl(jsonl.substr(0, last_line + 1)));
}
