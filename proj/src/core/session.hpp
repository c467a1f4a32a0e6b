#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/script_engine.hpp"
#include "core/surface_synthesis.hpp"

namespace evolif {

struct Message {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

// The evaluated model. Stateless with respect to the harness: every call
// receives the full ordered conversation history.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual std::string identity() const = 0;
  virtual std::string respond(const std::vector<Message>& history) = 0;
  // Side channel for oracle agents only; the harness announces the turn's
  // structured plan before asking for a response. Real adapters ignore it.
  virtual void observe_plan(const TurnPlan&) {}
};

class TransportFailure : public std::runtime_error {
 public:
  explicit TransportFailure(const std::string& why)
      : std::runtime_error("transport failure: " + why) {}
};
class MalformedResponse : public std::runtime_error {
 public:
  explicit MalformedResponse(const std::string& why)
      : std::runtime_error("malformed response: " + why) {}
};
class ConstructionFailure : public std::runtime_error {
 public:
  explicit ConstructionFailure(const std::string& why)
      : std::runtime_error("constructive satisfaction failed: " + why) {}
};

struct PatienceState {
  std::uint32_t current = 0;
  std::uint32_t maximum = 1;
};

// The two-case update: reset to maximum on success, decrement on failure.
PatienceState update_patience(PatienceState state, bool success);

struct TurnRecord {
  std::uint32_t turn = 0;
  TurnPlan plan;
  UserQuery query;
  std::string response;
  InstructionVerdict verdicts;
  bool turn_success = false;
  std::uint32_t patience_after = 0;
  std::uint64_t latency_ms = 0;
};

enum class Termination { PatienceExhausted, CapReached, TransportFailure };

struct SessionTranscript {
  std::string session_id;
  std::uint64_t seed = 0;
  std::string adapter_id;
  std::uint32_t patience_max = 3;
  std::vector<TurnRecord> records;
  Termination termination = Termination::CapReached;
  std::string transport_error;  // set when termination == TransportFailure
};

struct SessionConfig {
  EvolutionConfig evolution;
  std::uint32_t patience_max = 3;
  bool system_prompt = true;
  std::string system_prompt_text;  // empty selects the built-in default
  bool use_paraphrase = false;
  int paraphrase_retry_budget = 2;
  bool paraphrase_fallback = true;
  bool record_latency = false;  // off by default so offline runs are byte-stable
};

const std::string& default_system_prompt();

SessionTranscript run_session(const std::vector<TopicSpec>& corpus, const SessionConfig& config,
                              std::uint64_t seed, ModelAdapter& adapter,
                              ParaphraseAdapter* paraphraser = nullptr);

// Builds a response satisfying every constraint, or nullopt when the
// instruction is jointly unsatisfiable (a conflict-table violation).
std::optional<std::string> compose_satisfying(const Instruction& instruction);
// Builds a response violating at least one constraint.
std::string compose_violating(const Instruction& instruction);

class AlwaysPassAgent : public ModelAdapter {
 public:
  std::string identity() const override { return "oracle:always-pass"; }
  void observe_plan(const TurnPlan& plan) override { plan_ = plan; }
  std::string respond(const std::vector<Message>&) override;

 private:
  TurnPlan plan_;
};

class AlwaysFailAgent : public ModelAdapter {
 public:
  std::string identity() const override { return "oracle:always-fail"; }
  void observe_plan(const TurnPlan& plan) override { plan_ = plan; }
  std::string respond(const std::vector<Message>&) override;

 private:
  TurnPlan plan_;
};

// Follows a fixed per-turn pass/fail pattern, repeating when exhausted.
class PatternAgent : public ModelAdapter {
 public:
  explicit PatternAgent(std::vector<bool> pattern) : pattern_(std::move(pattern)) {}
  std::string identity() const override { return "oracle:pattern"; }
  void observe_plan(const TurnPlan& plan) override { plan_ = plan; }
  std::string respond(const std::vector<Message>&) override;

 private:
  std::vector<bool> pattern_;
  std::size_t next_ = 0;
  TurnPlan plan_;
};

// Passes each turn independently with probability p.
class BernoulliAgent : public ModelAdapter {
 public:
  BernoulliAgent(double p, std::uint64_t seed) : p_(p), rng_(seed) {}
  std::string identity() const override { return "oracle:bernoulli"; }
  void observe_plan(const TurnPlan& plan) override { plan_ = plan; }
  std::string respond(const std::vector<Message>&) override;

 private:
  double p_;
  Rng rng_;
  TurnPlan plan_;
};

ordered_json turn_record_to_json(const TurnRecord& r);
TurnRecord turn_record_from_json(const nlohmann::json& j);
std::string transcript_to_jsonl(const SessionTranscript& t);
SessionTranscript transcript_from_jsonl(std::string_view jsonl);
const char* termination_name(Termination t);

}  // namespace evolif
