#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/constraint.hpp"
#include "core/rng.hpp"

namespace evolif {

struct TopicSpec {
  std::string id;
  std::string description;
  std::vector<std::string> keywords;
};

enum class Transition { Continue, New, Backtrack };
enum class EvolutionOp { Add, Modify, Remove };

struct Evolution {
  EvolutionOp op = EvolutionOp::Add;
  ConstraintSpec constraint;               // added / removed / modified (after)
  std::optional<ConstraintSpec> before;    // Modify only
};

struct TurnPlan {
  std::uint32_t turn = 0;  // 1-based
  std::string topic;
  Transition transition = Transition::New;
  Evolution evolution;
  Instruction instruction;                  // final I_t, after parameter evolution
  std::optional<Instruction> prev_instruction;
};

struct EvolutionConfig {
  double p_continue = 0.6, p_new = 0.2, p_backtrack = 0.2;
  double p_add = 0.5, p_modify = 0.3, p_remove = 0.2;
  double param_mutation_prob = 0.3;
  std::uint32_t max_constraints = 6;
  std::uint32_t min_constraints = 1;
  std::uint32_t max_turns_cap = 50;
  std::uint32_t add_retry_budget = 16;
  SamplerConfig sampler;
};

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("topic corpus is empty") {}
};
class CapReached : public std::runtime_error {
 public:
  CapReached() : std::runtime_error("turn cap reached") {}
};
class SamplingExhausted : public std::runtime_error {
 public:
  SamplingExhausted() : std::runtime_error("no conflict-free constraint found") {}
};
class TooShort : public std::runtime_error {
 public:
  TooShort() : std::runtime_error("script has fewer than 20 turns") {}
};

struct DialogueState {
  std::vector<TopicSpec> corpus;
  EvolutionConfig config;
  Rng rng;
  std::vector<std::string> topic_history;                // entry t = topic of turn t+1
  std::map<std::string, Instruction> instruction_by_topic;
  std::uint32_t turn_index = 0;

  DialogueState(std::vector<TopicSpec> corpus_, EvolutionConfig config_, std::uint64_t seed)
      : corpus(std::move(corpus_)), config(config_), rng(seed) {}
};

DialogueState init_dialogue(std::vector<TopicSpec> corpus, const EvolutionConfig& config,
                            std::uint64_t seed);
TurnPlan next_turn(DialogueState& state);
std::vector<TurnPlan> generate_script(const std::vector<TopicSpec>& corpus,
                                      const EvolutionConfig& config, std::uint64_t seed,
                                      std::uint32_t n_turns);

struct QcResult {
  bool pass = false;
  double mean_constraints = 0.0;
  std::string reason;
};
// Pass iff the mean constraint count over turns 1..20 is at least 2.
QcResult qc_filter(const std::vector<TurnPlan>& plans);

ordered_json turn_plan_to_json(const TurnPlan& plan);
TurnPlan turn_plan_from_json(const nlohmann::json& j);
std::string script_to_jsonl(const std::vector<TurnPlan>& plans);
std::vector<TurnPlan> script_from_jsonl(std::string_view jsonl);

std::vector<TopicSpec> corpus_from_json(const nlohmann::json& j);
std::vector<TopicSpec> load_corpus_file(const std::string& path);

EvolutionConfig evolution_config_from_json(const nlohmann::json& j);
ordered_json evolution_config_to_json(const EvolutionConfig& c);

}  // namespace evolif
