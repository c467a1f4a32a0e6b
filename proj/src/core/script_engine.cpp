#include "core/script_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace evolif {

namespace {

const char* transition_name(Transition t) {
  switch (t) {
    case Transition::Continue: return "continue";
    case Transition::New: return "new";
    case Transition::Backtrack: return "backtrack";
  }
  return "?";
}

Transition transition_from_name(std::string_view name) {
  if (name == "continue") return Transition::Continue;
  if (name == "backtrack") return Transition::Backtrack;
  return Transition::New;
}

const TopicSpec& topic_by_id(const std::vector<TopicSpec>& corpus, const std::string& id) {
  for (const auto& t : corpus) {
    if (t.id == id) return t;
  }
  throw std::runtime_error("unknown topic id: " + id);
}

std::vector<Group> free_groups(const Instruction& ins) {
  std::vector<Group> out;
  for (int i = 0; i < kGroupCount; ++i) {
    Group g = static_cast<Group>(i);
    if (!ins.find(g)) out.push_back(g);
  }
  return out;
}

bool conflicts_with_any(const ConstraintSpec& spec, const Instruction& ins) {
  return std::any_of(ins.constraints.begin(), ins.constraints.end(),
                     [&](const ConstraintSpec& c) { return conflicts_with(spec, c); });
}

}  // namespace

DialogueState init_dialogue(std::vector<TopicSpec> corpus, const EvolutionConfig& config,
                            std::uint64_t seed) {
  if (corpus.empty()) throw EmptyCorpus();
  return DialogueState(std::move(corpus), config, seed);
}

TurnPlan next_turn(DialogueState& state) {
  if (state.turn_index >= state.config.max_turns_cap) throw CapReached();
  const EvolutionConfig& cfg = state.config;
  TurnPlan plan;
  plan.turn = state.turn_index + 1;

  // Step 1: topic selection. Unavailable actions get zero mass; the
  // remaining mass renormalizes via the weighted draw.
  std::set<std::string> seen(state.topic_history.begin(), state.topic_history.end());
  std::vector<const TopicSpec*> unused;
  for (const auto& t : state.corpus) {
    if (!seen.count(t.id)) unused.push_back(&t);
  }
  const std::string* prev_topic =
      state.topic_history.empty() ? nullptr : &state.topic_history.back();
  std::vector<std::string> backtrack_targets;
  for (const auto& id : seen) {
    if (prev_topic && id != *prev_topic) backtrack_targets.push_back(id);
  }
  std::vector<double> tw{prev_topic ? cfg.p_continue : 0.0, unused.empty() ? 0.0 : cfg.p_new,
                         backtrack_targets.empty() ? 0.0 : cfg.p_backtrack};
  if (tw[0] + tw[1] + tw[2] <= 0.0) tw = {prev_topic ? 1.0 : 0.0, unused.empty() ? 0.0 : 1.0, 0.0};
  switch (state.rng.weighted(tw)) {
    case 0:
      plan.transition = Transition::Continue;
      plan.topic = *prev_topic;
      break;
    case 1:
      plan.transition = Transition::New;
      plan.topic = unused[state.rng.below(unused.size())]->id;
      break;
    default:
      plan.transition = Transition::Backtrack;
      plan.topic = backtrack_targets[state.rng.below(backtrack_targets.size())];
      break;
  }

  const TopicSpec& topic = topic_by_id(state.corpus, plan.topic);
  auto stored = state.instruction_by_topic.find(plan.topic);
  Instruction ins = stored != state.instruction_by_topic.end() ? stored->second : Instruction{};
  if (stored != state.instruction_by_topic.end()) plan.prev_instruction = stored->second;

  // Step 2: structural evolution.
  bool add_legal = ins.size() < cfg.max_constraints && !free_groups(ins).empty();
  bool modify_legal = ins.size() >= 1;
  bool remove_legal = ins.size() > cfg.min_constraints;
  std::vector<double> ew{add_legal ? cfg.p_add : 0.0, modify_legal ? cfg.p_modify : 0.0,
                         remove_legal ? cfg.p_remove : 0.0};
  if (ew[0] + ew[1] + ew[2] <= 0.0) {
    ew = {add_legal ? 1.0 : 0.0, modify_legal ? 1.0 : 0.0, 0.0};
  }
  EvolutionOp op = static_cast<EvolutionOp>(state.rng.weighted(ew));

  std::optional<Group> touched;
  if (op == EvolutionOp::Add) {
    bool placed = false;
    for (std::uint32_t attempt = 0; attempt < cfg.add_retry_budget; ++attempt) {
      auto groups = free_groups(ins);
      Group g = groups[state.rng.below(groups.size())];
      ConstraintSpec spec = sample_constraint(g, topic.keywords, state.rng, cfg.sampler);
      if (!conflicts_with_any(spec, ins)) {
        ins.put(spec);
        plan.evolution = {EvolutionOp::Add, spec, std::nullopt};
        touched = g;
        placed = true;
        break;
      }
    }
    if (!placed) {
      // No conflict-free draw within budget: fall back to Modify.
      if (!modify_legal) throw SamplingExhausted();
      op = EvolutionOp::Modify;
    }
  }
  if (op == EvolutionOp::Modify && !touched) {
    std::size_t idx = state.rng.below(ins.size());
    ConstraintSpec before = ins.constraints[idx];
    ConstraintSpec after = before;
    for (std::uint32_t attempt = 0; attempt < cfg.add_retry_budget; ++attempt) {
      MutationResult mut = mutate_params(before, state.rng, cfg.sampler);
      if (!mut.changed) break;  // variant has no free parameter
      if (!conflicts_with_any(mut.spec, ins)) {
        after = mut.spec;
        break;
      }
    }
    ins.constraints[idx] = after;
    plan.evolution = {EvolutionOp::Modify, after, before};
    touched = before.group;
  } else if (op == EvolutionOp::Remove) {
    std::size_t idx = state.rng.below(ins.size());
    ConstraintSpec removed = ins.constraints[idx];
    ins.remove(removed.group);
    plan.evolution = {EvolutionOp::Remove, removed, std::nullopt};
    touched = removed.group;
  }

  // Step 3: parameter evolution over the constraints the structural step
  // did not touch, each independently.
  for (auto& c : ins.constraints) {
    if (touched && c.group == *touched) continue;
    if (state.rng.uniform() < cfg.param_mutation_prob) {
      MutationResult mut = mutate_params(c, state.rng, cfg.sampler);
      if (mut.changed && !conflicts_with_any(mut.spec, ins)) c = mut.spec;
    }
  }

  state.instruction_by_topic[plan.topic] = ins;
  state.topic_history.push_back(plan.topic);
  ++state.turn_index;
  plan.instruction = std::move(ins);
  return plan;
}

std::vector<TurnPlan> generate_script(const std::vector<TopicSpec>& corpus,
                                      const EvolutionConfig& config, std::uint64_t seed,
                                      std::uint32_t n_turns) {
  if (n_turns > config.max_turns_cap) throw CapReached();
  DialogueState state = init_dialogue(corpus, config, seed);
  std::vector<TurnPlan> plans;
  plans.reserve(n_turns);
  for (std::uint32_t i = 0; i < n_turns; ++i) plans.push_back(next_turn(state));
  return plans;
}

QcResult qc_filter(const std::vector<TurnPlan>& plans) {
  if (plans.size() < 20) throw TooShort();
  double total = 0.0;
  for (std::size_t i = 0; i < 20; ++i) total += static_cast<double>(plans[i].instruction.size());
  QcResult r;
  r.mean_constraints = total / 20.0;
  r.pass = r.mean_constraints >= 2.0;
  if (!r.pass) {
    std::ostringstream os;
    os << "mean constraints over first 20 turns is " << r.mean_constraints << ", required >= 2";
    r.reason = os.str();
  }
  return r;
}

ordered_json turn_plan_to_json(const TurnPlan& plan) {
  ordered_json j;
  j["turn"] = plan.turn;
  j["topic"] = plan.topic;
  j["transition"] = transition_name(plan.transition);
  ordered_json ev;
  switch (plan.evolution.op) {
    case EvolutionOp::Add:
      ev["op"] = "add";
      ev["constraint"] = constraint_to_json(plan.evolution.constraint);
      break;
    case EvolutionOp::Modify:
      ev["op"] = "modify";
      ev["before"] = constraint_to_json(*plan.evolution.before);
      ev["after"] = constraint_to_json(plan.evolution.constraint);
      break;
    case EvolutionOp::Remove:
      ev["op"] = "remove";
      ev["constraint"] = constraint_to_json(plan.evolution.constraint);
      break;
  }
  j["evolution"] = std::move(ev);
  j["instruction"] = instruction_to_json(plan.instruction);
  if (plan.prev_instruction) j["prev_instruction"] = instruction_to_json(*plan.prev_instruction);
  return j;
}

TurnPlan turn_plan_from_json(const nlohmann::json& j) {
  TurnPlan plan;
  plan.turn = j.at("turn").get<std::uint32_t>();
  plan.topic = j.at("topic").get<std::string>();
  plan.transition = transition_from_name(j.at("transition").get<std::string>());
  const auto& ev = j.at("evolution");
  std::string op = ev.at("op").get<std::string>();
  if (op == "modify") {
    plan.evolution.op = EvolutionOp::Modify;
    plan.evolution.before = constraint_from_json(ev.at("before"));
    plan.evolution.constraint = constraint_from_json(ev.at("after"));
  } else {
    plan.evolution.op = op == "add" ? EvolutionOp::Add : EvolutionOp::Remove;
    plan.evolution.constraint = constraint_from_json(ev.at("constraint"));
  }
  plan.instruction = instruction_from_json(j.at("instruction"));
  if (j.contains("prev_instruction")) {
    plan.prev_instruction = instruction_from_json(j.at("prev_instruction"));
  }
  return plan;
}

std::string script_to_jsonl(const std::vector<TurnPlan>& plans) {
  std::string out;
  for (const auto& p : plans) {
    out += turn_plan_to_json(p).dump();
    out += '\n';
  }
  return out;
}

std::vector<TurnPlan> script_from_jsonl(std::string_view jsonl) {
  std::vector<TurnPlan> plans;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    plans.push_back(turn_plan_from_json(nlohmann::json::parse(line)));
  }
  return plans;
}

std::vector<TopicSpec> corpus_from_json(const nlohmann::json& j) {
  std::vector<TopicSpec> corpus;
  for (const auto& item : j) {
    TopicSpec t;
    t.id = item.at("id").get<std::string>();
    t.description = item.at("description").get<std::string>();
    t.keywords = item.at("keywords").get<std::vector<std::string>>();
    if (t.keywords.size() < 4) {
      throw std::runtime_error("topic " + t.id + " has fewer than 4 keywords");
    }
    for (const auto& existing : corpus) {
      if (existing.id == t.id) throw std::runtime_error("duplicate topic id: " + t.id);
    }
    corpus.push_back(std::move(t));
  }
  return corpus;
}

std::vector<TopicSpec> load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  nlohmann::json j;
  in >> j;
  return corpus_from_json(j);
}

EvolutionConfig evolution_config_from_json(const nlohmann::json& j) {
  EvolutionConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("transition_probs")) {
    const auto& p = j.at("transition_probs");
    c.p_continue = p.at("continue").get<double>();
    c.p_new = p.at("new").get<double>();
    c.p_backtrack = p.at("backtrack").get<double>();
  }
  if (j.contains("evolution_probs")) {
    const auto& p = j.at("evolution_probs");
    c.p_add = p.at("add").get<double>();
    c.p_modify = p.at("modify").get<double>();
    c.p_remove = p.at("remove").get<double>();
  }
  get("param_mutation_prob", c.param_mutation_prob);
  get("max_constraints", c.max_constraints);
  get("min_constraints", c.min_constraints);
  get("max_turns", c.max_turns_cap);
  get("add_retry_budget", c.add_retry_budget);
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    auto gets = [&](const char* key, auto& field) {
      if (s.contains(key)) field = s.at(key).get<std::decay_t<decltype(field)>>();
    };
    gets("word_min", c.sampler.word_min);
    gets("word_max", c.sampler.word_max);
    gets("sentence_min", c.sampler.sentence_min);
    gets("sentence_max", c.sampler.sentence_max);
    gets("paragraph_min", c.sampler.paragraph_min);
    gets("paragraph_max", c.sampler.paragraph_max);
    gets("character_min", c.sampler.character_min);
    gets("character_max", c.sampler.character_max);
    gets("bullets_min", c.sampler.bullets_min);
    gets("bullets_max", c.sampler.bullets_max);
    gets("ext_count_min", c.sampler.ext_count_min);
    gets("ext_count_max", c.sampler.ext_count_max);
    gets("upper_ratios", c.sampler.upper_ratios);
  }
  double ts = c.p_continue + c.p_new + c.p_backtrack;
  double es = c.p_add + c.p_modify + c.p_remove;
  if (std::abs(ts - 1.0) > 1e-9 || std::abs(es - 1.0) > 1e-9) {
    throw std::runtime_error("transition/evolution probabilities must each sum to 1");
  }
  if (c.min_constraints < 1 || c.max_constraints < c.min_constraints || c.max_turns_cap < 1) {
    throw std::runtime_error("invalid constraint floor/cap configuration");
  }
  return c;
}

ordered_json evolution_config_to_json(const EvolutionConfig& c) {
  ordered_json j;
  j["transition_probs"] = {{"continue", c.p_continue}, {"new", c.p_new}, {"backtrack", c.p_backtrack}};
  j["evolution_probs"] = {{"add", c.p_add}, {"modify", c.p_modify}, {"remove", c.p_remove}};
  j["param_mutation_prob"] = c.param_mutation_prob;
  j["max_constraints"] = c.max_constraints;
  j["min_constraints"] = c.min_constraints;
  j["max_turns"] = c.max_turns_cap;
  j["add_retry_budget"] = c.add_retry_budget;
  ordered_json s;
  s["word_min"] = c.sampler.word_min;
  s["word_max"] = c.sampler.word_max;
  s["sentence_min"] = c.sampler.sentence_min;
  s["sentence_max"] = c.sampler.sentence_max;
  s["paragraph_min"] = c.sampler.paragraph_min;
  s["paragraph_max"] = c.sampler.paragraph_max;
  s["character_min"] = c.sampler.character_min;
  s["character_max"] = c.sampler.character_max;
  s["bullets_min"] = c.sampler.bullets_min;
  s["bullets_max"] = c.sampler.bullets_max;
  s["ext_count_min"] = c.sampler.ext_count_min;
  s["ext_count_max"] = c.sampler.ext_count_max;
  s["upper_ratios"] = c.sampler.upper_ratios;
  j["sampler"] = std::move(s);
  return j;
}

}  // namespace evolif
