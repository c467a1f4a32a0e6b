#include "core/surface_synthesis.hpp"

#include <cctype>

namespace evolif {

namespace {

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> compute_deltas(const TurnPlan& plan) {
  std::vector<std::string> deltas;
  if (!plan.prev_instruction) return deltas;
  const Instruction& prev = *plan.prev_instruction;
  const Instruction& cur = plan.instruction;
  for (int i = 0; i < kGroupCount; ++i) {
    Group g = static_cast<Group>(i);
    const ConstraintSpec* before = prev.find(g);
    const ConstraintSpec* after = cur.find(g);
    if (before && !after) {
      deltas.push_back("the requirement to " + render_fragment(*before) + " no longer applies");
    } else if (!before && after) {
      deltas.push_back("also " + render_fragment(*after));
    } else if (before && after && !(*before == *after)) {
      deltas.push_back(render_fragment(*after) + " (previously: " + render_fragment(*before) + ")");
    }
  }
  return deltas;
}

}  // namespace

SynthesisPrompt build_prompt(const TurnPlan& plan, const std::string& topic_description) {
  SynthesisPrompt prompt;
  prompt.mode = plan.transition;
  prompt.topic_description = topic_description;
  for (const auto& c : plan.instruction.constraints) {
    prompt.current_fragments.push_back(render_fragment(c));
  }
  if (plan.transition != Transition::New) prompt.delta_fragments = compute_deltas(plan);

  std::string raw = "Rewrite the following as one natural chat message from a user.\n";
  switch (plan.transition) {
    case Transition::New:
      raw += "Situation: the user brings up a new request.\n";
      break;
    case Transition::Continue:
      raw += "Situation: the user continues the same request and emphasizes what changed.\n";
      break;
    case Transition::Backtrack:
      raw += "Situation: the user returns to an earlier request.\n";
      break;
  }
  raw += "Request: " + topic_description + "\n";
  raw += "Requirements:\n";
  for (const auto& f : prompt.current_fragments) raw += "- " + f + "\n";
  if (!prompt.delta_fragments.empty()) {
    raw += "Changes this turn:\n";
    for (const auto& d : prompt.delta_fragments) raw += "- " + d + "\n";
  }
  raw += "Every requirement must be stated explicitly in the message.";
  prompt.raw_prompt = std::move(raw);
  return prompt;
}

UserQuery render_template(const TurnPlan& plan, const std::string& topic_description) {
  SynthesisPrompt prompt = build_prompt(plan, topic_description);
  std::string surface;
  switch (prompt.mode) {
    case Transition::New:
      surface = "Please " + topic_description + ".";
      break;
    case Transition::Continue:
      surface = "For the same request, also apply these updates:";
      if (prompt.delta_fragments.empty()) {
        surface += " none.";
      } else {
        surface += " " + capitalized(join(prompt.delta_fragments, "; ")) + ".";
      }
      break;
    case Transition::Backtrack:
      surface = "Let's go back to the earlier request about " + topic_description + ".";
      break;
  }
  if (prompt.mode != Transition::New && !prompt.current_fragments.empty()) {
    surface += " To recap, here is everything to follow: " +
               join(prompt.current_fragments, "; ") + ".";
  } else {
    for (const auto& f : prompt.current_fragments) surface += " " + capitalized(f) + ".";
  }
  return {surface, "template", false};
}

UserQuery paraphrase(const TurnPlan& plan, const std::string& topic_description,
                     ParaphraseAdapter& adapter, int retry_budget, bool allow_fallback) {
  SynthesisPrompt prompt = build_prompt(plan, topic_description);
  std::string last_error = "empty completion";
  for (int attempt = 0; attempt <= retry_budget; ++attempt) {
    try {
      std::string surface = adapter.rewrite(prompt.raw_prompt);
      if (!surface.empty()) return {surface, "paraphrase:" + adapter.id(), false};
      break;  // an empty completion is not retried
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  if (!allow_fallback) throw ParaphraseUnavailable(last_error);
  UserQuery q = render_template(plan, topic_description);
  q.fallback = true;
  return q;
}

}  // namespace evolif
