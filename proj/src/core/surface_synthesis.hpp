#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/script_engine.hpp"

namespace evolif {

struct SynthesisPrompt {
  Transition mode = Transition::New;
  std::string topic_description;
  std::vector<std::string> current_fragments;
  std::vector<std::string> delta_fragments;  // empty iff mode == New
  std::string raw_prompt;                    // instruction text for a paraphrase model
};

struct UserQuery {
  std::string surface;
  std::string synthesis_path;  // "template" or "paraphrase:<model id>"
  bool fallback = false;       // paraphrase failed and the template was used
};

// Adapter for an LLM that rewrites the assembled prompt into a natural
// utterance. Implementations must be safe to call from multiple sessions
// concurrently or be instantiated per session.
class ParaphraseAdapter {
 public:
  virtual ~ParaphraseAdapter() = default;
  virtual std::string id() const = 0;
  // Returns the rewritten utterance; throws on transport failure.
  virtual std::string rewrite(const std::string& raw_prompt) = 0;
};

class ParaphraseUnavailable : public std::runtime_error {
 public:
  explicit ParaphraseUnavailable(const std::string& why)
      : std::runtime_error("paraphrase unavailable: " + why) {}
};

SynthesisPrompt build_prompt(const TurnPlan& plan, const std::string& topic_description);
UserQuery render_template(const TurnPlan& plan, const std::string& topic_description);
UserQuery paraphrase(const TurnPlan& plan, const std::string& topic_description,
                     ParaphraseAdapter& adapter, int retry_budget = 2,
                     bool allow_fallback = true);

}  // namespace evolif
