#include "evolif/evolif.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/chat_client.hpp"
#include "core/metrics.hpp"
#include "core/script_engine.hpp"
#include "core/session.hpp"

namespace {

thread_local std::string g_last_error = "ok";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

evolif_status fail(evolif_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps library exceptions onto the C status codes.
template <typename Fn>
evolif_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(EVOLIF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const evolif::TransportFailure& e) {
    return fail(EVOLIF_ERR_TRANSPORT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EVOLIF_ERR_DATA, e.what());
  } catch (const std::runtime_error& e) {
    return fail(EVOLIF_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(EVOLIF_ERR_INTERNAL, e.what());
  }
}

evolif::EvolutionConfig parse_evolution(const char* config_json) {
  if (!config_json || !*config_json) return {};
  return evolif::evolution_config_from_json(nlohmann::json::parse(config_json));
}

std::unique_ptr<evolif::ModelAdapter> adapter_from_spec(const std::string& spec,
                                                        std::uint64_t seed) {
  using namespace evolif;
  if (spec == "oracle:always-pass") return std::make_unique<AlwaysPassAgent>();
  if (spec == "oracle:always-fail") return std::make_unique<AlwaysFailAgent>();
  if (spec.rfind("oracle:pattern:", 0) == 0) {
    std::vector<bool> pattern;
    for (char c : spec.substr(15)) {
      if (c == 'S' || c == 's') pattern.push_back(true);
      else if (c == 'F' || c == 'f') pattern.push_back(false);
      else throw std::runtime_error("pattern spec characters must be S or F");
    }
    if (pattern.empty()) throw std::runtime_error("empty pattern spec");
    return std::make_unique<PatternAgent>(std::move(pattern));
  }
  if (spec.rfind("oracle:bernoulli:", 0) == 0) {
    std::string rest = spec.substr(17);
    auto colon = rest.find(':');
    double p = std::stod(rest.substr(0, colon));
    std::uint64_t s = colon == std::string::npos ? seed : std::stoull(rest.substr(colon + 1));
    if (p < 0.0 || p > 1.0) throw std::runtime_error("bernoulli p outside [0,1]");
    return std::make_unique<BernoulliAgent>(p, s);
  }
  if (spec.rfind("http:", 0) == 0) {
    nlohmann::json j = nlohmann::json::parse(spec.substr(5));
    EndpointConfig e;
    e.base_url = j.at("base_url").get<std::string>();
    e.model = j.at("model").get<std::string>();
    e.path = j.value("path", e.path);
    e.token_env = j.value("token_env", "");
    e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
    e.max_retries = j.value("max_retries", e.max_retries);
    return std::make_unique<HttpChatAdapter>(e);
  }
  throw std::invalid_argument("unknown adapter spec: " + spec);
}

std::unique_ptr<evolif::ParaphraseAdapter> paraphraser_from_spec(const char* spec) {
  if (!spec || !*spec) return nullptr;
  std::string s = spec;
  if (s.rfind("http:", 0) != 0) throw std::invalid_argument("unknown paraphrase spec: " + s);
  nlohmann::json j = nlohmann::json::parse(s.substr(5));
  evolif::EndpointConfig e;
  e.base_url = j.at("base_url").get<std::string>();
  e.model = j.at("model").get<std::string>();
  e.path = j.value("path", e.path);
  e.token_env = j.value("token_env", "");
  e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
  e.max_retries = j.value("max_retries", e.max_retries);
  return std::make_unique<evolif::HttpParaphraseAdapter>(e);
}

}  // namespace

struct evolif_corpus {
  std::vector<evolif::TopicSpec> topics;
};

extern "C" {

const char* evolif_version(void) { return "0.1.0"; }

const char* evolif_last_error(void) { return g_last_error.c_str(); }

void evolif_string_free(char* s) { std::free(s); }

evolif_status evolif_corpus_load_json(const char* json_text, evolif_corpus** out) {
  if (!json_text || !out) return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto topics = evolif::corpus_from_json(nlohmann::json::parse(json_text));
    *out = new evolif_corpus{std::move(topics)};
    return EVOLIF_OK;
  });
}

evolif_status evolif_corpus_load_file(const char* path, evolif_corpus** out) {
  if (!path || !out) return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto topics = evolif::load_corpus_file(path);
    *out = new evolif_corpus{std::move(topics)};
    return EVOLIF_OK;
  });
}

size_t evolif_corpus_size(const evolif_corpus* corpus) {
  return corpus ? corpus->topics.size() : 0;
}

void evolif_corpus_free(evolif_corpus* corpus) { delete corpus; }

evolif_status evolif_script_generate(const evolif_corpus* corpus, const char* config_json,
                                     uint64_t seed, uint32_t n_turns, char** out_jsonl) {
  if (!corpus || !out_jsonl) return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto config = parse_evolution(config_json);
    auto plans = evolif::generate_script(corpus->topics, config, seed, n_turns);
    *out_jsonl = dup_string(evolif::script_to_jsonl(plans));
    return EVOLIF_OK;
  });
}

evolif_status evolif_script_qc(const char* script_jsonl, int* out_pass,
                               double* out_mean_constraints, char** out_reason) {
  if (!script_jsonl || !out_pass || !out_mean_constraints) {
    return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto plans = evolif::script_from_jsonl(script_jsonl);
    auto qc = evolif::qc_filter(plans);
    *out_pass = qc.pass ? 1 : 0;
    *out_mean_constraints = qc.mean_constraints;
    if (out_reason) *out_reason = dup_string(qc.reason);
    return EVOLIF_OK;
  });
}

evolif_status evolif_verify(const char* instruction_json, const char* response_utf8,
                            char** out_verdicts_json) {
  if (!instruction_json || !response_utf8 || !out_verdicts_json) {
    return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto ins = evolif::instruction_from_json(nlohmann::json::parse(instruction_json));
    auto verdicts = evolif::verify_instruction(ins, response_utf8);
    evolif::ordered_json j;
    j["all_satisfied"] = verdicts.all_satisfied;
    auto& arr = j["verdicts"] = evolif::ordered_json::array();
    for (const auto& v : verdicts.verdicts) {
      evolif::ordered_json vj;
      vj["constraint"] = evolif::constraint_to_json(v.constraint);
      vj["satisfied"] = v.satisfied;
      if (!v.satisfied) vj["detail"] = v.detail;
      arr.push_back(std::move(vj));
    }
    *out_verdicts_json = dup_string(j.dump());
    return EVOLIF_OK;
  });
}

evolif_status evolif_session_run(const evolif_corpus* corpus, const char* session_config_json,
                                 uint64_t seed, const char* adapter_spec,
                                 const char* paraphrase_spec, char** out_transcript_jsonl) {
  if (!corpus || !adapter_spec || !out_transcript_jsonl) {
    return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    evolif::SessionConfig config;
    if (session_config_json && *session_config_json) {
      nlohmann::json j = nlohmann::json::parse(session_config_json);
      if (j.contains("evolution")) {
        config.evolution = evolif::evolution_config_from_json(j.at("evolution"));
      }
      config.patience_max = j.value("patience_max", config.patience_max);
      config.system_prompt = j.value("system_prompt", config.system_prompt);
      config.system_prompt_text = j.value("system_prompt_text", config.system_prompt_text);
      config.record_latency = j.value("record_latency", config.record_latency);
    }
    auto adapter = adapter_from_spec(adapter_spec, seed);
    auto paraphraser = paraphraser_from_spec(paraphrase_spec);
    config.use_paraphrase = paraphraser != nullptr;
    auto transcript =
        evolif::run_session(corpus->topics, config, seed, *adapter, paraphraser.get());
    *out_transcript_jsonl = dup_string(evolif::transcript_to_jsonl(transcript));
    return EVOLIF_OK;
  });
}

evolif_status evolif_score(const char* const* transcripts, size_t n, uint32_t cap,
                           char** out_report_json) {
  if (!transcripts || !out_report_json) return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    evolif::TranscriptSet set;
    for (size_t i = 0; i < n; ++i) {
      if (!transcripts[i]) throw std::runtime_error("null transcript at index " + std::to_string(i));
      set.push_back(evolif::transcript_from_jsonl(transcripts[i]));
    }
    auto report = evolif::report(set, cap);
    *out_report_json = dup_string(evolif::report_to_json(report));
    return EVOLIF_OK;
  });
}

evolif_status evolif_report_render(const char* report_json, const char* format, const char* label,
                                   char** out_text) {
  if (!report_json || !format || !out_text) {
    return fail(EVOLIF_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    auto report = evolif::report_from_json(nlohmann::json::parse(report_json));
    std::string name = label && *label ? label : "run";
    std::string fmt = format;
    if (fmt == "csv") {
      *out_text = dup_string(evolif::reports_to_csv({{name, report}}));
    } else if (fmt == "survival_csv") {
      *out_text = dup_string(evolif::survival_to_csv(report));
    } else if (fmt == "svg") {
      *out_text = dup_string(evolif::survival_to_svg({{name, report}}));
    } else {
      return fail(EVOLIF_ERR_INVALID_ARGUMENT, "unknown render format: " + fmt);
    }
    return EVOLIF_OK;
  });
}

}  // extern "C"
