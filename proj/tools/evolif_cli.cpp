// Command-line front end over the shared library's C surface.
//
// Subcommands: generate (scripts + QC), run (sessions → transcripts),
// score (transcripts → report files), sweep (patience sweep).
// Exit codes: 0 success, 2 usage error, 3 data error, 4 transport error.

#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "evolif/evolif.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTransport = 4;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw CliError{code, message}; }

[[noreturn]] void die_status(evolif_status status, const std::string& context) {
  int code = status == EVOLIF_ERR_TRANSPORT ? kExitTransport : kExitData;
  die(code, context + ": " + evolif_last_error());
}

std::string take(char* owned) {
  std::string out = owned ? owned : "";
  evolif_string_free(owned);
  return out;
}

// ---- flat TOML subset ----------------------------------------------------
// Lines of `key = value` where value is a quoted string (with ${VAR}
// environment interpolation), integer, float, or boolean. `#` comments.

std::string interpolate_env(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '$' && i + 1 < s.size() && s[i + 1] == '{') {
      auto end = s.find('}', i + 2);
      if (end == std::string::npos) die(kExitData, "unterminated ${ in config value: " + s);
      std::string var = s.substr(i + 2, end - i - 2);
      const char* val = std::getenv(var.c_str());
      out += val ? val : "";
      i = end + 1;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) die(kExitData, "cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string code = hash == std::string::npos ? line : line.substr(0, hash);
    auto strip = [](std::string s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
      return s;
    };
    code = strip(code);
    if (code.empty()) continue;
    auto eq = code.find('=');
    if (eq == std::string::npos) {
      die(kExitData, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = strip(code.substr(0, eq));
    std::string value = strip(code.substr(eq + 1));
    if (key.empty() || value.empty()) {
      die(kExitData, path + ":" + std::to_string(lineno) + ": empty key or value");
    }
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        die(kExitData, path + ":" + std::to_string(lineno) + ": unterminated string");
      }
      value = interpolate_env(value.substr(1, value.size() - 2));
    }
    kv[key] = value;
  }
  return kv;
}

struct Config {
  std::map<std::string, std::string> kv;

  std::string str(const std::string& key, const std::string& fallback = "") const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }
  long long integer(const std::string& key, long long fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      die(kExitData, "config key " + key + " is not an integer: " + it->second);
    }
  }
  double real(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      die(kExitData, "config key " + key + " is not a number: " + it->second);
    }
  }
  bool boolean(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    die(kExitData, "config key " + key + " is not true/false: " + it->second);
  }
};

// JSON string escaping for the small config documents assembled here.
std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string evolution_json(const Config& cfg, long long cap_override = -1) {
  std::ostringstream out;
  out << "{";
  out << "\"transition_probs\":{\"continue\":" << cfg.real("p_continue", 0.6)
      << ",\"new\":" << cfg.real("p_new", 0.2)
      << ",\"backtrack\":" << cfg.real("p_backtrack", 0.2) << "}";
  out << ",\"evolution_probs\":{\"add\":" << cfg.real("p_add", 0.5)
      << ",\"modify\":" << cfg.real("p_modify", 0.3)
      << ",\"remove\":" << cfg.real("p_remove", 0.2) << "}";
  out << ",\"param_mutation_prob\":" << cfg.real("param_mutation_prob", 0.3);
  out << ",\"max_constraints\":" << cfg.integer("max_constraints", 6);
  out << ",\"min_constraints\":" << cfg.integer("min_constraints", 1);
  long long cap = cap_override >= 0 ? cap_override : cfg.integer("max_turns_cap", 50);
  out << ",\"max_turns\":" << cap;
  out << "}";
  return out.str();
}

std::string endpoint_json(const Config& cfg, const std::string& prefix) {
  std::ostringstream out;
  out << "{";
  out << "\"base_url\":" << json_quote(cfg.str(prefix + "_base_url"));
  out << ",\"model\":" << json_quote(cfg.str(prefix + "_model"));
  out << ",\"path\":" << json_quote(cfg.str(prefix + "_path", "/v1/chat/completions"));
  out << ",\"token_env\":" << json_quote(cfg.str(prefix + "_token_env"));
  out << ",\"timeout_ms\":" << cfg.integer(prefix + "_timeout_ms", 30000);
  out << ",\"max_retries\":" << cfg.integer(prefix + "_max_retries", 3);
  out << "}";
  return out.str();
}

std::string adapter_spec(const Config& cfg, const std::string& override_spec) {
  std::string spec = override_spec.empty() ? cfg.str("adapter") : override_spec;
  if (spec.empty()) die(kExitData, "no adapter configured (set adapter= or pass --adapter)");
  if (spec.rfind("oracle:", 0) == 0 || spec.rfind("http:", 0) == 0) return spec;
  if (spec == "http") return "http:" + endpoint_json(cfg, "adapter");
  die(kExitData, "unknown adapter: " + spec);
}

std::string session_config_json(const Config& cfg, long long patience_override = -1) {
  long long patience = patience_override >= 0 ? patience_override : cfg.integer("patience_max", 3);
  if (patience < 1) die(kExitData, "patience_max must be >= 1");
  long long cap = cfg.integer("max_turns_cap", 50);
  if (cap < patience) die(kExitData, "max_turns_cap must be >= patience_max");
  std::ostringstream out;
  out << "{";
  out << "\"evolution\":" << evolution_json(cfg);
  out << ",\"patience_max\":" << patience;
  out << ",\"system_prompt\":" << (cfg.boolean("system_prompt", true) ? "true" : "false");
  std::string prompt_text = cfg.str("system_prompt_text");
  if (!prompt_text.empty()) out << ",\"system_prompt_text\":" << json_quote(prompt_text);
  out << ",\"record_latency\":" << (cfg.boolean("record_latency", false) ? "true" : "false");
  out << "}";
  return out.str();
}

evolif_corpus* load_corpus(const Config& cfg) {
  std::string path = cfg.str("corpus");
  if (path.empty()) die(kExitData, "config is missing the corpus path (corpus=)");
  evolif_corpus* corpus = nullptr;
  if (evolif_corpus_load_file(path.c_str(), &corpus) != EVOLIF_OK) {
    die_status(EVOLIF_ERR_DATA, "loading corpus " + path);
  }
  return corpus;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die(kExitData, "cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die(kExitData, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A transcript is complete when its final line is the end marker. Sessions
// cut short by a transport failure are retried on the next run.
bool transcript_complete(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return last.find("\"type\":\"end\"") != std::string::npos &&
         last.find("\"termination\":\"transport_failure\"") == std::string::npos;
}

struct SweepRow {
  long long patience;
  std::string report_json;
};

// ---- subcommands ---------------------------------------------------------

int cmd_generate(const std::string& config_path, long long turns, const std::string& out_dir) {
  Config cfg{parse_config_file(config_path)};
  evolif_corpus* corpus = load_corpus(cfg);
  long long base = cfg.integer("seed_base", 1);
  long long count = cfg.integer("seed_count", 50);
  if (count < 1) die(kExitData, "seed_count must be >= 1");
  long long n_turns = turns > 0 ? turns : cfg.integer("turns", 20);
  std::string evo = evolution_json(cfg, std::max<long long>(n_turns, 50));

  fs::create_directories(out_dir);
  long long accepted = 0, next_replacement = 0, attempts = 0;
  std::vector<long long> pending;
  for (long long i = 0; i < count; ++i) pending.push_back(base + i);
  const long long attempt_budget = count * 20;

  while (accepted < count) {
    if (pending.empty()) {
      pending.push_back(base + count + next_replacement++);
    }
    long long seed = pending.front();
    pending.erase(pending.begin());
    if (++attempts > attempt_budget) {
      evolif_corpus_free(corpus);
      die(kExitData, "quality control rejected every candidate seed");
    }
    char* jsonl = nullptr;
    evolif_status st = evolif_script_generate(corpus, evo.c_str(), static_cast<uint64_t>(seed),
                                              static_cast<uint32_t>(n_turns), &jsonl);
    if (st != EVOLIF_OK) {
      evolif_corpus_free(corpus);
      die_status(st, "generating script for seed " + std::to_string(seed));
    }
    std::string script = take(jsonl);
    int pass = 0;
    double mean = 0.0;
    char* reason = nullptr;
    st = evolif_script_qc(script.c_str(), &pass, &mean, &reason);
    std::string why = take(reason);
    if (st != EVOLIF_OK) {
      evolif_corpus_free(corpus);
      die_status(st, "quality control for seed " + std::to_string(seed));
    }
    std::ostringstream meanstr;
    meanstr.setf(std::ios::fixed);
    meanstr.precision(2);
    meanstr << mean;
    if (pass) {
      write_file(fs::path(out_dir) / ("script-" + std::to_string(seed) + ".jsonl"), script);
      std::cout << "seed " << seed << ": pass (mean constraints " << meanstr.str() << ")\n";
      ++accepted;
    } else {
      std::cout << "seed " << seed << ": reject (" << why << "); replacing\n";
    }
  }
  evolif_corpus_free(corpus);
  std::cout << accepted << " script(s) written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, const std::string& adapter_override,
            const std::string& out_dir) {
  Config cfg{parse_config_file(config_path)};
  evolif_corpus* corpus = load_corpus(cfg);
  std::string spec = adapter_spec(cfg, adapter_override);
  std::string paraphrase_spec;
  if (cfg.boolean("paraphrase", false)) {
    paraphrase_spec = "http:" + endpoint_json(cfg, "paraphrase");
  }
  std::string session_cfg = session_config_json(cfg);
  long long base = cfg.integer("seed_base", 1);
  long long count = cfg.integer("seed_count", 50);
  long long workers = cfg.integer("workers", 1);
  if (workers < 1) workers = 1;
  fs::create_directories(out_dir);

  std::vector<long long> seeds;
  for (long long i = 0; i < count; ++i) {
    long long seed = base + i;
    fs::path path = fs::path(out_dir) / ("transcript-" + std::to_string(seed) + ".jsonl");
    if (fs::exists(path) && transcript_complete(path)) continue;  // resume
    seeds.push_back(seed);
  }

  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  std::vector<std::string> failures;
  bool transport_failed = false;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      long long seed = seeds[i];
      char* jsonl = nullptr;
      evolif_status st = evolif_session_run(
          corpus, session_cfg.c_str(), static_cast<uint64_t>(seed), spec.c_str(),
          paraphrase_spec.empty() ? nullptr : paraphrase_spec.c_str(), &jsonl);
      std::string transcript = take(jsonl);
      std::lock_guard<std::mutex> lock(io_mutex);
      if (st != EVOLIF_OK) {
        failures.push_back("seed " + std::to_string(seed) + ": " + evolif_last_error());
        if (st == EVOLIF_ERR_TRANSPORT) transport_failed = true;
        continue;
      }
      fs::path path = fs::path(out_dir) / ("transcript-" + std::to_string(seed) + ".jsonl");
      write_file(path, transcript);
      if (transcript.find("\"termination\":\"transport_failure\"") != std::string::npos) {
        failures.push_back("seed " + std::to_string(seed) + ": session ended by transport failure");
        transport_failed = true;
        continue;
      }
      std::cout << "seed " << seed << ": done\n";
    }
  };

  std::vector<std::thread> pool;
  for (long long w = 0; w < std::min<long long>(workers, static_cast<long long>(seeds.size()));
       ++w) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) t.join();
  evolif_corpus_free(corpus);

  std::cout << (seeds.size() - failures.size()) << " session(s) completed, " << count - seeds.size()
            << " skipped (already complete)\n";
  if (!failures.empty()) {
    for (const auto& f : failures) std::cerr << "failed: " << f << "\n";
    return transport_failed ? kExitTransport : kExitData;
  }
  return kExitOk;
}

std::string score_directory(const std::string& in_dir, long long cap) {
  std::vector<std::string> docs;
  std::vector<fs::path> paths;
  if (!fs::is_directory(in_dir)) die(kExitData, "not a directory: " + in_dir);
  for (const auto& entry : fs::directory_iterator(in_dir)) {
    if (entry.path().extension() == ".jsonl") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) docs.push_back(read_file(p));
  if (docs.empty()) die(kExitData, "no transcripts (*.jsonl) in " + in_dir);

  std::vector<const char*> ptrs;
  for (const auto& d : docs) ptrs.push_back(d.c_str());
  char* report = nullptr;
  evolif_status st =
      evolif_score(ptrs.data(), ptrs.size(), static_cast<uint32_t>(cap), &report);
  if (st != EVOLIF_OK) die_status(st, "scoring " + in_dir);
  return take(report);
}

std::string render(const std::string& report_json, const std::string& format,
                   const std::string& label) {
  char* text = nullptr;
  evolif_status st =
      evolif_report_render(report_json.c_str(), format.c_str(), label.c_str(), &text);
  if (st != EVOLIF_OK) die_status(st, "rendering report as " + format);
  return take(text);
}

int cmd_score(const std::string& in_dir, long long cap, const std::vector<std::string>& formats,
              const std::string& out_dir) {
  std::string report = score_directory(in_dir, cap);
  fs::create_directories(out_dir);
  std::string label = fs::path(in_dir).filename().string();
  if (label.empty()) label = "run";
  for (const auto& fmt : formats) {
    if (fmt == "json") {
      write_file(fs::path(out_dir) / "report.json", report);
    } else if (fmt == "csv") {
      write_file(fs::path(out_dir) / "report.csv", render(report, "csv", label));
      write_file(fs::path(out_dir) / "survival.csv", render(report, "survival_csv", label));
    } else if (fmt == "svg") {
      write_file(fs::path(out_dir) / "survival.svg", render(report, "svg", label));
    } else {
      die(kExitUsage, "unknown --format value: " + fmt);
    }
  }
  std::cout << "report written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::vector<long long>& patience_values,
              const std::string& adapter_override, const std::string& out_dir) {
  Config cfg{parse_config_file(config_path)};
  evolif_corpus* corpus = load_corpus(cfg);
  std::string spec = adapter_spec(cfg, adapter_override);
  long long base = cfg.integer("seed_base", 1);
  long long count = cfg.integer("seed_count", 50);
  long long cap = cfg.integer("max_turns_cap", 50);
  fs::create_directories(out_dir);

  std::string csv = "patience,act_len,act_acc,act_succ\n";
  for (long long patience : patience_values) {
    std::string session_cfg = session_config_json(cfg, patience);
    std::vector<std::string> docs;
    for (long long i = 0; i < count; ++i) {
      char* jsonl = nullptr;
      evolif_status st = evolif_session_run(corpus, session_cfg.c_str(),
                                            static_cast<uint64_t>(base + i), spec.c_str(),
                                            nullptr, &jsonl);
      if (st != EVOLIF_OK) {
        evolif_corpus_free(corpus);
        die_status(st, "sweep session seed " + std::to_string(base + i));
      }
      docs.push_back(take(jsonl));
    }
    std::vector<const char*> ptrs;
    for (const auto& d : docs) ptrs.push_back(d.c_str());
    char* report_c = nullptr;
    evolif_status st =
        evolif_score(ptrs.data(), ptrs.size(), static_cast<uint32_t>(cap), &report_c);
    if (st != EVOLIF_OK) {
      evolif_corpus_free(corpus);
      die_status(st, "sweep scoring at patience " + std::to_string(patience));
    }
    std::string report = take(report_c);
    write_file(fs::path(out_dir) / ("report-p" + std::to_string(patience) + ".json"), report);
    // Pull the three ACT numbers out of the rendered CSV row.
    std::string row = render(report, "csv", "p" + std::to_string(patience));
    auto second_line = row.find('\n');
    std::string data = row.substr(second_line + 1);
    std::vector<std::string> cells;
    std::stringstream ss(data);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    csv += std::to_string(patience) + "," + cells[3] + "," + cells[4] + "," + cells[5] + "\n";
  }
  evolif_corpus_free(corpus);
  write_file(fs::path(out_dir) / "sweep.csv", csv);
  std::cout << "sweep results written to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic multi-turn instruction-following evaluation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", in_dir, adapter_override;
  long long turns = 0, cap = 50;
  std::vector<std::string> formats = {"json", "csv"};
  std::string patience_list = "1,2,3";

  auto* generate = app.add_subcommand("generate", "Generate dialogue scripts with QC");
  generate->add_option("--config", config_path, "TOML config file")->required();
  generate->add_option("--turns", turns, "Turns per script (overrides config)");
  generate->add_option("--out", out_dir, "Output directory");

  auto* run = app.add_subcommand("run", "Run evaluation sessions");
  run->add_option("--config", config_path, "TOML config file")->required();
  run->add_option("--adapter", adapter_override, "Adapter spec (overrides config)");
  run->add_option("--out", out_dir, "Output directory");

  auto* score = app.add_subcommand("score", "Score a directory of transcripts");
  score->add_option("--in", in_dir, "Transcript directory")->required();
  score->add_option("--cap", cap, "Survival-curve horizon");
  score->add_option("--format", formats, "Output formats: json csv svg");
  score->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Patience sweep over one adapter");
  sweep->add_option("--config", config_path, "TOML config file")->required();
  sweep->add_option("--patience", patience_list, "Comma-separated patience values");
  sweep->add_option("--adapter", adapter_override, "Adapter spec (overrides config)");
  sweep->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (generate->parsed()) return cmd_generate(config_path, turns, out_dir);
    if (run->parsed()) return cmd_run(config_path, adapter_override, out_dir);
    if (score->parsed()) return cmd_score(in_dir, cap, formats, out_dir);
    if (sweep->parsed()) {
      std::vector<long long> values;
      std::stringstream ss(patience_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          values.push_back(std::stoll(item));
        } catch (const std::exception&) {
          die(kExitUsage, "bad --patience value: " + item);
        }
      }
      if (values.empty()) die(kExitUsage, "--patience list is empty");
      return cmd_sweep(config_path, values, adapter_override, out_dir);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
