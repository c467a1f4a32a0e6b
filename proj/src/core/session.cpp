#include "core/session.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <sstream>

namespace evolif {

namespace {

struct Parts {
  const ConstraintSpec* sw = nullptr;
  const ConstraintSpec* ew = nullptr;
  const ConstraintSpec* fmt = nullptr;
  const ConstraintSpec* cs = nullptr;
  const ConstraintSpec* ptt = nullptr;
  const ConstraintSpec* cti = nullptr;
  const ConstraintSpec* len = nullptr;
  const ConstraintSpec* ext = nullptr;
  const ConstraintSpec* fbd = nullptr;
};

Parts split_parts(const Instruction& ins) {
  Parts p;
  for (const auto& c : ins.constraints) {
    switch (c.group) {
      case Group::SW: p.sw = &c; break;
      case Group::EW: p.ew = &c; break;
      case Group::FMT: p.fmt = &c; break;
      case Group::CS: p.cs = &c; break;
      case Group::PTT: p.ptt = &c; break;
      case Group::CTI: p.cti = &c; break;
      case Group::LEN: p.len = &c; break;
      case Group::EXT: p.ext = &c; break;
      case Group::FBD: p.fbd = &c; break;
    }
  }
  return p;
}

std::string to_upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}
std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Line {
  bool bullet = false;
  std::vector<std::string> toks;
};

// Builds responses that satisfy an instruction by construction, with a
// measure-and-adjust loop for the count-sensitive constraints.
class Composer {
 public:
  explicit Composer(const Instruction& ins) : ins_(ins), parts_(split_parts(ins)) {
    // Filler vocabulary, excluding anything that would collide with the
    // instruction's keywords after case transformation.
    static const char* kBase[] = {"alpha", "bravo", "delta", "ember", "flint",
                                  "grove", "haven", "ivory", "jumbo", "karma"};
    for (const char* w : kBase) {
      std::string cased = case_word(w);
      if (parts_.fbd && cased == parts_.fbd->keyword) continue;
      if (parts_.ext && cased == parts_.ext->keyword) continue;
      fillers_.push_back(cased);
    }
  }

  std::optional<std::string> run() {
    std::size_t n_filler = initial_filler();
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::string text = assemble(n_filler);
      InstructionVerdict v = verify_instruction(ins_, text);
      if (v.all_satisfied) return text;
      bool grow = false;
      for (const auto& verdict : v.verdicts) {
        if (verdict.satisfied) continue;
        if (verdict.constraint.group == Group::LEN &&
            verdict.constraint.len_direction == LenDirection::MoreThan) {
          grow = true;
        }
        if (verdict.constraint.group == Group::CS &&
            verdict.constraint.case_variant == CaseVariant::MinUpperRatio) {
          grow = true;  // fillers carry the uppercase mass
        }
      }
      if (!grow) return std::nullopt;
      if (parts_.len && parts_.len->len_unit == LenUnit::Character &&
          parts_.len->len_direction == LenDirection::MoreThan) {
        TextStats stats = compute_stats(assemble(n_filler));
        std::size_t deficit =
            stats.characters > parts_.len->bound ? 0 : parts_.len->bound - stats.characters + 1;
        n_filler += std::max<std::size_t>(2, deficit / 6);
      } else {
        n_filler += std::max<std::size_t>(2, n_filler / 2);
      }
    }
    return std::nullopt;
  }

 private:
  std::string case_word(std::string s) const {
    if (!parts_.cs) return s;
    switch (parts_.cs->case_variant) {
      case CaseVariant::AllUpper: return to_upper(std::move(s));
      case CaseVariant::AllLower: return to_lower(std::move(s));
      case CaseVariant::MinUpperRatio: return to_upper(std::move(s));
    }
    return s;
  }

  std::string filler(std::size_t i) const { return fillers_[i % fillers_.size()]; }

  char32_t terminator() const {
    if (!parts_.ptt || parts_.ptt->punct_variant != PunctVariant::MustNotInclude) return U'.';
    if (parts_.ptt->punct_mark == U'.') return U'!';
    if (parts_.ptt->punct_mark == U'!') return U'?';
    return U'.';
  }

  std::size_t sentence_boundaries_needed() const {
    if (parts_.len && parts_.len->len_unit == LenUnit::Sentence &&
        parts_.len->len_direction == LenDirection::MoreThan) {
      return static_cast<std::size_t>(parts_.len->bound);
    }
    return 0;
  }

  std::size_t paragraphs_needed() const {
    if (parts_.len && parts_.len->len_unit == LenUnit::Paragraph &&
        parts_.len->len_direction == LenDirection::MoreThan) {
      return static_cast<std::size_t>(parts_.len->bound) + 1;
    }
    return 1;
  }

  std::size_t initial_filler() const {
    std::size_t n = 6;
    if (parts_.len && parts_.len->len_direction == LenDirection::LessThan) n = 2;
    if (parts_.len && parts_.len->len_direction == LenDirection::MoreThan) {
      if (parts_.len->len_unit == LenUnit::Word) n = static_cast<std::size_t>(parts_.len->bound) + 2;
      if (parts_.len->len_unit == LenUnit::Character) {
        n = static_cast<std::size_t>(parts_.len->bound) / 6 + 2;
      }
    }
    n = std::max(n, sentence_boundaries_needed() + 3);
    return n;
  }

  bool fmt_is(FormatKind k) const { return parts_.fmt && parts_.fmt->format == k; }
  bool markup() const { return fmt_is(FormatKind::Xml) || fmt_is(FormatKind::Html); }

  // The body tokens: keyword placements, punctuation carrier, fillers and
  // the start/end tokens that are not handled by a format wrapper.
  std::vector<std::string> body_tokens(std::size_t n_filler) const {
    std::vector<std::string> toks;
    if (parts_.sw && !markup()) {
      switch (parts_.sw->boundary) {
        case BoundaryVariant::Keyword: toks.push_back(parts_.sw->keyword); break;
        case BoundaryVariant::Letter: toks.push_back(encode_utf8(parts_.sw->letter)); break;
        case BoundaryVariant::Emoji: toks.push_back(encode_utf8(parts_.sw->emoji)); break;
        case BoundaryVariant::Quotation: toks.push_back("\"" + filler(0)); break;
      }
    }
    if (parts_.ext) {
      std::size_t present = 0;
      if (parts_.sw && parts_.sw->boundary == BoundaryVariant::Keyword &&
          parts_.sw->keyword == parts_.ext->keyword) {
        ++present;
      }
      if (parts_.ew && parts_.ew->boundary == BoundaryVariant::Keyword &&
          parts_.ew->keyword == parts_.ext->keyword) {
        ++present;
      }
      for (std::size_t i = present; i < parts_.ext->count; ++i) {
        toks.push_back(parts_.ext->keyword);
      }
    }
    if (parts_.ptt && parts_.ptt->punct_variant == PunctVariant::MustInclude &&
        !(parts_.ptt->punct_mark == U'"' && (fmt_is(FormatKind::Json) || fmt_is(FormatKind::Csv))) &&
        !(parts_.ptt->punct_mark == U',' && fmt_is(FormatKind::Csv))) {
      // Embed the mark inside a token so it never creates a sentence
      // boundary or interferes with the boundary constraints.
      toks.push_back(case_word("al") + encode_utf8(parts_.ptt->punct_mark) + case_word("pha"));
    }
    if (fmt_is(FormatKind::Markdown) && !parts_.cti) {
      toks.push_back("*" + filler(1) + "*");  // guaranteed structural construct
    }
    for (std::size_t i = 0; i < n_filler; ++i) toks.push_back(filler(i));
    if (parts_.ew && !markup()) {
      switch (parts_.ew->boundary) {
        case BoundaryVariant::Keyword: toks.push_back(parts_.ew->keyword); break;
        case BoundaryVariant::Letter:
          toks.push_back(case_word("x") + encode_utf8(parts_.ew->letter));
          break;
        case BoundaryVariant::Emoji: toks.push_back(encode_utf8(parts_.ew->emoji)); break;
        case BoundaryVariant::Quotation: toks.push_back(filler(0) + "\"");
          break;
      }
    }
    return toks;
  }

  // Distributes tokens over lines honoring bullet and start/end placement,
  // then attaches sentence terminators to tokens that have a successor on
  // the same line.
  std::vector<Line> layout(std::vector<std::string> toks) const {
    std::vector<Line> lines;
    bool sw_plain = parts_.sw && !markup();
    bool ew_plain = parts_.ew && !markup();
    std::size_t bullets = parts_.cti ? parts_.cti->count : 0;

    std::size_t begin = 0, end = toks.size();
    std::optional<std::string> head, tail;
    if (sw_plain && bullets > 0) head = toks[begin++];
    if (ew_plain && bullets > 0) tail = toks[--end];

    if (bullets > 0) {
      if (head) lines.push_back({false, {*head}});
      std::size_t body = end - begin;
      for (std::size_t b = 0; b < bullets; ++b) {
        Line line{true, {}};
        std::size_t from = begin + body * b / bullets;
        std::size_t to = begin + body * (b + 1) / bullets;
        for (std::size_t i = from; i < to; ++i) line.toks.push_back(toks[i]);
        if (line.toks.empty()) line.toks.push_back(filler(b));
        lines.push_back(std::move(line));
      }
      if (tail) lines.back().toks.push_back(*tail);
    } else if (std::size_t paras = paragraphs_needed(); paras > 1) {
      // One line per paragraph, splitting the token stream so the start
      // and end tokens keep their positions.
      std::size_t groups = std::min(paras, std::max<std::size_t>(toks.size(), 1));
      for (std::size_t g = 0; g < groups; ++g) {
        Line line;
        std::size_t from = toks.size() * g / groups;
        std::size_t to = toks.size() * (g + 1) / groups;
        for (std::size_t i = from; i < to; ++i) line.toks.push_back(toks[i]);
        if (line.toks.empty()) line.toks.push_back(filler(g));
        lines.push_back(std::move(line));
      }
    } else {
      lines.push_back({false, std::move(toks)});
    }

    // Sentence terminators; never on a line-final token (a successor must
    // follow so the boundary lands inside the assembled segment).
    std::size_t needed = sentence_boundaries_needed();
    std::string term = encode_utf8(terminator());
    for (auto& line : lines) {
      if (needed == 0) break;
      for (std::size_t i = 0; i + 1 < line.toks.size() && needed > 0; ++i) {
        // Keep the start token clean for keyword prefix matching.
        if (&line == &lines.front() && i == 0 && sw_plain) continue;
        line.toks[i] += term;
        --needed;
      }
    }
    return lines;
  }

  static std::string join_toks(const std::vector<std::string>& toks) {
    std::string out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) out += ' ';
      out += toks[i];
    }
    return out;
  }

  // Renders lines into paragraphs; extra single-token lines pad the block
  // count when a paragraph floor demands it.
  std::string render_plain(std::vector<Line> lines) const {
    std::size_t paras = paragraphs_needed();
    // Padding goes before the final line so an end-with token stays last;
    // single-line layouts were already split in layout().
    while (lines.size() > 1 && lines.size() < paras) {
      lines.insert(lines.end() - 1, {false, {filler(lines.size())}});
    }
    std::size_t breaks = paras - 1;
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += breaks > 0 ? (--breaks, "\n\n") : "\n";
      out += (lines[i].bullet ? "- " : "") + join_toks(lines[i].toks);
    }
    return out;
  }

  std::string tag_name() const {
    char first = 't', second = 'x';
    if (parts_.cs && parts_.cs->case_variant != CaseVariant::AllLower) {
      first = 'T';
      second = 'X';
    }
    if (parts_.sw && parts_.sw->boundary == BoundaryVariant::Letter) {
      first = static_cast<char>(parts_.sw->letter);
    }
    if (parts_.ew && parts_.ew->boundary == BoundaryVariant::Letter) {
      second = static_cast<char>(parts_.ew->letter);
    }
    return {first, second};
  }

  std::string assemble(std::size_t n_filler) const {
    std::vector<std::string> toks = body_tokens(n_filler);
    if (fmt_is(FormatKind::Json)) return assemble_json(std::move(toks));
    if (fmt_is(FormatKind::Csv)) return assemble_csv(std::move(toks));
    std::vector<Line> lines = layout(std::move(toks));
    if (markup()) {
      // Tags on their own lines keep bullet detection and boundary
      // constraints working inside the element.
      std::string tag = tag_name();
      std::string body = render_plain(std::move(lines));
      return "<" + tag + ">\n" + body + "\n</" + tag + ">";
    }
    return render_plain(std::move(lines));
  }

  std::string assemble_json(std::vector<std::string> toks) const {
    // One string element per paragraph; blank lines live between array
    // elements where JSON tolerates arbitrary whitespace.
    std::size_t paras = paragraphs_needed();
    std::vector<Line> lines;
    std::size_t per = std::max<std::size_t>(1, toks.size() / paras);
    for (std::size_t p = 0; p < paras; ++p) {
      Line line;
      std::size_t from = std::min(toks.size(), p * per);
      std::size_t to = p + 1 == paras ? toks.size() : std::min(toks.size(), (p + 1) * per);
      for (std::size_t i = from; i < to; ++i) line.toks.push_back(toks[i]);
      if (line.toks.empty()) line.toks.push_back(filler(p));
      lines.push_back(std::move(line));
    }
    // Terminators only before a same-string successor.
    std::size_t needed = sentence_boundaries_needed();
    std::string term = encode_utf8(terminator());
    for (auto& line : lines) {
      for (std::size_t i = 0; i + 1 < line.toks.size() && needed > 0; ++i) {
        line.toks[i] += term;
        --needed;
      }
    }
    std::string out = "[";
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (i) out += ",\n\n";
      out += "\"" + join_toks(lines[i].toks) + "\"";
    }
    out += "]";
    return out;
  }

  std::string assemble_csv(std::vector<std::string> toks) const {
    std::vector<Line> lines = layout(std::move(toks));
    while (lines.size() < 2) {
      if (lines.back().toks.size() >= 2) {
        // Split rather than pad so start- and end-with tokens keep their
        // first/last positions across rows.
        Line tail_line{false, {lines.back().toks.back()}};
        lines.back().toks.pop_back();
        lines.push_back(std::move(tail_line));
      } else if (parts_.ew) {
        lines.insert(lines.end() - 1, {false, {filler(lines.size() + 2)}});
      } else {
        lines.push_back({false, {filler(lines.size() + 2)}});
      }
    }
    if (parts_.ew && parts_.ew->boundary == BoundaryVariant::Quotation) {
      // Drop the composed quote-bearing token; the quoted trailing field
      // supplies the mark without breaking field quoting.
      auto& last_toks = lines.back().toks;
      if (!last_toks.empty()) last_toks.pop_back();
      if (last_toks.empty()) last_toks.push_back(filler(2));
    }
    bool quote_first = parts_.sw && parts_.sw->boundary == BoundaryVariant::Quotation;
    bool quote_last = parts_.ew && parts_.ew->boundary == BoundaryVariant::Quotation;
    // A required quotation mark is supplied by quoting a non-final field so
    // the response still ends exactly with any end-with token.
    bool quote_mid = parts_.ptt && parts_.ptt->punct_variant == PunctVariant::MustInclude &&
                     parts_.ptt->punct_mark == U'"' && !quote_first && !quote_last;
    bool end_token = parts_.ew && parts_.ew->boundary != BoundaryVariant::Quotation;
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      Line& line = lines[i];
      bool last = i + 1 == lines.size();
      if (quote_first && i == 0) {
        // SW.Quotation composes its own leading token; a quoted first field
        // replaces it so the row still starts with a quotation mark.
        std::vector<std::string> rest(line.toks.begin() + (line.toks.empty() ? 0 : 1),
                                      line.toks.end());
        if (rest.empty()) rest.push_back(filler(2));
        // The space after the comma keeps the next token from fusing with
        // the quoted field under whitespace tokenization.
        rows.push_back("\"" + filler(0) + "\", " + join_toks(rest));
        continue;
      }
      if (quote_last && last) {
        rows.push_back((line.bullet ? "- " : "") + join_toks(line.toks) + " ,\"" + filler(3) +
                       "\"");
        continue;
      }
      if (end_token && last && !line.toks.empty()) {
        // The end-with token stays the final token of the response by
        // becoming the trailing field.
        std::string tail = line.toks.back();
        line.toks.pop_back();
        if (line.toks.empty()) line.toks.push_back(filler(5));
        rows.push_back((line.bullet ? "- " : "") + join_toks(line.toks) + " , " + tail);
        continue;
      }
      if (quote_mid && !last) {
        rows.push_back((line.bullet ? "- " : "") + join_toks(line.toks) + " ,\"" + filler(4) +
                       "\"");
        quote_mid = false;
        continue;
      }
      rows.push_back((line.bullet ? "- " : "") + join_toks(line.toks) + " , " + filler(4));
    }
    // A paragraph floor is met with blank lines between rows (the format
    // check skips blank lines). Extra rows keep the final row last.
    std::size_t paras = paragraphs_needed();
    while (rows.size() < paras) {
      rows.insert(rows.end() - 1, filler(6) + " , " + filler(7));
    }
    std::string out;
    std::size_t breaks = paras - 1;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i) out += breaks > 0 ? (--breaks, "\n\n") : "\n";
      out += rows[i];
    }
    return out;
  }

  const Instruction& ins_;
  Parts parts_;
  std::vector<std::string> fillers_;
};

}  // namespace

std::optional<std::string> compose_satisfying(const Instruction& instruction) {
  if (instruction.constraints.empty()) return std::string("Understood.");
  return Composer(instruction).run();
}

std::string compose_violating(const Instruction& instruction) {
  std::vector<std::string> candidates;
  candidates.emplace_back("");
  // A long, messy plain text: wrong lengths, all punctuation, forbidden
  // and required keywords at wrong counts, mixed case, no structure.
  std::string big = "Z";
  for (const auto& c : instruction.constraints) {
    if (c.group == Group::FBD || c.group == Group::EXT) big += " " + c.keyword;
  }
  for (char32_t m : punctuation_alphabet()) big += " q" + encode_utf8(m);
  for (int p = 0; p < 8; ++p) {
    for (int i = 0; i < 50; ++i) big += " zug. voq";
    big += "\n\n";
  }
  candidates.push_back(std::move(big));
  for (const auto& cand : candidates) {
    if (!verify_instruction(instruction, cand).all_satisfied) return cand;
  }
  throw ConstructionFailure("no violating response found for instruction");
}

PatienceState update_patience(PatienceState state, bool success) {
  if (success) {
    state.current = state.maximum;
  } else {
    state.current = state.current == 0 ? 0 : state.current - 1;
  }
  return state;
}

const std::string& default_system_prompt() {
  static const std::string kPrompt =
      "You are a careful assistant. Follow every instruction in the user's "
      "latest message exactly, including all formatting, length, wording, "
      "and punctuation requirements, while keeping earlier requirements "
      "that have not been changed or withdrawn.";
  return kPrompt;
}

std::string AlwaysPassAgent::respond(const std::vector<Message>&) {
  auto text = compose_satisfying(plan_.instruction);
  if (!text) {
    throw ConstructionFailure("turn " + std::to_string(plan_.turn) + ": " +
                              instruction_to_json(plan_.instruction).dump());
  }
  return *text;
}

std::string AlwaysFailAgent::respond(const std::vector<Message>&) {
  return compose_violating(plan_.instruction);
}

std::string PatternAgent::respond(const std::vector<Message>&) {
  bool pass = pattern_.empty() ? true : pattern_[next_ % pattern_.size()];
  ++next_;
  if (!pass) return compose_violating(plan_.instruction);
  auto text = compose_satisfying(plan_.instruction);
  if (!text) throw ConstructionFailure("turn " + std::to_string(plan_.turn));
  return *text;
}

std::string BernoulliAgent::respond(const std::vector<Message>&) {
  bool pass = rng_.uniform() < p_;
  if (!pass) return compose_violating(plan_.instruction);
  auto text = compose_satisfying(plan_.instruction);
  if (!text) throw ConstructionFailure("turn " + std::to_string(plan_.turn));
  return *text;
}

SessionTranscript run_session(const std::vector<TopicSpec>& corpus, const SessionConfig& config,
                              std::uint64_t seed, ModelAdapter& adapter,
                              ParaphraseAdapter* paraphraser) {
  SessionTranscript transcript;
  transcript.session_id = "session-" + std::to_string(seed);
  transcript.seed = seed;
  transcript.adapter_id = adapter.identity();
  transcript.patience_max = config.patience_max;
  transcript.termination = Termination::CapReached;

  DialogueState state = init_dialogue(corpus, config.evolution, seed);
  PatienceState patience{config.patience_max, config.patience_max};

  std::vector<Message> history;
  if (config.system_prompt) {
    history.push_back({"system", config.system_prompt_text.empty() ? default_system_prompt()
                                                                   : config.system_prompt_text});
  }

  while (state.turn_index < config.evolution.max_turns_cap) {
    TurnRecord record;
    record.plan = next_turn(state);
    record.turn = record.plan.turn;
    const std::string& description =
        [&]() -> const std::string& {
      for (const auto& t : state.corpus) {
        if (t.id == record.plan.topic) return t.description;
      }
      throw std::runtime_error("unknown topic in plan: " + record.plan.topic);
    }();
    if (config.use_paraphrase && paraphraser) {
      record.query = paraphrase(record.plan, description, *paraphraser,
                                config.paraphrase_retry_budget, config.paraphrase_fallback);
    } else {
      record.query = render_template(record.plan, description);
    }
    history.push_back({"user", record.query.surface});

    adapter.observe_plan(record.plan);
    auto start = std::chrono::steady_clock::now();
    try {
      record.response = adapter.respond(history);
    } catch (const TransportFailure& e) {
      transcript.termination = Termination::TransportFailure;
      transcript.transport_error = e.what();
      break;
    }
    if (config.record_latency) {
      record.latency_ms = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                start)
              .count());
    }
    history.push_back({"assistant", record.response});

    record.verdicts = verify_instruction(record.plan.instruction, record.response);
    record.turn_success = record.verdicts.all_satisfied;
    patience = update_patience(patience, record.turn_success);
    record.patience_after = patience.current;
    transcript.records.push_back(std::move(record));

    if (patience.current == 0) {
      transcript.termination = Termination::PatienceExhausted;
      break;
    }
  }
  return transcript;
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::PatienceExhausted: return "patience_exhausted";
    case Termination::CapReached: return "cap_reached";
    case Termination::TransportFailure: return "transport_failure";
  }
  return "?";
}

namespace {
Termination termination_from_name(std::string_view name) {
  if (name == "patience_exhausted") return Termination::PatienceExhausted;
  if (name == "transport_failure") return Termination::TransportFailure;
  return Termination::CapReached;
}
}  // namespace

ordered_json turn_record_to_json(const TurnRecord& r) {
  ordered_json j;
  j["type"] = "turn";
  j["turn"] = r.turn;
  j["plan"] = turn_plan_to_json(r.plan);
  ordered_json q;
  q["surface"] = r.query.surface;
  q["synthesis_path"] = r.query.synthesis_path;
  if (r.query.fallback) q["fallback"] = true;
  j["query"] = std::move(q);
  j["response"] = r.response;
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : r.verdicts.verdicts) {
    ordered_json vj;
    vj["constraint"] = constraint_to_json(v.constraint);
    vj["satisfied"] = v.satisfied;
    if (!v.satisfied) vj["detail"] = v.detail;
    verdicts.push_back(std::move(vj));
  }
  j["verdicts"] = std::move(verdicts);
  j["turn_success"] = r.turn_success;
  j["patience_after"] = r.patience_after;
  j["latency_ms"] = r.latency_ms;
  return j;
}

TurnRecord turn_record_from_json(const nlohmann::json& j) {
  TurnRecord r;
  r.turn = j.at("turn").get<std::uint32_t>();
  r.plan = turn_plan_from_json(j.at("plan"));
  r.query.surface = j.at("query").at("surface").get<std::string>();
  r.query.synthesis_path = j.at("query").at("synthesis_path").get<std::string>();
  r.query.fallback = j.at("query").value("fallback", false);
  r.response = j.at("response").get<std::string>();
  for (const auto& vj : j.at("verdicts")) {
    Verdict v;
    v.constraint = constraint_from_json(vj.at("constraint"));
    v.satisfied = vj.at("satisfied").get<bool>();
    v.detail = vj.value("detail", "");
    r.verdicts.verdicts.push_back(std::move(v));
    r.verdicts.all_satisfied = r.verdicts.all_satisfied && r.verdicts.verdicts.back().satisfied;
  }
  r.turn_success = j.at("turn_success").get<bool>();
  r.patience_after = j.at("patience_after").get<std::uint32_t>();
  r.latency_ms = j.at("latency_ms").get<std::uint64_t>();
  return r;
}

std::string transcript_to_jsonl(const SessionTranscript& t) {
  ordered_json header;
  header["type"] = "header";
  header["session_id"] = t.session_id;
  header["seed"] = t.seed;
  header["adapter"] = t.adapter_id;
  header["patience_max"] = t.patience_max;
  std::string out = header.dump() + "\n";
  for (const auto& r : t.records) out += turn_record_to_json(r).dump() + "\n";
  ordered_json end;
  end["type"] = "end";
  end["termination"] = termination_name(t.termination);
  if (t.termination == Termination::TransportFailure) end["error"] = t.transport_error;
  out += end.dump() + "\n";
  return out;
}

SessionTranscript transcript_from_jsonl(std::string_view jsonl) {
  SessionTranscript t;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  bool saw_header = false, saw_end = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      t.session_id = j.at("session_id").get<std::string>();
      t.seed = j.at("seed").get<std::uint64_t>();
      t.adapter_id = j.at("adapter").get<std::string>();
      t.patience_max = j.at("patience_max").get<std::uint32_t>();
      saw_header = true;
    } else if (type == "turn") {
      t.records.push_back(turn_record_from_json(j));
    } else if (type == "end") {
      t.termination = termination_from_name(j.at("termination").get<std::string>());
      t.transport_error = j.value("error", "");
      saw_end = true;
    }
  }
  if (!saw_header || !saw_end) throw std::runtime_error("incomplete transcript");
  return t;
}

}  // namespace evolif
