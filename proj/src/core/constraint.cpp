#include "core/constraint.hpp"

#include <algorithm>
#include <cmath>

namespace evolif {

namespace {

const char* kLetters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

std::string quote_str(std::string_view s) {
  std::string out = "\"";
  out += s;
  out += "\"";
  return out;
}

std::string scalar_str(char32_t c) { return encode_utf8(c); }

bool keyword_breaks_case(const std::string& literal, CaseVariant cv) {
  for (char32_t c : decode_utf8(literal)) {
    if (cv == CaseVariant::AllUpper && is_lower_scalar(c)) return true;
    if (cv == CaseVariant::AllLower && is_upper_scalar(c)) return true;
  }
  return false;
}

// The case-relevant literal a constraint forces into the response, if any.
std::optional<std::string> forced_literal(const ConstraintSpec& s) {
  switch (s.group) {
    case Group::SW:
    case Group::EW:
      if (s.boundary == BoundaryVariant::Letter) return scalar_str(s.letter);
      if (s.boundary == BoundaryVariant::Keyword) return s.keyword;
      return std::nullopt;
    case Group::EXT:
      return s.keyword;
    default:
      return std::nullopt;
  }
}

std::optional<std::string> boundary_keyword(const ConstraintSpec& s) {
  if ((s.group == Group::SW || s.group == Group::EW) && s.boundary == BoundaryVariant::Keyword) {
    return s.keyword;
  }
  return std::nullopt;
}

std::string_view trim_view(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return text.substr(b, e - b);
}

Verdict boundary_verdict(const ConstraintSpec& c, std::string_view response) {
  Verdict v{c, false, ""};
  const bool at_start = c.group == Group::SW;
  BoundaryInfo info = boundary_scan(response, at_start ? TextEnd::Start : TextEnd::Finish);
  const char* where = at_start ? "start" : "end";
  switch (c.boundary) {
    case BoundaryVariant::Letter:
      if (info.cased_letter && *info.cased_letter == c.letter) {
        v.satisfied = true;
      } else {
        v.detail = std::string(where) + " letter is " +
                   (info.cased_letter ? quote_str(scalar_str(*info.cased_letter)) : "absent") +
                   ", required " + quote_str(scalar_str(c.letter));
      }
      break;
    case BoundaryVariant::Emoji:
      if (info.scalar && *info.scalar == c.emoji) {
        v.satisfied = true;
      } else {
        v.detail = std::string("response does not ") + where + " with the required emoji";
      }
      break;
    case BoundaryVariant::Keyword: {
      std::string_view body = trim_view(response);
      bool ok = body.size() >= c.keyword.size() &&
                (at_start ? body.substr(0, c.keyword.size()) == c.keyword
                          : body.substr(body.size() - c.keyword.size()) == c.keyword);
      if (ok) {
        v.satisfied = true;
      } else {
        v.detail = std::string("response does not ") + where + " with " + quote_str(c.keyword);
      }
      break;
    }
    case BoundaryVariant::Quotation:
      if (info.scalar && *info.scalar == U'"') {
        v.satisfied = true;
      } else {
        v.detail = std::string("response does not ") + where + " with a quotation mark";
      }
      break;
  }
  return v;
}

Verdict length_verdict(const ConstraintSpec& c, const TextStats& stats) {
  Verdict v{c, false, ""};
  std::size_t observed = 0;
  const char* unit = "";
  switch (c.len_unit) {
    case LenUnit::Word: observed = stats.words; unit = "words"; break;
    case LenUnit::Paragraph: observed = stats.paragraphs; unit = "paragraphs"; break;
    case LenUnit::Character: observed = stats.characters; unit = "characters"; break;
    case LenUnit::Sentence: observed = stats.sentences; unit = "sentences"; break;
  }
  bool ok = c.len_direction == LenDirection::MoreThan ? observed > c.bound : observed < c.bound;
  if (ok) {
    v.satisfied = true;
  } else {
    v.detail = "found " + std::to_string(observed) + " " + unit + ", required " +
               (c.len_direction == LenDirection::MoreThan ? "more than " : "fewer than ") +
               std::to_string(c.bound);
  }
  return v;
}

}  // namespace

bool ConstraintSpec::operator==(const ConstraintSpec& other) const {
  if (group != other.group) return false;
  switch (group) {
    case Group::SW:
    case Group::EW:
      if (boundary != other.boundary) return false;
      switch (boundary) {
        case BoundaryVariant::Letter: return letter == other.letter;
        case BoundaryVariant::Emoji: return emoji == other.emoji;
        case BoundaryVariant::Keyword: return keyword == other.keyword;
        case BoundaryVariant::Quotation: return true;
      }
      return false;
    case Group::FMT: return format == other.format;
    case Group::CS:
      if (case_variant != other.case_variant) return false;
      return case_variant != CaseVariant::MinUpperRatio || ratio == other.ratio;
    case Group::PTT:
      return punct_variant == other.punct_variant && punct_mark == other.punct_mark;
    case Group::CTI: return count == other.count;
    case Group::LEN:
      return len_unit == other.len_unit && len_direction == other.len_direction &&
             bound == other.bound;
    case Group::EXT: return keyword == other.keyword && count == other.count;
    case Group::FBD: return keyword == other.keyword;
  }
  return false;
}

const ConstraintSpec* Instruction::find(Group g) const {
  for (const auto& c : constraints) {
    if (c.group == g) return &c;
  }
  return nullptr;
}

void Instruction::put(const ConstraintSpec& spec) {
  remove(spec.group);
  auto it = std::find_if(constraints.begin(), constraints.end(),
                         [&](const ConstraintSpec& c) { return c.group > spec.group; });
  constraints.insert(it, spec);
}

void Instruction::remove(Group g) {
  std::erase_if(constraints, [&](const ConstraintSpec& c) { return c.group == g; });
}

const std::vector<char32_t>& punctuation_alphabet() {
  static const std::vector<char32_t> kMarks{U'!', U'?', U';', U':', U',', U'.', U'—',
                                            U'"', U'\''};
  return kMarks;
}

const std::vector<char32_t>& emoji_alphabet() {
  static const std::vector<char32_t> kEmoji{0x1F30A, 0x1F331, 0x1F4A1, 0x1F525, 0x1F680,
                                            0x1F3B5, 0x2B50,  0x1F4DA, 0x1F9E0, 0x2600};
  return kEmoji;
}

Verdict verify(const ConstraintSpec& c, std::string_view response) {
  switch (c.group) {
    case Group::SW:
    case Group::EW:
      return boundary_verdict(c, response);
    case Group::FMT: {
      FormatCheck check = validate_format(c.format, response);
      Verdict v{c, check.ok, ""};
      if (!check.ok) {
        v.detail = std::string("not valid ") + format_kind_name(c.format) + ": " + check.diagnostic;
      }
      return v;
    }
    case Group::CS: {
      TextStats stats = compute_stats(response);
      Verdict v{c, false, ""};
      if (stats.cased_letters == 0) {
        v.detail = "response has no cased letters";
        return v;
      }
      switch (c.case_variant) {
        case CaseVariant::AllUpper:
          if (stats.uppercase_letters == stats.cased_letters) v.satisfied = true;
          else v.detail = std::to_string(stats.cased_letters - stats.uppercase_letters) +
                          " lowercase letter(s) present";
          break;
        case CaseVariant::AllLower:
          if (stats.uppercase_letters == 0) v.satisfied = true;
          else v.detail = std::to_string(stats.uppercase_letters) + " uppercase letter(s) present";
          break;
        case CaseVariant::MinUpperRatio: {
          double observed = static_cast<double>(stats.uppercase_letters) /
                            static_cast<double>(stats.cased_letters);
          if (observed >= c.ratio) v.satisfied = true;
          else v.detail = "uppercase ratio " + std::to_string(observed) + " below " +
                          std::to_string(c.ratio);
          break;
        }
      }
      return v;
    }
    case Group::PTT: {
      bool present = false;
      for (char32_t s : decode_utf8(response)) {
        if (s == c.punct_mark) { present = true; break; }
      }
      bool want = c.punct_variant == PunctVariant::MustInclude;
      Verdict v{c, present == want, ""};
      if (!v.satisfied) {
        v.detail = quote_str(scalar_str(c.punct_mark)) +
                   (want ? " missing from response" : " present in response");
      }
      return v;
    }
    case Group::CTI: {
      std::size_t found = compute_stats(response).bullets;
      Verdict v{c, found == c.count, ""};
      if (!v.satisfied) {
        v.detail = "found " + std::to_string(found) + ", required " + std::to_string(c.count);
      }
      return v;
    }
    case Group::LEN:
      return length_verdict(c, compute_stats(response));
    case Group::EXT: {
      std::size_t found = keyword_occurrences(response, c.keyword);
      Verdict v{c, found == c.count, ""};
      if (!v.satisfied) {
        v.detail = quote_str(c.keyword) + " appears " + std::to_string(found) + " time(s), required " +
                   std::to_string(c.count);
      }
      return v;
    }
    case Group::FBD: {
      std::size_t found = keyword_occurrences(response, c.keyword);
      Verdict v{c, found == 0, ""};
      if (!v.satisfied) {
        v.detail = "forbidden word " + quote_str(c.keyword) + " appears " + std::to_string(found) +
                   " time(s)";
      }
      return v;
    }
  }
  return {c, false, "unknown constraint group"};
}

InstructionVerdict verify_instruction(const Instruction& instruction, std::string_view response) {
  InstructionVerdict result;
  for (const auto& c : instruction.constraints) {
    Verdict v = verify(c, response);
    result.all_satisfied = result.all_satisfied && v.satisfied;
    result.verdicts.push_back(std::move(v));
  }
  return result;
}

namespace {

// Directional rules with a.group < b.group in canonical order.
bool conflicts_ordered(const ConstraintSpec& a, const ConstraintSpec& b) {
  // Case rules vs literals whose casing can never comply.
  if (b.group == Group::CS && b.case_variant != CaseVariant::MinUpperRatio) {
    if (auto lit = forced_literal(a); lit && keyword_breaks_case(*lit, b.case_variant)) return true;
  }
  if (a.group == Group::CS && a.case_variant != CaseVariant::MinUpperRatio) {
    if (auto lit = forced_literal(b); lit && keyword_breaks_case(*lit, a.case_variant)) return true;
  }

  // A keyword both required and forbidden.
  if (b.group == Group::FBD) {
    if (a.group == Group::EXT && a.keyword == b.keyword) return true;
    if (auto kw = boundary_keyword(a); kw && *kw == b.keyword) return true;
  }

  // A required quotation mark the response must not contain.
  if ((a.group == Group::SW || a.group == Group::EW) &&
      a.boundary == BoundaryVariant::Quotation && b.group == Group::PTT &&
      b.punct_variant == PunctVariant::MustNotInclude && b.punct_mark == U'"') {
    return true;
  }

  // Size ceilings too small for mandated content. The floors are
  // deliberately conservative: a pairwise check cannot see three-way
  // combinations, so tight budgets reject structure-demanding partners
  // outright rather than admit a jointly unsatisfiable trio.
  const ConstraintSpec* len = nullptr;
  const ConstraintSpec* other = nullptr;
  if (a.group == Group::LEN) { len = &a; other = &b; }
  if (b.group == Group::LEN) { len = &b; other = &a; }
  if (len && len->len_direction == LenDirection::LessThan) {
    if (len->len_unit == LenUnit::Character) {
      std::uint64_t floor = 0;
      if (other->group == Group::EXT) {
        floor = static_cast<std::uint64_t>(other->count) * (decode_utf8(other->keyword).size() + 1);
      } else if (other->group == Group::CTI) {
        floor = static_cast<std::uint64_t>(other->count) * 3;
      }
      if (floor >= len->bound) return true;
      if (len->bound < 400 &&
          (other->group == Group::EXT || other->group == Group::CTI ||
           other->group == Group::FMT)) {
        return true;
      }
    }
    if (len->len_unit == LenUnit::Word) {
      if (other->group == Group::EXT && other->count >= len->bound) return true;
      if (other->group == Group::CTI && len->bound < 2ULL * other->count + 15) return true;
      if (other->group == Group::FMT && other->format == FormatKind::Csv && len->bound < 25) {
        return true;
      }
    }
  }

  // Structured formats vs boundary or punctuation demands they cannot meet.
  const ConstraintSpec* fmt = nullptr;
  other = nullptr;
  if (a.group == Group::FMT) { fmt = &a; other = &b; }
  if (b.group == Group::FMT) { fmt = &b; other = &a; }
  if (fmt) {
    bool strict_markup = fmt->format == FormatKind::Json || fmt->format == FormatKind::Xml ||
                         fmt->format == FormatKind::Html;
    if (strict_markup && (other->group == Group::SW || other->group == Group::EW) &&
        other->boundary != BoundaryVariant::Letter) {
      return true;
    }
    if (fmt->format == FormatKind::Json && other->group == Group::CTI) return true;
    if (other->group == Group::PTT && other->punct_variant == PunctVariant::MustNotInclude) {
      if (fmt->format == FormatKind::Json &&
          (other->punct_mark == U'"' || other->punct_mark == U',')) {
        return true;
      }
      if (fmt->format == FormatKind::Csv && other->punct_mark == U',') return true;
    }
  }
  return false;
}

}  // namespace

bool conflicts_with(const ConstraintSpec& a, const ConstraintSpec& b) {
  if (a.group == b.group) return false;
  return conflicts_ordered(a, b) || conflicts_ordered(b, a);
}

namespace {

std::string pick_keyword(const std::vector<std::string>& pool, Rng& rng) {
  std::vector<const std::string*> usable;
  for (const auto& k : pool) {
    if (!k.empty() && k.find(' ') == std::string::npos && k.find('\t') == std::string::npos) {
      usable.push_back(&k);
    }
  }
  if (usable.empty()) throw EmptyKeywordPool();
  return *usable[rng.below(usable.size())];
}

char32_t pick_letter(Rng& rng) { return static_cast<char32_t>(kLetters[rng.below(52)]); }

}  // namespace

ConstraintSpec sample_constraint(Group group, const std::vector<std::string>& keyword_pool,
                                 Rng& rng, const SamplerConfig& config) {
  ConstraintSpec spec;
  spec.group = group;
  switch (group) {
    case Group::SW:
    case Group::EW:
      spec.boundary = static_cast<BoundaryVariant>(rng.below(4));
      switch (spec.boundary) {
        case BoundaryVariant::Letter: spec.letter = pick_letter(rng); break;
        case BoundaryVariant::Emoji:
          spec.emoji = emoji_alphabet()[rng.below(emoji_alphabet().size())];
          break;
        case BoundaryVariant::Keyword: spec.keyword = pick_keyword(keyword_pool, rng); break;
        case BoundaryVariant::Quotation: break;
      }
      break;
    case Group::FMT:
      spec.format = static_cast<FormatKind>(rng.below(5));
      break;
    case Group::CS:
      spec.case_variant = static_cast<CaseVariant>(rng.below(3));
      if (spec.case_variant == CaseVariant::MinUpperRatio) {
        spec.ratio = config.upper_ratios[rng.below(config.upper_ratios.size())];
      }
      break;
    case Group::PTT:
      spec.punct_variant = static_cast<PunctVariant>(rng.below(2));
      spec.punct_mark = punctuation_alphabet()[rng.below(punctuation_alphabet().size())];
      break;
    case Group::CTI:
      spec.count = static_cast<std::uint32_t>(rng.range(config.bullets_min, config.bullets_max));
      break;
    case Group::LEN:
      spec.len_unit = static_cast<LenUnit>(rng.below(4));
      spec.len_direction = static_cast<LenDirection>(rng.below(2));
      switch (spec.len_unit) {
        case LenUnit::Word:
          spec.bound = static_cast<std::uint64_t>(rng.range(config.word_min, config.word_max));
          break;
        case LenUnit::Paragraph:
          spec.bound =
              static_cast<std::uint64_t>(rng.range(config.paragraph_min, config.paragraph_max));
          break;
        case LenUnit::Character:
          spec.bound =
              static_cast<std::uint64_t>(rng.range(config.character_min, config.character_max));
          break;
        case LenUnit::Sentence:
          spec.bound =
              static_cast<std::uint64_t>(rng.range(config.sentence_min, config.sentence_max));
          break;
      }
      break;
    case Group::EXT:
      spec.keyword = pick_keyword(keyword_pool, rng);
      spec.count = static_cast<std::uint32_t>(rng.range(config.ext_count_min, config.ext_count_max));
      break;
    case Group::FBD:
      spec.keyword = pick_keyword(keyword_pool, rng);
      break;
  }
  return spec;
}

MutationResult mutate_params(const ConstraintSpec& constraint, Rng& rng,
                             const SamplerConfig& config) {
  ConstraintSpec spec = constraint;
  auto redraw_until_changed = [&](auto draw, auto& field) {
    for (int i = 0; i < 64; ++i) {
      auto v = draw();
      if (v != field) {
        field = v;
        return true;
      }
    }
    return false;
  };
  bool changed = false;
  switch (spec.group) {
    case Group::SW:
    case Group::EW:
      switch (spec.boundary) {
        case BoundaryVariant::Letter:
          changed = redraw_until_changed([&] { return pick_letter(rng); }, spec.letter);
          break;
        case BoundaryVariant::Emoji:
          changed = redraw_until_changed(
              [&] { return emoji_alphabet()[rng.below(emoji_alphabet().size())]; }, spec.emoji);
          break;
        case BoundaryVariant::Keyword:
        case BoundaryVariant::Quotation:
          changed = false;  // no free parameter without a keyword pool
          break;
      }
      break;
    case Group::FMT:
      // Format re-draw counts as parameter mutation for FMT.
      changed = redraw_until_changed(
          [&] { return static_cast<FormatKind>(rng.below(5)); }, spec.format);
      break;
    case Group::CS:
      if (spec.case_variant == CaseVariant::MinUpperRatio) {
        changed = redraw_until_changed(
            [&] { return config.upper_ratios[rng.below(config.upper_ratios.size())]; }, spec.ratio);
      }
      break;
    case Group::PTT:
      changed = redraw_until_changed(
          [&] { return punctuation_alphabet()[rng.below(punctuation_alphabet().size())]; },
          spec.punct_mark);
      break;
    case Group::CTI:
      changed = redraw_until_changed(
          [&] {
            return static_cast<std::uint32_t>(rng.range(config.bullets_min, config.bullets_max));
          },
          spec.count);
      break;
    case Group::LEN: {
      auto draw = [&]() -> std::uint64_t {
        switch (spec.len_unit) {
          case LenUnit::Word:
            return static_cast<std::uint64_t>(rng.range(config.word_min, config.word_max));
          case LenUnit::Paragraph:
            return static_cast<std::uint64_t>(rng.range(config.paragraph_min, config.paragraph_max));
          case LenUnit::Character:
            return static_cast<std::uint64_t>(rng.range(config.character_min, config.character_max));
          case LenUnit::Sentence:
            return static_cast<std::uint64_t>(rng.range(config.sentence_min, config.sentence_max));
        }
        return 0;
      };
      changed = redraw_until_changed(draw, spec.bound);
      break;
    }
    case Group::EXT:
      changed = redraw_until_changed(
          [&] {
            return static_cast<std::uint32_t>(rng.range(config.ext_count_min, config.ext_count_max));
          },
          spec.count);
      break;
    case Group::FBD:
      changed = false;
      break;
  }
  return {spec, changed};
}

std::string render_fragment(const ConstraintSpec& c) {
  switch (c.group) {
    case Group::SW:
    case Group::EW: {
      std::string verb = c.group == Group::SW ? "start" : "end";
      switch (c.boundary) {
        case BoundaryVariant::Letter:
          return verb + " your response with the letter " + quote_str(scalar_str(c.letter));
        case BoundaryVariant::Emoji:
          return verb + " your response with the emoji " + scalar_str(c.emoji);
        case BoundaryVariant::Keyword:
          return verb + " your response with the word " + quote_str(c.keyword);
        case BoundaryVariant::Quotation:
          return verb + " your response with a quotation mark";
      }
      return "";
    }
    case Group::FMT:
      switch (c.format) {
        case FormatKind::Json: return "format your entire response as valid JSON";
        case FormatKind::Html: return "format your entire response as valid HTML";
        case FormatKind::Xml: return "format your entire response as valid XML";
        case FormatKind::Csv: return "format your entire response as valid CSV";
        case FormatKind::Markdown: return "format your entire response as Markdown";
      }
      return "";
    case Group::CS:
      switch (c.case_variant) {
        case CaseVariant::AllUpper: return "write every letter in uppercase";
        case CaseVariant::AllLower: return "write every letter in lowercase";
        case CaseVariant::MinUpperRatio:
          return "make at least " + std::to_string(static_cast<int>(std::lround(c.ratio * 100))) +
                 "% of the letters uppercase";
      }
      return "";
    case Group::PTT:
      if (c.punct_variant == PunctVariant::MustInclude) {
        return "include the punctuation mark " + quote_str(scalar_str(c.punct_mark)) +
               " at least once";
      }
      return "do not use the punctuation mark " + quote_str(scalar_str(c.punct_mark));
    case Group::CTI:
      return "use exactly " + std::to_string(c.count) + " bullet points";
    case Group::LEN: {
      std::string head =
          c.len_direction == LenDirection::MoreThan ? "use more than " : "use fewer than ";
      std::string unit;
      switch (c.len_unit) {
        case LenUnit::Word: unit = " words"; break;
        case LenUnit::Paragraph: unit = " paragraphs"; break;
        case LenUnit::Character: unit = " characters"; break;
        case LenUnit::Sentence: unit = " sentences"; break;
      }
      return head + std::to_string(c.bound) + unit;
    }
    case Group::EXT:
      return "include the word " + quote_str(c.keyword) + " exactly " + std::to_string(c.count) +
             " times";
    case Group::FBD:
      return "do not mention the word " + quote_str(c.keyword);
  }
  return "";
}

const char* group_name(Group g) {
  switch (g) {
    case Group::SW: return "SW";
    case Group::EW: return "EW";
    case Group::FMT: return "FMT";
    case Group::CS: return "CS";
    case Group::PTT: return "PTT";
    case Group::CTI: return "CTI";
    case Group::LEN: return "LEN";
    case Group::EXT: return "EXT";
    case Group::FBD: return "FBD";
  }
  return "?";
}

std::optional<Group> group_from_name(std::string_view name) {
  for (int i = 0; i < kGroupCount; ++i) {
    Group g = static_cast<Group>(i);
    if (name == group_name(g)) return g;
  }
  return std::nullopt;
}

std::string variant_name(const ConstraintSpec& c) {
  switch (c.group) {
    case Group::SW:
    case Group::EW:
      switch (c.boundary) {
        case BoundaryVariant::Letter: return "letter";
        case BoundaryVariant::Emoji: return "emoji";
        case BoundaryVariant::Keyword: return "keyword";
        case BoundaryVariant::Quotation: return "quotation";
      }
      return "";
    case Group::FMT: return format_kind_name(c.format);
    case Group::CS:
      switch (c.case_variant) {
        case CaseVariant::AllUpper: return "all_upper";
        case CaseVariant::AllLower: return "all_lower";
        case CaseVariant::MinUpperRatio: return "min_upper_ratio";
      }
      return "";
    case Group::PTT:
      return c.punct_variant == PunctVariant::MustInclude ? "must_include" : "must_not_include";
    case Group::CTI: return "bullet_points";
    case Group::LEN:
      switch (c.len_unit) {
        case LenUnit::Word: return "word";
        case LenUnit::Paragraph: return "paragraph";
        case LenUnit::Character: return "character";
        case LenUnit::Sentence: return "sentence";
      }
      return "";
    case Group::EXT: return "must_contain_exact";
    case Group::FBD: return "must_not_contain";
  }
  return "";
}

ordered_json constraint_to_json(const ConstraintSpec& c) {
  ordered_json params = ordered_json::object();
  switch (c.group) {
    case Group::SW:
    case Group::EW:
      switch (c.boundary) {
        case BoundaryVariant::Letter: params["letter"] = scalar_str(c.letter); break;
        case BoundaryVariant::Emoji: params["emoji"] = scalar_str(c.emoji); break;
        case BoundaryVariant::Keyword: params["keyword"] = c.keyword; break;
        case BoundaryVariant::Quotation: break;
      }
      break;
    case Group::FMT:
      break;
    case Group::CS:
      if (c.case_variant == CaseVariant::MinUpperRatio) params["ratio"] = c.ratio;
      break;
    case Group::PTT:
      params["mark"] = scalar_str(c.punct_mark);
      break;
    case Group::CTI:
      params["count"] = c.count;
      break;
    case Group::LEN:
      params["direction"] = c.len_direction == LenDirection::MoreThan ? "more_than" : "less_than";
      params["bound"] = c.bound;
      break;
    case Group::EXT:
      params["keyword"] = c.keyword;
      params["count"] = c.count;
      break;
    case Group::FBD:
      params["keyword"] = c.keyword;
      break;
  }
  ordered_json j;
  j["group"] = group_name(c.group);
  j["variant"] = variant_name(c);
  j["params"] = std::move(params);
  return j;
}

ConstraintSpec constraint_from_json(const nlohmann::json& j) {
  ConstraintSpec c;
  auto group = group_from_name(j.at("group").get<std::string>());
  if (!group) throw std::runtime_error("unknown constraint group: " + j.at("group").dump());
  c.group = *group;
  std::string variant = j.at("variant").get<std::string>();
  const auto& params = j.at("params");
  auto scalar_param = [&](const char* key) -> char32_t {
    auto scalars = decode_utf8(params.at(key).get<std::string>());
    if (scalars.empty()) throw std::runtime_error(std::string("empty scalar param ") + key);
    return scalars[0];
  };
  switch (c.group) {
    case Group::SW:
    case Group::EW:
      if (variant == "letter") {
        c.boundary = BoundaryVariant::Letter;
        c.letter = scalar_param("letter");
      } else if (variant == "emoji") {
        c.boundary = BoundaryVariant::Emoji;
        c.emoji = scalar_param("emoji");
      } else if (variant == "keyword") {
        c.boundary = BoundaryVariant::Keyword;
        c.keyword = params.at("keyword").get<std::string>();
      } else if (variant == "quotation") {
        c.boundary = BoundaryVariant::Quotation;
      } else {
        throw std::runtime_error("unknown boundary variant: " + variant);
      }
      break;
    case Group::FMT: {
      auto kind = format_kind_from_name(variant);
      if (!kind) throw std::runtime_error("unknown format variant: " + variant);
      c.format = *kind;
      break;
    }
    case Group::CS:
      if (variant == "all_upper") c.case_variant = CaseVariant::AllUpper;
      else if (variant == "all_lower") c.case_variant = CaseVariant::AllLower;
      else if (variant == "min_upper_ratio") {
        c.case_variant = CaseVariant::MinUpperRatio;
        c.ratio = params.at("ratio").get<double>();
      } else throw std::runtime_error("unknown case variant: " + variant);
      break;
    case Group::PTT:
      c.punct_variant =
          variant == "must_include" ? PunctVariant::MustInclude : PunctVariant::MustNotInclude;
      c.punct_mark = scalar_param("mark");
      break;
    case Group::CTI:
      c.count = params.at("count").get<std::uint32_t>();
      break;
    case Group::LEN: {
      if (variant == "word") c.len_unit = LenUnit::Word;
      else if (variant == "paragraph") c.len_unit = LenUnit::Paragraph;
      else if (variant == "character") c.len_unit = LenUnit::Character;
      else if (variant == "sentence") c.len_unit = LenUnit::Sentence;
      else throw std::runtime_error("unknown length variant: " + variant);
      c.len_direction = params.at("direction").get<std::string>() == "more_than"
                            ? LenDirection::MoreThan
                            : LenDirection::LessThan;
      c.bound = params.at("bound").get<std::uint64_t>();
      break;
    }
    case Group::EXT:
      c.keyword = params.at("keyword").get<std::string>();
      c.count = params.at("count").get<std::uint32_t>();
      break;
    case Group::FBD:
      c.keyword = params.at("keyword").get<std::string>();
      break;
  }
  return c;
}

ordered_json instruction_to_json(const Instruction& instruction) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : instruction.constraints) arr.push_back(constraint_to_json(c));
  return arr;
}

Instruction instruction_from_json(const nlohmann::json& j) {
  Instruction ins;
  for (const auto& item : j) ins.put(constraint_from_json(item));
  return ins;
}

}  // namespace evolif
