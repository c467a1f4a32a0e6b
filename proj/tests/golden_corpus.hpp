// Shared constraint-test fixtures: spec factories and the golden
// verifier corpus (expected verdict per case).
#pragma once

#include <string>
#include <vector>

#include "core/constraint.hpp"

namespace golden {

using namespace evolif;


inline ConstraintSpec sw_letter(char32_t l) {
  ConstraintSpec c;
  c.group = Group::SW;
  c.boundary = BoundaryVariant::Letter;
  c.letter = l;
  return c;
}
inline ConstraintSpec ew_letter(char32_t l) {
  ConstraintSpec c = sw_letter(l);
  c.group = Group::EW;
  return c;
}
inline ConstraintSpec sw_emoji(char32_t e) {
  ConstraintSpec c;
  c.group = Group::SW;
  c.boundary = BoundaryVariant::Emoji;
  c.emoji = e;
  return c;
}
inline ConstraintSpec ew_emoji(char32_t e) {
  ConstraintSpec c = sw_emoji(e);
  c.group = Group::EW;
  return c;
}
inline ConstraintSpec sw_keyword(std::string k) {
  ConstraintSpec c;
  c.group = Group::SW;
  c.boundary = BoundaryVariant::Keyword;
  c.keyword = std::move(k);
  return c;
}
inline ConstraintSpec ew_keyword(std::string k) {
  ConstraintSpec c = sw_keyword(std::move(k));
  c.group = Group::EW;
  return c;
}
inline ConstraintSpec sw_quote() {
  ConstraintSpec c;
  c.group = Group::SW;
  c.boundary = BoundaryVariant::Quotation;
  return c;
}
inline ConstraintSpec ew_quote() {
  ConstraintSpec c = sw_quote();
  c.group = Group::EW;
  return c;
}
inline ConstraintSpec fmt(FormatKind k) {
  ConstraintSpec c;
  c.group = Group::FMT;
  c.format = k;
  return c;
}
inline ConstraintSpec cs(CaseVariant v, double ratio = 0.0) {
  ConstraintSpec c;
  c.group = Group::CS;
  c.case_variant = v;
  c.ratio = ratio;
  return c;
}
inline ConstraintSpec ptt(PunctVariant v, char32_t mark) {
  ConstraintSpec c;
  c.group = Group::PTT;
  c.punct_variant = v;
  c.punct_mark = mark;
  return c;
}
inline ConstraintSpec cti(std::uint32_t n) {
  ConstraintSpec c;
  c.group = Group::CTI;
  c.count = n;
  return c;
}
inline ConstraintSpec len(LenUnit u, LenDirection d, std::uint64_t bound) {
  ConstraintSpec c;
  c.group = Group::LEN;
  c.len_unit = u;
  c.len_direction = d;
  c.bound = bound;
  return c;
}
inline ConstraintSpec ext(std::string k, std::uint32_t n) {
  ConstraintSpec c;
  c.group = Group::EXT;
  c.keyword = std::move(k);
  c.count = n;
  return c;
}
inline ConstraintSpec fbd(std::string k) {
  ConstraintSpec c;
  c.group = Group::FBD;
  c.keyword = std::move(k);
  return c;
}

struct GoldenCase {
  ConstraintSpec spec;
  std::string text;
  bool expect;
};

inline std::vector<GoldenCase> golden_corpus() {
  using LU = LenUnit;
  using LD = LenDirection;
  std::vector<GoldenCase> g;
  auto add = [&](ConstraintSpec s, std::string t, bool e) {
    g.push_back({std::move(s), std::move(t), e});
  };

  // SW letter (5)
  add(sw_letter(U'h'), "hello there", true);
  add(sw_letter(U'h'), "  \"hi\" quoted lead", true);  // punctuation skipped
  add(sw_letter(U'h'), "Hello there", false);           // case matters
  add(sw_letter(U'Q'), "Quite right", true);
  add(sw_letter(U'q'), "123 only digits", false);
  // SW emoji (5)
  add(sw_emoji(0x1F30A), "\U0001F30A tide report", true);
  add(sw_emoji(0x1F30A), "  \U0001F30A leading spaces fine", true);
  add(sw_emoji(0x1F30A), "tide \U0001F30A late", false);
  add(sw_emoji(0x1F525), "\U0001F30A wrong emoji", false);
  add(sw_emoji(0x2B50), "⭐ star", true);
  // SW keyword (5)
  add(sw_keyword("hello"), "hello world", true);
  add(sw_keyword("hello"), "  hello world", true);
  add(sw_keyword("hello"), "hello, world", true);  // prefix on trimmed text
  add(sw_keyword("hello"), "oh hello", false);
  add(sw_keyword("hello"), "Hello world", false);
  // SW quotation (4)
  add(sw_quote(), "\"quoted\" start", true);
  add(sw_quote(), "   \"indented quote", true);
  add(sw_quote(), "no quote here", false);
  add(sw_quote(), "'single' quote", false);
  // EW letter (4)
  add(ew_letter(U'd'), "the end", true);
  add(ew_letter(U'd'), "the end.", true);  // trailing punctuation skipped
  add(ew_letter(U'd'), "the ending", false);
  add(ew_letter(U'D'), "THE END", true);
  // EW emoji (4)
  add(ew_emoji(0x1F680), "launch \U0001F680", true);
  add(ew_emoji(0x1F680), "launch \U0001F680  ", true);
  add(ew_emoji(0x1F680), "\U0001F680 early", false);
  add(ew_emoji(0x1F680), "launch \U0001F680.", false);  // emoji must be final scalar
  // EW keyword (4)
  add(ew_keyword("goodbye"), "then goodbye", true);
  add(ew_keyword("goodbye"), "then goodbye  ", true);
  add(ew_keyword("goodbye"), "then goodbye.", false);  // suffix on trimmed text
  add(ew_keyword("goodbye"), "goodbye first", false);
  // EW quotation (3)
  add(ew_quote(), "she said \"stop\"", true);
  add(ew_quote(), "unquoted end", false);
  add(ew_quote(), "\"only at start", false);
  // FMT json (4)
  add(fmt(FormatKind::Json), "{\"k\": [1, 2]}", true);
  add(fmt(FormatKind::Json), "```json\n[true, null]\n```", true);
  add(fmt(FormatKind::Json), "{\"k\": }", false);
  add(fmt(FormatKind::Json), "just text", false);
  // FMT html (3)
  add(fmt(FormatKind::Html), "<div><p>hi<br></p></div>", true);
  add(fmt(FormatKind::Html), "<div><p>hi</div>", false);
  add(fmt(FormatKind::Html), "plain", false);
  // FMT xml (3)
  add(fmt(FormatKind::Xml), "<note><to>you</to></note>", true);
  add(fmt(FormatKind::Xml), "<note><br></note>", false);  // no void elements in xml
  add(fmt(FormatKind::Xml), "<open>", false);
  // FMT csv (4)
  add(fmt(FormatKind::Csv), "name,age\nana,31", true);
  add(fmt(FormatKind::Csv), "a,\"b,c\"\nd,e", true);
  add(fmt(FormatKind::Csv), "a,b\nc,d,e", false);  // ragged
  add(fmt(FormatKind::Csv), "one row,only", false);
  // FMT markdown (4)
  add(fmt(FormatKind::Markdown), "## Title\nbody", true);
  add(fmt(FormatKind::Markdown), "- a\n- b", true);
  add(fmt(FormatKind::Markdown), "with _emphasis_ inside", true);
  add(fmt(FormatKind::Markdown), "nothing structural", false);
  // CS all_upper (4)
  add(cs(CaseVariant::AllUpper), "ALL CAPS 123!", true);
  add(cs(CaseVariant::AllUpper), "ALMOSt", false);
  add(cs(CaseVariant::AllUpper), "1234 !?", false);  // no cased letters
  add(cs(CaseVariant::AllUpper), "ÀÉÎ", true);
  // CS all_lower (4)
  add(cs(CaseVariant::AllLower), "all lower.", true);
  add(cs(CaseVariant::AllLower), "One slip", false);
  add(cs(CaseVariant::AllLower), "çédille", true);
  add(cs(CaseVariant::AllLower), "", false);
  // CS min_upper_ratio (5)
  add(cs(CaseVariant::MinUpperRatio, 0.3), "ABC defg", true);   // 3/7
  add(cs(CaseVariant::MinUpperRatio, 0.3), "AB cdefgh", false); // 2/10
  add(cs(CaseVariant::MinUpperRatio, 0.1), "Abcdefghij", true); // exactly 0.1
  add(cs(CaseVariant::MinUpperRatio, 0.2), "every word low", false);
  add(cs(CaseVariant::MinUpperRatio, 0.2), "ALL UP", true);
  // PTT must_include (5)
  add(ptt(PunctVariant::MustInclude, U';'), "first; second", true);
  add(ptt(PunctVariant::MustInclude, U';'), "no semicolon", false);
  add(ptt(PunctVariant::MustInclude, U'—'), "an em—dash", true);
  add(ptt(PunctVariant::MustInclude, U'—'), "a hyphen-only", false);
  add(ptt(PunctVariant::MustInclude, U'"'), "say \"hi\"", true);
  // PTT must_not_include (4)
  add(ptt(PunctVariant::MustNotInclude, U'!'), "calm text.", true);
  add(ptt(PunctVariant::MustNotInclude, U'!'), "loud text!", false);
  add(ptt(PunctVariant::MustNotInclude, U','), "no commas here", true);
  add(ptt(PunctVariant::MustNotInclude, U','), "one, comma", false);
  // CTI (5)
  add(cti(2), "- a\n- b", true);
  add(cti(2), "- a\n- b\n- c", false);
  add(cti(3), "* a\n+ b\n1. c", true);
  add(cti(2), "no bullets at all", false);
  add(cti(2), "intro\n- a\ntext\n- b", true);
  // LEN word more/less (6)
  add(len(LU::Word, LD::MoreThan, 3), "one two three four", true);
  add(len(LU::Word, LD::MoreThan, 4), "one two three four", false);  // strict
  add(len(LU::Word, LD::MoreThan, 2), "a b", false);
  add(len(LU::Word, LD::LessThan, 4), "one two three", true);
  add(len(LU::Word, LD::LessThan, 3), "one two three", false);
  add(len(LU::Word, LD::LessThan, 2), "only — !", true);  // punctuation-only tokens dropped
  // LEN paragraph more/less (5)
  add(len(LU::Paragraph, LD::MoreThan, 1), "a\n\nb", true);
  add(len(LU::Paragraph, LD::MoreThan, 2), "a\n\nb", false);
  add(len(LU::Paragraph, LD::LessThan, 2), "a\nb\nc", true);
  add(len(LU::Paragraph, LD::LessThan, 2), "a\n\nb", false);
  add(len(LU::Paragraph, LD::MoreThan, 2), "a\n\nb\n\n\nc", true);
  // LEN character more/less (5)
  add(len(LU::Character, LD::MoreThan, 5), "123456", true);
  add(len(LU::Character, LD::MoreThan, 6), "123456", false);
  add(len(LU::Character, LD::LessThan, 4), "abc", true);
  add(len(LU::Character, LD::LessThan, 3), "abc", false);
  add(len(LU::Character, LD::LessThan, 3), "éé", true);  // scalars, not bytes
  // LEN sentence more/less (5)
  add(len(LU::Sentence, LD::MoreThan, 1), "One. Two.", true);
  add(len(LU::Sentence, LD::MoreThan, 2), "One. Two.", false);
  add(len(LU::Sentence, LD::LessThan, 2), "Only one here.", true);
  add(len(LU::Sentence, LD::LessThan, 2), "Two. Sentences.", false);
  add(len(LU::Sentence, LD::MoreThan, 1), "Dots... everywhere? yes", true);
  // EXT (6)
  add(ext("ocean", 2), "ocean meets ocean", true);
  add(ext("ocean", 2), "ocean, ocean! ocean?", false);  // three is not two
  add(ext("ocean", 2), "the ocean alone", false);
  add(ext("ocean", 1), "an \"ocean\" quoted", true);
  add(ext("ocean", 1), "oceanic drift", false);  // substring does not count
  add(ext("ocean", 3), "ocean ocean ocean", true);
  // FBD (5)
  add(fbd("storm"), "clear skies ahead", true);
  add(fbd("storm"), "a storm rolls in", false);
  add(fbd("storm"), "storms plural are fine", true);  // token-exact
  add(fbd("storm"), "Storm capitalized is a different token", true);
  add(fbd("storm"), "storm. punctuation stripped", false);

  // Additional breadth cases.
  add(sw_letter(U'é'), "école nearby", true);
  add(sw_letter(U'a'), "", false);
  add(sw_emoji(0x1F389), "\U0001F389 party", true);
  add(sw_emoji(0x1F389), "  ", false);
  add(sw_keyword("deep"), "deep-sea diving", true);  // trimmed prefix match
  add(sw_keyword("deep"), "deepsea diving", true);   // prefix, not token match
  add(sw_quote(), "“curly quote start", false); // straight quote required
  add(ew_letter(U'x'), "suffix", true);
  add(ew_letter(U'x'), "axle", false);
  add(ew_emoji(0x1F30A), "waves \U0001F30A\U0001F30A", true);
  add(ew_keyword("sea"), "under the sea", true);
  add(ew_keyword("sea"), "seasick at the stern", false);
  add(ew_quote(), "trailing \" after space", false);  // quote then more text
  add(fmt(FormatKind::Json), "42", true);             // bare scalar is valid JSON
  add(fmt(FormatKind::Html), "<ul><li>a</li><li>b</li></ul>", true);
  add(fmt(FormatKind::Xml), "<r><a/><b/></r>", true);
  add(fmt(FormatKind::Csv), "h1,h2\n\"a\",\"b\"\nc,d", true);
  add(fmt(FormatKind::Markdown), "```\nfenced\n```", true);
  add(cs(CaseVariant::AllUpper), "A", true);
  add(cs(CaseVariant::AllLower), "a b c 9", true);
  add(cs(CaseVariant::MinUpperRatio, 0.5), "AaBb", true);
  add(ptt(PunctVariant::MustInclude, U'!'), "Stop!", true);
  add(ptt(PunctVariant::MustNotInclude, U'—'), "dash-free text", true);
  add(cti(4), "- a\n- b\n- c\n- d", true);
  add(len(LU::Word, LD::MoreThan, 0), "one", true);
  add(len(LU::Sentence, LD::LessThan, 5), "Short. Pair.", true);
  add(ext("ocean", 2), "ocean\nocean", true);
  add(fbd("storm"), "", true);

  return g;
}


}  // namespace golden
