#include "core/text_analysis.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "json.hpp"

namespace evolif {

bool is_space_scalar(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\f': case U'\v':
    case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct_scalar(char32_t c) {
  if (c < 0x80) {
    return std::ispunct(static_cast<unsigned char>(c)) != 0;
  }
  switch (c) {
    case 0x2013: case 0x2014:             // en/em dash
    case 0x2018: case 0x2019:             // curly single quotes
    case 0x201C: case 0x201D:             // curly double quotes
    case 0x2026:                          // ellipsis
    case 0x00A1: case 0x00BF:             // inverted ! ?
      return true;
    default:
      return false;
  }
}

// Case classification covers ASCII and Latin-1; everything else is uncased.
bool is_upper_scalar(char32_t c) {
  if (c >= U'A' && c <= U'Z') return true;
  return c >= 0x00C0 && c <= 0x00DE && c != 0x00D7;
}

bool is_lower_scalar(char32_t c) {
  if (c >= U'a' && c <= U'z') return true;
  return c >= 0x00DF && c <= 0x00FF && c != 0x00F7;
}

bool is_cased_scalar(char32_t c) { return is_upper_scalar(c) || is_lower_scalar(c); }

bool is_emoji_scalar(char32_t c) {
  static constexpr std::array<std::pair<char32_t, char32_t>, 10> kRanges{{
      {0x1F300, 0x1F5FF},  // symbols & pictographs
      {0x1F600, 0x1F64F},  // emoticons
      {0x1F680, 0x1F6FF},  // transport & map
      {0x1F900, 0x1F9FF},  // supplemental symbols
      {0x1FA70, 0x1FAFF},  // extended-A
      {0x1F1E6, 0x1F1FF},  // regional indicators
      {0x2600, 0x26FF},    // misc symbols
      {0x2700, 0x27BF},    // dingbats
      {0x2B00, 0x2BFF},    // misc symbols and arrows
      {0x1F000, 0x1F0FF},  // mahjong / cards
  }};
  for (auto [lo, hi] : kRanges) {
    if (c >= lo && c <= hi) return true;
  }
  return false;
}

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char b = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b < 0x80) {
      cp = b;
    } else if ((b & 0xE0) == 0xC0 && i + 1 < text.size()) {
      cp = (b & 0x1F) << 6 | (text[i + 1] & 0x3F);
      len = 2;
    } else if ((b & 0xF0) == 0xE0 && i + 2 < text.size()) {
      cp = (b & 0x0F) << 12 | (text[i + 1] & 0x3F) << 6 | (text[i + 2] & 0x3F);
      len = 3;
    } else if ((b & 0xF8) == 0xF0 && i + 3 < text.size()) {
      cp = (b & 0x07) << 18 | (text[i + 1] & 0x3F) << 12 | (text[i + 2] & 0x3F) << 6 |
           (text[i + 3] & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

namespace {

std::string strip_token(const std::vector<char32_t>& scalars, std::size_t begin, std::size_t end) {
  while (begin < end && is_punct_scalar(scalars[begin])) ++begin;
  while (end > begin && is_punct_scalar(scalars[end - 1])) --end;
  std::string out;
  for (std::size_t i = begin; i < end; ++i) out += encode_utf8(scalars[i]);
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  lines.push_back(cur);
  return lines;
}

bool is_blank_line(const std::string& line) {
  for (char32_t c : decode_utf8(line)) {
    if (!is_space_scalar(c)) return false;
  }
  return true;
}

// "- ", "* ", "+ " or "N. " at the first non-whitespace position.
bool is_bullet_line(const std::string& line) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i >= line.size()) return false;
  char c = line[i];
  if ((c == '-' || c == '*' || c == '+') && i + 1 < line.size() && line[i + 1] == ' ') return true;
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t j = i;
    while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
    return j + 1 < line.size() && line[j] == '.' && line[j + 1] == ' ';
  }
  return false;
}

bool is_sentence_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  auto scalars = decode_utf8(text);
  std::size_t i = 0;
  while (i < scalars.size()) {
    while (i < scalars.size() && is_space_scalar(scalars[i])) ++i;
    std::size_t begin = i;
    while (i < scalars.size() && !is_space_scalar(scalars[i])) ++i;
    if (i > begin) {
      std::string tok = strip_token(scalars, begin, i);
      if (!tok.empty()) tokens.push_back(std::move(tok));
    }
  }
  return tokens;
}

TextStats compute_stats(std::string_view text) {
  TextStats stats;
  auto scalars = decode_utf8(text);
  stats.characters = scalars.size();
  for (char32_t c : scalars) {
    if (is_upper_scalar(c)) {
      ++stats.cased_letters;
      ++stats.uppercase_letters;
    } else if (is_lower_scalar(c)) {
      ++stats.cased_letters;
    }
  }
  stats.words = word_tokens(text).size();

  // Sentences: a run of terminators followed by whitespace or end-of-text
  // closes one sentence; unterminated trailing content counts as one.
  bool content = false;
  std::size_t i = 0;
  while (i < scalars.size()) {
    if (is_sentence_terminator(scalars[i])) {
      std::size_t run_end = i;
      while (run_end < scalars.size() && is_sentence_terminator(scalars[run_end])) ++run_end;
      if (run_end >= scalars.size() || is_space_scalar(scalars[run_end])) {
        ++stats.sentences;
        content = false;
      } else {
        content = true;  // terminator embedded in a token, e.g. "3.14"
      }
      i = run_end;
    } else {
      if (!is_space_scalar(scalars[i])) content = true;
      ++i;
    }
  }
  if (content) ++stats.sentences;

  bool in_paragraph = false;
  for (const auto& line : split_lines(text)) {
    if (is_bullet_line(line)) ++stats.bullets;
    if (is_blank_line(line)) {
      in_paragraph = false;
    } else if (!in_paragraph) {
      ++stats.paragraphs;
      in_paragraph = true;
    }
  }
  return stats;
}

std::size_t keyword_occurrences(std::string_view text, std::string_view keyword) {
  std::size_t count = 0;
  for (const auto& tok : word_tokens(text)) {
    if (tok == keyword) ++count;
  }
  return count;
}

namespace {

// Removes at most one fenced code block surrounding the whole payload.
std::string_view strip_surrounding_fence(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string_view trimmed = text.substr(begin, end - begin);
  if (trimmed.size() < 6 || trimmed.substr(0, 3) != "```") return text;
  if (trimmed.substr(trimmed.size() - 3) != "```") return text;
  std::size_t first_nl = trimmed.find('\n');
  if (first_nl == std::string_view::npos) return text;
  std::size_t close = trimmed.rfind('\n');
  if (close <= first_nl) return text;
  return trimmed.substr(first_nl + 1, close - first_nl - 1);
}

FormatCheck check_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> field_errors;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(std::string(text))) {
    ++line_no;
    if (is_blank_line(line)) continue;
    std::vector<std::string> fields;
    std::string cur;
    std::size_t i = 0;
    bool ok = true;
    while (true) {
      cur.clear();
      if (i < line.size() && line[i] == '"') {
        ++i;
        bool closed = false;
        while (i < line.size()) {
          if (line[i] == '"') {
            if (i + 1 < line.size() && line[i + 1] == '"') {
              cur += '"';
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            cur += line[i++];
          }
        }
        if (!closed) {
          return {false, "row " + std::to_string(line_no) + " has an unterminated quoted field"};
        }
        if (i < line.size() && line[i] != ',') {
          return {false, "row " + std::to_string(line_no) + " has data after a closing quote"};
        }
      } else {
        while (i < line.size() && line[i] != ',') {
          if (line[i] == '"') {
            return {false, "row " + std::to_string(line_no) + " has a bare quote in an unquoted field"};
          }
          cur += line[i++];
        }
      }
      fields.push_back(cur);
      if (i >= line.size()) break;
      ++i;  // consume ','
    }
    if (!ok) break;
    rows.push_back(std::move(fields));
  }
  if (rows.size() < 2) return {false, "fewer than 2 data rows"};
  std::size_t width = rows[0].size();
  if (width < 2) return {false, "row 1 has " + std::to_string(width) + " field(s), expected at least 2"};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      return {false, "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                         " field(s), expected " + std::to_string(width)};
    }
  }
  return {true, ""};
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.';
}

bool is_html_void(const std::string& name) {
  static const std::array<const char*, 13> kVoid{"area", "base", "br",    "col",  "embed",
                                                 "hr",   "img",  "input", "link", "meta",
                                                 "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

FormatCheck check_markup(std::string_view text, bool html) {
  std::vector<std::string> stack;
  std::size_t elements = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '<') {
      ++i;
      continue;
    }
    if (text.compare(i, 4, "<!--") == 0) {
      std::size_t close = text.find("-->", i + 4);
      if (close == std::string_view::npos) return {false, "unterminated comment"};
      i = close + 3;
      continue;
    }
    if (i + 1 < text.size() && (text[i + 1] == '?' || text[i + 1] == '!')) {
      std::size_t close = text.find('>', i);
      if (close == std::string_view::npos) return {false, "unterminated declaration"};
      i = close + 1;
      continue;
    }
    bool closing = i + 1 < text.size() && text[i + 1] == '/';
    std::size_t p = i + (closing ? 2 : 1);
    if (p >= text.size() || !is_name_start(text[p])) {
      return {false, "stray '<' at offset " + std::to_string(i)};
    }
    std::string name;
    while (p < text.size() && is_name_char(text[p])) name += text[p++];
    // Skip attributes, honoring quoted values.
    bool self_closed = false;
    while (p < text.size() && text[p] != '>') {
      if (text[p] == '"' || text[p] == '\'') {
        char q = text[p++];
        while (p < text.size() && text[p] != q) ++p;
        if (p >= text.size()) return {false, "unterminated attribute value in <" + name + ">"};
      } else if (text[p] == '/' && p + 1 < text.size() && text[p + 1] == '>') {
        self_closed = true;
      }
      ++p;
    }
    if (p >= text.size()) return {false, "unterminated tag <" + name + ">"};
    i = p + 1;
    if (closing) {
      if (stack.empty() || stack.back() != name) {
        return {false, "unbalanced closing tag </" + name + ">"};
      }
      stack.pop_back();
    } else {
      ++elements;
      if (!self_closed && !(html && is_html_void(name))) stack.push_back(name);
    }
  }
  if (!stack.empty()) return {false, "unclosed tag <" + stack.back() + ">"};
  if (elements == 0) return {false, "no markup elements found"};
  return {true, ""};
}

bool line_has_emphasis_pair(const std::string& line, char mark) {
  std::size_t open = line.find(mark);
  while (open != std::string::npos) {
    std::size_t close = line.find(mark, open + 1);
    if (close == std::string::npos) return false;
    if (close > open + 1) return true;
    open = line.find(mark, close + 1);
  }
  return false;
}

FormatCheck check_markdown(std::string_view text) {
  auto lines = split_lines(std::string(text));
  std::size_t fences = 0;
  for (const auto& line : lines) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string_view body(line.data() + i, line.size() - i);
    if (body.substr(0, 3) == "```") ++fences;
    if (is_bullet_line(line)) return {true, ""};
    if (body.size() >= 2 && body[0] == '#') {
      std::size_t h = 0;
      while (h < body.size() && body[h] == '#') ++h;
      if (h <= 6 && h < body.size() && body[h] == ' ') return {true, ""};
    }
    if (line_has_emphasis_pair(line, '*') || line_has_emphasis_pair(line, '_')) return {true, ""};
  }
  if (fences >= 2) return {true, ""};
  return {false, "no markdown structural construct (heading, list item, fence, or emphasis)"};
}

}  // namespace

FormatCheck validate_format(FormatKind kind, std::string_view text) {
  // A surrounding fence is unwrapped for the data formats; for Markdown the
  // fence is markup in its own right.
  std::string_view body = kind == FormatKind::Markdown ? text : strip_surrounding_fence(text);
  switch (kind) {
    case FormatKind::Json:
      if (nlohmann::json::accept(body)) return {true, ""};
      return {false, "not a single well-formed JSON value"};
    case FormatKind::Xml:
      return check_markup(body, /*html=*/false);
    case FormatKind::Html:
      return check_markup(body, /*html=*/true);
    case FormatKind::Csv:
      return check_csv(body);
    case FormatKind::Markdown:
      return check_markdown(body);
  }
  return {false, "unknown format"};
}

BoundaryInfo boundary_scan(std::string_view text, TextEnd end) {
  BoundaryInfo info;
  auto scalars = decode_utf8(text);
  if (end == TextEnd::Start) {
    for (std::size_t i = 0; i < scalars.size(); ++i) {
      if (!info.scalar && !is_space_scalar(scalars[i])) info.scalar = scalars[i];
      if (is_cased_scalar(scalars[i])) {
        info.cased_letter = scalars[i];
        break;
      }
    }
    auto tokens = word_tokens(text);
    if (!tokens.empty()) info.token = tokens.front();
  } else {
    for (std::size_t i = scalars.size(); i-- > 0;) {
      if (!info.scalar && !is_space_scalar(scalars[i])) info.scalar = scalars[i];
      if (is_cased_scalar(scalars[i])) {
        info.cased_letter = scalars[i];
        break;
      }
    }
    auto tokens = word_tokens(text);
    if (!tokens.empty()) info.token = tokens.back();
  }
  return info;
}

const char* format_kind_name(FormatKind k) {
  switch (k) {
    case FormatKind::Json: return "json";
    case FormatKind::Html: return "html";
    case FormatKind::Xml: return "xml";
    case FormatKind::Csv: return "csv";
    case FormatKind::Markdown: return "markdown";
  }
  return "unknown";
}

std::optional<FormatKind> format_kind_from_name(std::string_view name) {
  if (name == "json") return FormatKind::Json;
  if (name == "html") return FormatKind::Html;
  if (name == "xml") return FormatKind::Xml;
  if (name == "csv") return FormatKind::Csv;
  if (name == "markdown") return FormatKind::Markdown;
  return std::nullopt;
}

}  // namespace evolif
