#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evolif {

struct TextStats {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t paragraphs = 0;
  std::size_t characters = 0;  // Unicode scalar values, whitespace included
  std::size_t bullets = 0;
  std::size_t cased_letters = 0;
  std::size_t uppercase_letters = 0;
};

enum class FormatKind { Json, Html, Xml, Csv, Markdown };

struct FormatCheck {
  bool ok = false;
  std::string diagnostic;  // names the first violation when !ok
};

// Facets of the text's start or end needed by begin-with / end-with checks.
struct BoundaryInfo {
  std::optional<char32_t> scalar;        // first/last non-whitespace scalar
  std::optional<char32_t> cased_letter;  // first/last cased letter
  std::string token;                     // leading/trailing whitespace-delimited token, edges stripped
};

enum class TextEnd { Start, Finish };

// Scalar classification shared by the verifiers.
bool is_space_scalar(char32_t c);
bool is_punct_scalar(char32_t c);
bool is_upper_scalar(char32_t c);
bool is_lower_scalar(char32_t c);
bool is_cased_scalar(char32_t c);
bool is_emoji_scalar(char32_t c);

// Decodes text into Unicode scalars; invalid bytes decode as U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(char32_t c);

// Whitespace-delimited tokens with leading/trailing punctuation stripped;
// tokens that strip to nothing are dropped.
std::vector<std::string> word_tokens(std::string_view text);

TextStats compute_stats(std::string_view text);

// Case-sensitive, word-boundary occurrence count under the word tokenizer.
std::size_t keyword_occurrences(std::string_view text, std::string_view keyword);

FormatCheck validate_format(FormatKind kind, std::string_view text);

BoundaryInfo boundary_scan(std::string_view text, TextEnd end);

const char* format_kind_name(FormatKind k);
std::optional<FormatKind> format_kind_from_name(std::string_view name);

}  // namespace evolif
