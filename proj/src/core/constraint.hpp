#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "core/rng.hpp"
#include "core/text_analysis.hpp"

namespace evolif {

using ordered_json = nlohmann::ordered_json;

// Canonical group order; instructions and verdicts are always kept in it.
enum class Group { SW, EW, FMT, CS, PTT, CTI, LEN, EXT, FBD };
inline constexpr int kGroupCount = 9;

enum class BoundaryVariant { Letter, Emoji, Keyword, Quotation };
enum class CaseVariant { AllUpper, AllLower, MinUpperRatio };
enum class PunctVariant { MustInclude, MustNotInclude };
enum class LenUnit { Word, Paragraph, Character, Sentence };
enum class LenDirection { MoreThan, LessThan };

// One atomic constraint. Only the fields relevant to the group/variant are
// meaningful; the rest stay defaulted and are excluded from serialization.
struct ConstraintSpec {
  Group group = Group::SW;
  BoundaryVariant boundary = BoundaryVariant::Letter;  // SW, EW
  FormatKind format = FormatKind::Json;                // FMT
  CaseVariant case_variant = CaseVariant::AllUpper;    // CS
  PunctVariant punct_variant = PunctVariant::MustInclude;  // PTT
  LenUnit len_unit = LenUnit::Word;                    // LEN
  LenDirection len_direction = LenDirection::MoreThan; // LEN

  char32_t letter = 0;       // SW/EW Letter
  char32_t emoji = 0;        // SW/EW Emoji
  std::string keyword;       // SW/EW Keyword, EXT, FBD
  char32_t punct_mark = 0;   // PTT
  std::uint32_t count = 0;   // CTI bullets, EXT occurrences
  std::uint64_t bound = 0;   // LEN
  double ratio = 0.0;        // CS MinUpperRatio

  bool operator==(const ConstraintSpec& other) const;
};

struct Instruction {
  // Sorted by group; at most one constraint per group.
  std::vector<ConstraintSpec> constraints;

  const ConstraintSpec* find(Group g) const;
  // Inserts keeping group order; replaces an existing constraint of the group.
  void put(const ConstraintSpec& spec);
  void remove(Group g);
  std::size_t size() const { return constraints.size(); }
};

struct Verdict {
  ConstraintSpec constraint;
  bool satisfied = false;
  std::string detail;  // non-empty when unsatisfied
};

struct InstructionVerdict {
  std::vector<Verdict> verdicts;  // canonical group order
  bool all_satisfied = true;
};

struct SamplerConfig {
  std::int64_t word_min = 20, word_max = 300;
  std::int64_t sentence_min = 2, sentence_max = 15;
  std::int64_t paragraph_min = 2, paragraph_max = 6;
  std::int64_t character_min = 100, character_max = 1500;
  std::int64_t bullets_min = 2, bullets_max = 6;
  std::int64_t ext_count_min = 2, ext_count_max = 5;
  std::vector<double> upper_ratios{0.1, 0.2, 0.3};
};

// The fixed punctuation alphabet for PTT: ! ? ; : , . em-dash " '
const std::vector<char32_t>& punctuation_alphabet();
// Emoji targets for SW/EW sampling.
const std::vector<char32_t>& emoji_alphabet();

class EmptyKeywordPool : public std::runtime_error {
 public:
  EmptyKeywordPool() : std::runtime_error("keyword pool is empty") {}
};

Verdict verify(const ConstraintSpec& constraint, std::string_view response);
InstructionVerdict verify_instruction(const Instruction& instruction, std::string_view response);

// Conservative syntactic cross-group conflict check; true means the rule
// table deems the pair jointly unsatisfiable. Requires a.group != b.group.
bool conflicts_with(const ConstraintSpec& a, const ConstraintSpec& b);

ConstraintSpec sample_constraint(Group group, const std::vector<std::string>& keyword_pool,
                                 Rng& rng, const SamplerConfig& config);

struct MutationResult {
  ConstraintSpec spec;
  bool changed = false;  // false when the variant has no free parameter
};
MutationResult mutate_params(const ConstraintSpec& constraint, Rng& rng,
                             const SamplerConfig& config);

// Deterministic one-clause English rendering.
std::string render_fragment(const ConstraintSpec& constraint);

const char* group_name(Group g);
std::optional<Group> group_from_name(std::string_view name);
std::string variant_name(const ConstraintSpec& spec);

ordered_json constraint_to_json(const ConstraintSpec& spec);
ConstraintSpec constraint_from_json(const nlohmann::json& j);
ordered_json instruction_to_json(const Instruction& instruction);
Instruction instruction_from_json(const nlohmann::json& j);

}  // namespace evolif
