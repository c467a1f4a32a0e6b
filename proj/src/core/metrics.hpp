#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/session.hpp"

namespace evolif {

class NoTurns : public std::runtime_error {
 public:
  NoTurns() : std::runtime_error("metric requires at least one replied turn") {}
};
class NoDialogues : public std::runtime_error {
 public:
  NoDialogues() : std::runtime_error("metric requires at least one dialogue") {}
};

struct ActTriple {
  double len = 0.0;
  double acc = 0.0;
  double succ = 0.0;
};

struct MetricsReport {
  double csr = 0.0;
  double isr = 0.0;
  double act_len = 0.0;
  double act_acc = 0.0;
  double act_succ = 0.0;
  double lss = 0.0;
  double rob = 0.0;
  double rec = 0.0;
  std::size_t rec_defined_dialogues = 0;
  std::map<Group, double> per_group_isr;  // groups with no occurrences omitted
  std::vector<double> survival;           // index k-1 holds turn k, k = 1..cap
  std::size_t n_dialogues = 0;
  std::size_t n_turns_total = 0;
};

using TranscriptSet = std::vector<SessionTranscript>;

// Micro averages pooled over every replied turn of every dialogue.
double csr(const TranscriptSet& transcripts);
double isr(const TranscriptSet& transcripts);

// Per-dialogue aggregates averaged over dialogues.
ActTriple act(const TranscriptSet& transcripts);
double lss(const TranscriptSet& transcripts);
double rob(const TranscriptSet& transcripts);  // macro per-dialogue ISR mean

// Recovery: fraction of post-failure turns that succeed, per dialogue,
// averaged over dialogues where the denominator is non-zero.
struct RecResult {
  double value = 0.0;
  std::size_t defined_dialogues = 0;
};
RecResult rec(const TranscriptSet& transcripts);

std::map<Group, double> per_group_isr(const TranscriptSet& transcripts);
std::vector<double> survival_curve(const TranscriptSet& transcripts, std::size_t cap);

MetricsReport report(const TranscriptSet& transcripts, std::size_t cap);

// Report rendering (report_render.cpp).
std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);
// One row per label; percentages with two decimals.
std::string reports_to_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows);
std::string survival_to_csv(const MetricsReport& r);
// Self-contained line chart of one or more survival curves.
std::string survival_to_svg(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace evolif
