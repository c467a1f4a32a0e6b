#include "core/metrics.hpp"

#include <algorithm>

namespace evolif {

namespace {

double turn_rate(const TurnRecord& r) {
  std::size_t total = r.verdicts.verdicts.size();
  std::size_t sat = 0;
  for (const auto& v : r.verdicts.verdicts) sat += v.satisfied ? 1 : 0;
  return total == 0 ? 1.0 : static_cast<double>(sat) / static_cast<double>(total);
}

void require_turns(const TranscriptSet& ts) {
  for (const auto& t : ts) {
    if (!t.records.empty()) return;
  }
  throw NoTurns();
}

void require_dialogues(const TranscriptSet& ts) {
  if (ts.empty()) throw NoDialogues();
}

}  // namespace

double csr(const TranscriptSet& transcripts) {
  require_turns(transcripts);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : transcripts) {
    for (const auto& r : t.records) {
      sum += turn_rate(r);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

double isr(const TranscriptSet& transcripts) {
  require_turns(transcripts);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : transcripts) {
    for (const auto& r : t.records) {
      sum += r.turn_success ? 1.0 : 0.0;
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

ActTriple act(const TranscriptSet& transcripts) {
  require_dialogues(transcripts);
  ActTriple total;
  for (const auto& t : transcripts) {
    double acc = 0.0, succ = 0.0;
    for (const auto& r : t.records) {
      acc += turn_rate(r);
      succ += r.turn_success ? 1.0 : 0.0;
    }
    total.len += static_cast<double>(t.records.size());
    total.acc += acc;
    total.succ += succ;
  }
  double d = static_cast<double>(transcripts.size());
  return {total.len / d, total.acc / d, total.succ / d};
}

double lss(const TranscriptSet& transcripts) {
  require_dialogues(transcripts);
  double sum = 0.0;
  for (const auto& t : transcripts) {
    std::size_t best = 0, run = 0;
    for (const auto& r : t.records) {
      run = r.turn_success ? run + 1 : 0;
      best = std::max(best, run);
    }
    sum += static_cast<double>(best);
  }
  return sum / static_cast<double>(transcripts.size());
}

double rob(const TranscriptSet& transcripts) {
  require_dialogues(transcripts);
  double sum = 0.0;
  for (const auto& t : transcripts) {
    double succ = 0.0;
    for (const auto& r : t.records) succ += r.turn_success ? 1.0 : 0.0;
    sum += t.records.empty() ? 0.0 : succ / static_cast<double>(t.records.size());
  }
  return sum / static_cast<double>(transcripts.size());
}

RecResult rec(const TranscriptSet& transcripts) {
  require_dialogues(transcripts);
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& t : transcripts) {
    std::size_t num = 0, den = 0;
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      if (!t.records[i - 1].turn_success) {
        ++den;
        if (t.records[i].turn_success) ++num;
      }
    }
    if (den == 0) continue;
    sum += static_cast<double>(num) / static_cast<double>(den);
    ++defined;
  }
  if (defined == 0) return {0.0, 0};
  return {sum / static_cast<double>(defined), defined};
}

std::map<Group, double> per_group_isr(const TranscriptSet& transcripts) {
  require_dialogues(transcripts);
  std::map<Group, std::pair<std::size_t, std::size_t>> tally;  // sat, total
  for (const auto& t : transcripts) {
    for (const auto& r : t.records) {
      for (const auto& v : r.verdicts.verdicts) {
        auto& [sat, total] = tally[v.constraint.group];
        ++total;
        if (v.satisfied) ++sat;
      }
    }
  }
  std::map<Group, double> out;
  for (const auto& [g, counts] : tally) {
    out[g] = static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }
  return out;
}

std::vector<double> survival_curve(const TranscriptSet& transcripts, std::size_t cap) {
  require_dialogues(transcripts);
  std::vector<double> out(cap, 0.0);
  for (const auto& t : transcripts) {
    std::size_t n = std::min(t.records.size(), cap);
    for (std::size_t k = 0; k < n; ++k) out[k] += 1.0;
  }
  for (double& v : out) v /= static_cast<double>(transcripts.size());
  return out;
}

MetricsReport report(const TranscriptSet& transcripts, std::size_t cap) {
  require_dialogues(transcripts);
  require_turns(transcripts);
  MetricsReport r;
  r.csr = csr(transcripts);
  r.isr = isr(transcripts);
  ActTriple a = act(transcripts);
  r.act_len = a.len;
  r.act_acc = a.acc;
  r.act_succ = a.succ;
  r.lss = lss(transcripts);
  r.rob = rob(transcripts);
  RecResult rr = rec(transcripts);
  r.rec = rr.value;
  r.rec_defined_dialogues = rr.defined_dialogues;
  r.per_group_isr = per_group_isr(transcripts);
  r.survival = survival_curve(transcripts, cap);
  r.n_dialogues = transcripts.size();
  for (const auto& t : transcripts) r.n_turns_total += t.records.size();
  return r;
}

}  // namespace evolif
