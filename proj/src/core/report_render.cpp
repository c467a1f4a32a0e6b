#include <cmath>
#include <cstdio>

#include "core/metrics.hpp"

namespace evolif {

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string fixed2(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
  ordered_json j;
  j["csr"] = r.csr;
  j["isr"] = r.isr;
  j["act_len"] = r.act_len;
  j["act_acc"] = r.act_acc;
  j["act_succ"] = r.act_succ;
  j["lss"] = r.lss;
  j["rob"] = r.rob;
  j["rec"] = r.rec;
  j["rec_defined_dialogues"] = r.rec_defined_dialogues;
  ordered_json groups;
  for (const auto& [g, v] : r.per_group_isr) groups[group_name(g)] = v;
  j["per_group_isr"] = std::move(groups);
  j["survival"] = r.survival;
  j["n_dialogues"] = r.n_dialogues;
  j["n_turns_total"] = r.n_turns_total;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const nlohmann::json& j) {
  MetricsReport r;
  r.csr = j.at("csr").get<double>();
  r.isr = j.at("isr").get<double>();
  r.act_len = j.at("act_len").get<double>();
  r.act_acc = j.at("act_acc").get<double>();
  r.act_succ = j.at("act_succ").get<double>();
  r.lss = j.at("lss").get<double>();
  r.rob = j.at("rob").get<double>();
  r.rec = j.at("rec").get<double>();
  r.rec_defined_dialogues = j.at("rec_defined_dialogues").get<std::size_t>();
  for (const auto& [name, v] : j.at("per_group_isr").items()) {
    auto g = group_from_name(name);
    if (!g) throw std::runtime_error("unknown constraint group: " + name);
    r.per_group_isr[*g] = v.get<double>();
  }
  r.survival = j.at("survival").get<std::vector<double>>();
  r.n_dialogues = j.at("n_dialogues").get<std::size_t>();
  r.n_turns_total = j.at("n_turns_total").get<std::size_t>();
  return r;
}

std::string reports_to_csv(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::string out =
      "adapter,csr_pct,isr_pct,act_len,act_acc,act_succ,lss,rob_pct,rec_pct,"
      "rec_defined_dialogues,n_dialogues,n_turns_total\n";
  for (const auto& [label, r] : rows) {
    out += label + "," + pct(r.csr) + "," + pct(r.isr) + "," + fixed2(r.act_len) + "," +
           fixed2(r.act_acc) + "," + fixed2(r.act_succ) + "," + fixed2(r.lss) + "," + pct(r.rob) +
           "," + pct(r.rec) + "," + std::to_string(r.rec_defined_dialogues) + "," +
           std::to_string(r.n_dialogues) + "," + std::to_string(r.n_turns_total) + "\n";
  }
  return out;
}

std::string survival_to_csv(const MetricsReport& r) {
  std::string out = "turn,fraction\n";
  for (std::size_t k = 0; k < r.survival.size(); ++k) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", k + 1, r.survival[k]);
    out += buf;
  }
  return out;
}

std::string survival_to_svg(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  const double width = 640, height = 400, margin = 48;
  const double plot_w = width - 2 * margin, plot_h = height - 2 * margin;
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

  std::size_t cap = 1;
  for (const auto& [_, r] : rows) cap = std::max(cap, r.survival.size());

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(width) +
                    "\" height=\"" + fixed2(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  svg += "<line x1=\"" + fixed2(margin) + "\" y1=\"" + fixed2(height - margin) + "\" x2=\"" +
         fixed2(width - margin) + "\" y2=\"" + fixed2(height - margin) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed2(margin) + "\" y1=\"" + fixed2(margin) + "\" x2=\"" +
         fixed2(margin) + "\" y2=\"" + fixed2(height - margin) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fixed2(width / 2) + "\" y=\"" + fixed2(height - 12) +
         "\" text-anchor=\"middle\" font-size=\"12\">turn</text>\n";
  svg += "<text x=\"14\" y=\"" + fixed2(height / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         fixed2(height / 2) + ")\">active fraction</text>\n";

  std::size_t idx = 0;
  for (const auto& [label, r] : rows) {
    const char* color = kColors[idx % 5];
    std::string points;
    for (std::size_t k = 0; k < r.survival.size(); ++k) {
      double x = margin + plot_w * (cap == 1 ? 0.0 : static_cast<double>(k) /
                                                         static_cast<double>(cap - 1));
      double y = height - margin - plot_h * r.survival[k];
      if (k) points += " ";
      points += fixed2(x) + "," + fixed2(y);
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           points + "\"/>\n";
    svg += "<text x=\"" + fixed2(width - margin - 140) + "\" y=\"" +
           fixed2(margin + 16 * static_cast<double>(idx + 1)) + "\" fill=\"" + color +
           "\" font-size=\"12\">" + label + "</text>\n";
    ++idx;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace evolif
