#include "riskgame/report.hpp"

#include <cstdio>

namespace riskgame::io {

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

}  // namespace

std::string render_report(const EquilibriumReport& report, const Equilibrium& eq,
                          const std::vector<std::string>& defense_labels,
                          const std::vector<std::string>& category_labels) {
  std::string out;
  out += "security strategy report\n";
  out += "========================\n\n";

  out += "optimal defense mix (cutoff " + std::to_string(eq.cutoff) + ", " +
         std::to_string(eq.iterations) + " iterations):\n";
  for (Eigen::Index i = 0; i < eq.optimal_defense.size(); ++i)
    out += "  " + defense_labels[i] + ": " + fmt("%.6f", eq.optimal_defense[i]) + "\n";
  out += "\n";

  out += "controls to adopt (by equilibrium frequency):\n";
  if (report.controls.empty()) out += "  (none above threshold)\n";
  for (const auto& c : report.controls) {
    if (c.kind == ControlKind::static_control) {
      out += "  implement " + c.defense + "  [static, frequency " + fmt("%.6f", c.frequency) +
             "]\n";
    } else {
      out += "  schedule " + c.defense + "  [dynamic, rate " + fmt("%.6f", c.frequency) +
             " per time unit, exponential inter-arrival]\n";
    }
  }
  out += "\n";

  out += "worst-case attacker profile (one of possibly many):\n";
  for (const auto& [attack, frequency] : report.worst_case_attacks)
    out += "  " + attack + ": " + fmt("%.6f", frequency) + "\n";
  out += "\n";

  out += "residual risk per goal (assurance distribution):\n";
  for (const auto& g : report.goals) {
    out += "  " + g.goal + ":\n";
    out += "    mean loss (risk = damage x likelihood): " + fmt("%.6f", g.mean) + "\n";
    out += "    variance: " + fmt("%.6f", g.variance) + "\n";
    out += "    0.95-quantile category: " + std::to_string(g.quantile_95) + "\n";
    out += "    P(loss >= category " + std::to_string(g.tail_category) +
           "): " + fmt("%.6f", g.tail_probability) + "\n";
  }
  if (!category_labels.empty()) {
    out += "\ncategory legend:\n";
    for (std::size_t k = 0; k < category_labels.size(); ++k)
      out += "  " + std::to_string(k + 1) + " = " + category_labels[k] + "\n";
  }
  return out;
}

}  // namespace riskgame::io
