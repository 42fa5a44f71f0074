#include "riskgame/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace riskgame::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

Eigen::Index label_index(std::vector<std::string>& labels, const std::string& label) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<Eigen::Index>(i);
  labels.push_back(label);
  return static_cast<Eigen::Index>(labels.size() - 1);
}

}  // namespace

SurveyData read_survey_csv(std::istream& in, Eigen::Index support_max) {
  if (support_max < 1) fail(errc::invalid_argument, "support_max must be >= 1");
  std::string line;
  if (!std::getline(in, line)) fail(errc::malformed_csv, "empty survey file");
  {
    const auto header = split_row(line);
    if (header != std::vector<std::string>{"defense", "attack", "goal", "rating"})
      fail(errc::malformed_csv, "expected header 'defense,attack,goal,rating'");
  }
  SurveyData survey;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != 4)
      fail(errc::malformed_csv,
           "line " + std::to_string(line_no) + ": expected 4 fields, got " +
               std::to_string(fields.size()));
    const std::string& defense = fields[0];
    const std::string& attack = fields[1];
    const std::string& goal = fields[2];
    const std::string& rating = fields[3];
    if (defense.empty() || attack.empty() || goal.empty())
      fail(errc::malformed_csv, "line " + std::to_string(line_no) + ": blank scenario label");
    const Eigen::Index di = label_index(survey.defense_labels, defense);
    const Eigen::Index ai = label_index(survey.attack_labels, attack);
    const Eigen::Index gi = label_index(survey.goal_labels, goal);
    if (rating.empty()) {
      ++survey.skipped_blank;  // the expert had no informed opinion here
      continue;
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(rating.data(), rating.data() + rating.size(), value);
    if (ec != std::errc{} || ptr != rating.data() + rating.size())
      fail(errc::malformed_csv,
           "line " + std::to_string(line_no) + ": rating '" + rating + "' is not an integer");
    if (value < 1 || value > support_max)
      fail(errc::category_out_of_range,
           "line " + std::to_string(line_no) + ", cell (" + defense + "," + attack + "," + goal +
               "): rating " + std::to_string(value) + " outside 1.." +
               std::to_string(support_max));
    auto& cell = survey.cells[{di, ai, gi}];
    if (cell.values.empty()) {
      cell.defense = defense;
      cell.attack = attack;
      cell.goal = goal;
    }
    cell.values.push_back(value);
  }
  if (survey.defense_labels.empty()) fail(errc::malformed_csv, "survey has no data rows");
  return survey;
}

SurveyData read_survey_csv(const std::filesystem::path& path, Eigen::Index support_max) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot open " + path.string());
  return read_survey_csv(in, support_max);
}

std::vector<std::tuple<std::string, std::string, std::string>> empty_cells(
    const SurveyData& survey) {
  std::vector<std::tuple<std::string, std::string, std::string>> missing;
  for (std::size_t i = 0; i < survey.defense_labels.size(); ++i)
    for (std::size_t j = 0; j < survey.attack_labels.size(); ++j)
      for (std::size_t g = 0; g < survey.goal_labels.size(); ++g) {
        const Observations* obs = survey.cell(i, j, g);
        if (obs == nullptr || obs->values.empty())
          missing.emplace_back(survey.defense_labels[i], survey.attack_labels[j],
                               survey.goal_labels[g]);
      }
  return missing;
}

Game build_game_from_survey(const SurveyData& survey, Eigen::Index support_max,
                            std::optional<double> bandwidth,
                            std::span<const double> goal_weights,
                            const OutlierPolicy& outliers) {
  const auto n = static_cast<Eigen::Index>(survey.defense_labels.size());
  const auto m = static_cast<Eigen::Index>(survey.attack_labels.size());
  const auto d = static_cast<Eigen::Index>(survey.goal_labels.size());
  std::vector<LossDistribution> payoffs;
  payoffs.reserve(n * m * d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index g = 0; g < d; ++g) {
        const Observations* obs = survey.cell(i, j, g);
        if (obs == nullptr || obs->values.empty())
          fail(errc::empty_cell, "no usable answers for cell (" + survey.defense_labels[i] +
                                     "," + survey.attack_labels[j] + "," +
                                     survey.goal_labels[g] + ")");
        const Observations cleaned = remove_outliers(*obs, outliers).cleaned;
        LossDistribution empirical = build_empirical(cleaned, support_max);
        double h;
        if (bandwidth.has_value()) {
          h = *bandwidth;
        } else {
          try {
            h = silverman_bandwidth(cleaned);
          } catch (const error& e) {
            if (e.code() != errc::degenerate_sample) throw;
            h = 0.5;  // moderate default uncertainty for unanimous answers
          }
        }
        payoffs.push_back(h > 0.0 ? smooth(empirical, h) : std::move(empirical));
      }
  return assemble_game<double>(n, m, d, std::move(payoffs), survey.defense_labels,
                               survey.attack_labels, survey.goal_labels, goal_weights);
}

ControlRelation read_control_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(errc::malformed_csv, "empty control relation file");
  {
    const auto header = split_row(line);
    if (header != std::vector<std::string>{"defense", "threat"})
      fail(errc::malformed_csv, "expected header 'defense,threat'");
  }
  ControlRelation rel;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      fail(errc::malformed_csv, "line " + std::to_string(line_no) + ": expected 'defense,threat'");
    if (std::find(rel.defenses.begin(), rel.defenses.end(), fields[0]) == rel.defenses.end())
      rel.defenses.push_back(fields[0]);
    if (std::find(rel.threats.begin(), rel.threats.end(), fields[1]) == rel.threats.end())
      rel.threats.push_back(fields[1]);
    rel.effective.insert({fields[0], fields[1]});
  }
  if (rel.effective.empty()) fail(errc::malformed_csv, "control relation has no pairs");
  return rel;
}

ControlRelation read_control_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot open " + path.string());
  return read_control_csv(in);
}

}  // namespace riskgame::io
