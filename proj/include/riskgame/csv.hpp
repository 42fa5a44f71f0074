#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "riskgame/game.hpp"
#include "riskgame/loss_distribution.hpp"
#include "riskgame/riskops.hpp"

namespace riskgame::io {

/// Expert survey parsed into per-cell observation groups. Label order is the
/// order of first appearance in the file, so repeated runs index identically.
struct SurveyData {
  std::vector<std::string> defense_labels;
  std::vector<std::string> attack_labels;
  std::vector<std::string> goal_labels;
  std::map<std::tuple<Eigen::Index, Eigen::Index, Eigen::Index>, Observations> cells;
  long skipped_blank{0};

  const Observations* cell(Eigen::Index defense, Eigen::Index attack, Eigen::Index goal) const {
    auto it = cells.find({defense, attack, goal});
    return it == cells.end() ? nullptr : &it->second;
  }
};

/// Reads `defense,attack,goal,rating` rows. Blank ratings are skipped and
/// counted; out-of-range ratings and structural problems throw with the line
/// number and cell coordinates.
SurveyData read_survey_csv(std::istream& in, Eigen::Index support_max);
SurveyData read_survey_csv(const std::filesystem::path& path, Eigen::Index support_max);

/// Cells of the defense x attack x goal cross product with no usable answers.
std::vector<std::tuple<std::string, std::string, std::string>> empty_cells(
    const SurveyData& survey);

/// Assembles the game from a survey: per-cell outlier filtering (default
/// none), empirical histogram, then smoothing. bandwidth unset picks
/// Silverman's rule per cell (falling back to 0.5 on degenerate samples);
/// bandwidth 0 skips smoothing. A cell with no answers is an EmptyCell error
/// naming the coordinates.
Game build_game_from_survey(const SurveyData& survey, Eigen::Index support_max,
                            std::optional<double> bandwidth = std::nullopt,
                            std::span<const double> goal_weights = {},
                            const OutlierPolicy& outliers = OutlierPolicy::none());

/// Reads `defense,threat` effectiveness pairs.
ControlRelation read_control_csv(std::istream& in);
ControlRelation read_control_csv(const std::filesystem::path& path);

}  // namespace riskgame::io
