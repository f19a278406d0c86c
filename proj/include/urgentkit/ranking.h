// include/urgentkit/ranking.h

// Copyright 2025  urgentkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef URGENTKIT_RANKING_H_
#define URGENTKIT_RANKING_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "urgentkit/metrics.h"

namespace urgentkit {

/// Ordered metric categories plus per-metric directions. Every metric
/// belongs to exactly one category.
struct CategoryConfig {
  std::vector<std::pair<std::string, std::vector<std::string>>> categories;
  std::map<std::string, Direction> directions;

  void validate() const;
  std::vector<std::string> all_metrics() const;

  /// The five challenge categories over the 14 challenge metrics.
  static CategoryConfig challenge_default();
  static CategoryConfig from_json_file(const std::filesystem::path &path);
};

/// Arithmetic mean per (system, metric) over covered utterances. Metrics
/// with partial coverage average over their covered subset; a system with
/// zero values for a metric is an error. The optional language filter keeps
/// only utterances tagged with that language (tags come from the manifest).
std::map<std::pair<std::string, std::string>, double> system_metric_means(
    const ScoreTable &table,
    const std::optional<std::string> &language_filter = std::nullopt,
    const std::map<std::string, std::string> *utterance_language = nullptr);

/// Fractional ranking: best value gets rank 1; exact ties share the average
/// of their positions. Ranks over n systems always sum to n(n+1)/2.
std::map<std::string, double> rank_metric(
    const std::map<std::string, double> &means, Direction direction);

/// Mean of each category's metric ranks, per system (ranking step 2).
std::map<std::pair<std::string, std::string>, double> category_mean_ranks(
    const std::map<std::string, std::map<std::string, double>> &ranks,
    const CategoryConfig &config);

/// Mean over categories, per system (ranking step 3). Lower is better.
std::map<std::string, double> final_scores(
    const std::map<std::pair<std::string, std::string>, double>
        &category_ranks);

struct LeaderboardRow {
  std::string system_id;
  std::map<std::string, double> metric_means;
  std::map<std::string, double> metric_ranks;
  std::map<std::string, double> category_ranks;
  double final_score = 0.0;
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;  // ascending final score
  CategoryConfig config;

  std::string to_csv() const;
  std::string to_text() const;
};

/// Composes means -> per-metric ranks -> category ranks -> final scores.
/// Deterministic and independent of table insertion order; final-score ties
/// display in lexicographic system order.
Leaderboard build_leaderboard(
    const ScoreTable &table, const CategoryConfig &config,
    const std::optional<std::string> &language_filter = std::nullopt,
    const std::map<std::string, std::string> *utterance_language = nullptr);

}  // namespace urgentkit

#endif  // URGENTKIT_RANKING_H_
