// src/ranking.cc

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

#include "urgentkit/ranking.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace urgentkit {

void CategoryConfig::validate() const {
  if (categories.empty())
    throw Error(ErrorCode::kConfigError, "category config: no categories");
  std::set<std::string> seen;
  for (const auto &[name, metrics] : categories) {
    if (metrics.empty())
      throw Error(ErrorCode::kConfigError,
                  "category config: category '" + name + "' is empty");
    for (const auto &metric : metrics) {
      if (!seen.insert(metric).second)
        throw Error(ErrorCode::kConfigError,
                    "category config: metric '" + metric +
                        "' appears in more than one category");
      if (!directions.count(metric))
        throw Error(ErrorCode::kConfigError,
                    "category config: metric '" + metric +
                        "' has no direction");
    }
  }
}

std::vector<std::string> CategoryConfig::all_metrics() const {
  std::vector<std::string> out;
  for (const auto &[name, metrics] : categories)
    out.insert(out.end(), metrics.begin(), metrics.end());
  return out;
}

CategoryConfig CategoryConfig::challenge_default() {
  CategoryConfig config;
  std::map<std::string, std::vector<std::string>> by_category;
  std::vector<std::string> order;
  for (const auto &d : challenge_metrics()) {
    const std::string cat = category_name(d.category);
    if (!by_category.count(cat)) order.push_back(cat);
    by_category[cat].push_back(d.name);
    config.directions[d.name] = d.direction;
  }
  for (const auto &cat : order)
    config.categories.emplace_back(cat, by_category[cat]);
  config.validate();
  return config;
}

CategoryConfig CategoryConfig::from_json_file(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "category config: cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kParseError,
                "category config: " + path.string() + ": " + e.what());
  }
  CategoryConfig config;
  for (const auto &cat : j.at("categories")) {
    std::vector<std::string> metrics;
    for (const auto &m : cat.at("metrics"))
      metrics.push_back(m.get<std::string>());
    config.categories.emplace_back(cat.at("name").get<std::string>(),
                                   std::move(metrics));
  }
  for (const auto &[metric, dir] : j.at("directions").items())
    config.directions[metric] = direction_from_name(dir.get<std::string>());
  config.validate();
  return config;
}

std::map<std::pair<std::string, std::string>, double> system_metric_means(
    const ScoreTable &table, const std::optional<std::string> &language_filter,
    const std::map<std::string, std::string> *utterance_language) {
  if (language_filter && utterance_language == nullptr)
    throw Error(ErrorCode::kConfigError,
                "system_metric_means: language filter requires an "
                "utterance-language map");
  std::map<std::pair<std::string, std::string>, double> sums;
  std::map<std::pair<std::string, std::string>, size_t> counts;
  for (const auto &e : table.entries()) {
    if (language_filter) {
      auto it = utterance_language->find(e.utterance_id);
      if (it == utterance_language->end() || it->second != *language_filter)
        continue;
    }
    const auto key = std::make_pair(e.system_id, e.metric);
    sums[key] += e.value;
    counts[key] += 1;
  }
  std::map<std::pair<std::string, std::string>, double> means;
  for (const auto &[key, sum] : sums)
    means[key] = sum / static_cast<double>(counts[key]);
  return means;
}

std::map<std::string, double> rank_metric(
    const std::map<std::string, double> &means, Direction direction) {
  if (means.empty())
    throw Error(ErrorCode::kInvalidArgument, "rank_metric: no systems");
  std::vector<std::pair<std::string, double>> sorted(means.begin(),
                                                     means.end());
  std::sort(sorted.begin(), sorted.end(),
            [direction](const auto &a, const auto &b) {
              if (a.second != b.second)
                return direction == Direction::kHigherBetter
                           ? a.second > b.second
                           : a.second < b.second;
              return a.first < b.first;
            });
  // Exact ties share the average of their 1-based positions.
  std::map<std::string, double> ranks;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j].second == sorted[i].second) ++j;
    const double avg =
        (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[sorted[k].first] = avg;
    i = j;
  }
  return ranks;
}

std::map<std::pair<std::string, std::string>, double> category_mean_ranks(
    const std::map<std::string, std::map<std::string, double>> &ranks,
    const CategoryConfig &config) {
  config.validate();
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto &[category, metrics] : config.categories) {
    for (const auto &metric : metrics) {
      auto it = ranks.find(metric);
      if (it == ranks.end())
        throw Error(ErrorCode::kCoverageError,
                    "category_mean_ranks: no ranks for metric '" + metric +
                        "'");
      for (const auto &[system, rank] : it->second)
        out[{system, category}] += rank / static_cast<double>(metrics.size());
    }
  }
  return out;
}

std::map<std::string, double> final_scores(
    const std::map<std::pair<std::string, std::string>, double>
        &category_ranks) {
  std::set<std::string> systems, categories;
  for (const auto &[key, rank] : category_ranks) {
    systems.insert(key.first);
    categories.insert(key.second);
  }
  std::map<std::string, double> out;
  for (const auto &system : systems) {
    double sum = 0.0;
    for (const auto &category : categories) {
      auto it = category_ranks.find({system, category});
      if (it == category_ranks.end())
        throw Error(ErrorCode::kCoverageError,
                    "final_scores: system '" + system +
                        "' has no rank for category '" + category + "'");
      sum += it->second;
    }
    out[system] = sum / static_cast<double>(categories.size());
  }
  return out;
}

Leaderboard build_leaderboard(
    const ScoreTable &table, const CategoryConfig &config,
    const std::optional<std::string> &language_filter,
    const std::map<std::string, std::string> *utterance_language) {
  config.validate();
  const auto means =
      system_metric_means(table, language_filter, utterance_language);
  const std::vector<std::string> systems = table.systems();

  std::map<std::string, std::map<std::string, double>> metric_means;
  for (const auto &metric : config.all_metrics()) {
    auto &per_system = metric_means[metric];
    for (const auto &system : systems) {
      auto it = means.find({system, metric});
      if (it == means.end())
        throw Error(ErrorCode::kCoverageError,
                    "build_leaderboard: system '" + system +
                        "' has no values for metric '" + metric + "'");
      per_system[system] = it->second;
    }
  }

  std::map<std::string, std::map<std::string, double>> metric_ranks;
  for (const auto &[metric, per_system] : metric_means)
    metric_ranks[metric] =
        rank_metric(per_system, config.directions.at(metric));

  const auto cat_ranks = category_mean_ranks(metric_ranks, config);
  const auto finals = final_scores(cat_ranks);

  Leaderboard board;
  board.config = config;
  for (const auto &system : systems) {
    LeaderboardRow row;
    row.system_id = system;
    for (const auto &metric : config.all_metrics()) {
      row.metric_means[metric] = metric_means[metric][system];
      row.metric_ranks[metric] = metric_ranks[metric][system];
    }
    for (const auto &[category, metrics] : config.categories)
      row.category_ranks[category] = cat_ranks.at({system, category});
    row.final_score = finals.at(system);
    board.rows.push_back(std::move(row));
  }
  std::sort(board.rows.begin(), board.rows.end(),
            [](const LeaderboardRow &a, const LeaderboardRow &b) {
              if (a.final_score != b.final_score)
                return a.final_score < b.final_score;
              return a.system_id < b.system_id;
            });
  return board;
}

namespace {

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

std::string Leaderboard::to_csv() const {
  std::string out = "system_id";
  for (const auto &metric : config.all_metrics()) out += ",mean_" + metric;
  for (const auto &metric : config.all_metrics()) out += ",rank_" + metric;
  for (const auto &[category, metrics] : config.categories)
    out += ",catrank_" + category;
  out += ",final_score\n";
  for (const auto &row : rows) {
    out += row.system_id;
    for (const auto &metric : config.all_metrics())
      out += "," + fixed4(row.metric_means.at(metric));
    for (const auto &metric : config.all_metrics())
      out += "," + fixed4(row.metric_ranks.at(metric));
    for (const auto &[category, metrics] : config.categories)
      out += "," + fixed4(row.category_ranks.at(category));
    out += "," + fixed4(row.final_score) + "\n";
  }
  return out;
}

std::string Leaderboard::to_text() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "system";
  for (const auto &[category, metrics] : config.categories)
    os << std::right << std::setw(12) << category.substr(0, 11);
  os << std::right << std::setw(12) << "final" << "\n";
  for (const auto &row : rows) {
    os << std::left << std::setw(12) << row.system_id;
    for (const auto &[category, metrics] : config.categories)
      os << std::right << std::setw(12) << fixed4(row.category_ranks.at(category));
    os << std::right << std::setw(12) << fixed4(row.final_score) << "\n";
  }
  return os.str();
}

}  // namespace urgentkit
