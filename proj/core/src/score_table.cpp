#include "codit/score_table.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace codit {

void ScoreTable::insert(const std::string& trace_id, std::size_t t, std::size_t w,
                        std::size_t k, double score) {
  if (!std::isfinite(score) || score < 0.0)
    throw DataError("score table: invalid score for " + trace_id + ":" +
                    std::to_string(t) + ":" + std::to_string(w) + " k=" +
                    std::to_string(k));
  const auto [it, inserted] = scores_.emplace(Key{trace_id, t, w, k}, score);
  if (!inserted)
    throw DataError("score table: duplicate key " + trace_id + ":" + std::to_string(t) +
                    ":" + std::to_string(w) + " k=" + std::to_string(k));
}

double ScoreTable::at(const std::string& trace_id, std::size_t t, std::size_t w,
                      std::size_t k) const {
  const auto it = scores_.find(Key{trace_id, t, w, k});
  if (it == scores_.end())
    throw DataError("score table: missing entry " + trace_id + ":" + std::to_string(t) +
                    ":" + std::to_string(w) + " k=" + std::to_string(k));
  return it->second;
}

bool ScoreTable::contains(const std::string& trace_id, std::size_t t, std::size_t w,
                          std::size_t k) const {
  return scores_.count(Key{trace_id, t, w, k}) > 0;
}

ScoreTable load_external_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  ScoreTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded())
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad JSON");
    try {
      table.insert(obj.at("trace_id").get<std::string>(),
                   obj.at("t").get<std::size_t>(), obj.at("w").get<std::size_t>(),
                   obj.at("k").get<std::size_t>(), obj.at("score").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return table;
}

}  // namespace codit
