#include <filesystem>
#include <fstream>

#include "codit/score_table.hpp"
#include "doctest.h"

using namespace codit;
namespace fs = std::filesystem;

namespace {

fs::path write_lines(const std::string& name, const std::string& body) {
  const fs::path file = fs::temp_directory_path() / ("codit_scores_" + name + ".jsonl");
  std::ofstream out(file);
  out << body;
  return file;
}

}  // namespace

TEST_CASE("external score table: 3 windows x n=2") {
  std::string body;
  for (int t = 0; t < 3; ++t)
    for (int k = 1; k <= 2; ++k)
      body += "{\"trace_id\":\"a\",\"t\":" + std::to_string(t) +
              ",\"w\":16,\"k\":" + std::to_string(k) +
              ",\"score\":" + std::to_string(t + k) + ".5}\n";
  const auto table = load_external_scores(write_lines("ok", body));
  CHECK(table.size() == 6);
  CHECK(table.at("a", 1, 16, 2) == doctest::Approx(3.5));
  CHECK(table.contains("a", 2, 16, 1));
  CHECK_FALSE(table.contains("a", 3, 16, 1));
}

TEST_CASE("negative scores are rejected") {
  const auto file =
      write_lines("neg", "{\"trace_id\":\"a\",\"t\":0,\"w\":16,\"k\":1,\"score\":-1}\n");
  CHECK_THROWS_AS(load_external_scores(file), DataError);
}

TEST_CASE("duplicate keys are rejected, not last-write-wins") {
  const auto file = write_lines(
      "dup",
      "{\"trace_id\":\"a\",\"t\":0,\"w\":16,\"k\":1,\"score\":1}\n"
      "{\"trace_id\":\"a\",\"t\":0,\"w\":16,\"k\":1,\"score\":2}\n");
  CHECK_THROWS_WITH_AS(load_external_scores(file), doctest::Contains("duplicate"),
                       DataError);
}

TEST_CASE("missing entries raise at use time") {
  const auto file =
      write_lines("gap", "{\"trace_id\":\"a\",\"t\":0,\"w\":16,\"k\":1,\"score\":1}\n");
  const auto table = load_external_scores(file);
  CHECK_THROWS_WITH_AS(table.at("a", 0, 16, 2), doctest::Contains("missing"), DataError);
}
