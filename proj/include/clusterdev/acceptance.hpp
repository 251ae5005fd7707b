#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace clusterdev {

struct CriterionResult {
  CriterionResult() = default;
  explicit CriterionResult(int i) : id(i) {}

  int id = 0;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs acceptance criteria 1..12; `only` restricts to the listed ids.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& only = {});

std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const std::vector<CriterionResult>& results);

}  // namespace clusterdev
