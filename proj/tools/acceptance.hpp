#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cltlab::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  double time_limit = 0.0;  // seconds; 0 = none
  std::function<Outcome()> check;
};

struct Result {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The numbered acceptance criteria at desk scale.
const std::vector<Criterion>& criteria();

// Runs the selected criteria (all when `only` is empty), printing one
// pass/fail line per criterion to `log` as it completes.
std::vector<Result> run(const std::vector<int>& only, std::ostream& log);

std::string format_line(const Result& result);
nlohmann::json to_json(const std::vector<Result>& results);

} // namespace cltlab::acceptance
