#include "riskscore/errors.hpp"

#include <numeric>

namespace riskscore {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  if (problems.empty()) return "validation failed";
  return std::accumulate(std::next(problems.begin()), problems.end(), problems.front(),
                         [](std::string acc, const std::string& p) { return acc + "; " + p; });
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : DataError(join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace riskscore
