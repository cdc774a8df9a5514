#include "kgrec/error.hpp"

namespace kgrec {

std::string ValidationError::join(const std::vector<std::string>& problems) {
  std::string out = "invalid input";
  if (problems.empty()) return out;
  out += ":";
  for (const auto& p : problems) {
    out += "\n  - ";
    out += p;
  }
  return out;
}

ValidationError::ValidationError(std::vector<std::string> problems)
    : Error(join(problems)), problems_(std::move(problems)) {}

StageError::StageError(std::string stage, std::string kg,
                       const std::string& cause, bool io_cause)
    : Error("stage '" + stage + "'" + (kg.empty() ? "" : " [" + kg + "]") +
            " failed: " + cause),
      stage_(std::move(stage)),
      kg_(std::move(kg)),
      io_cause_(io_cause) {}

}  // namespace kgrec
