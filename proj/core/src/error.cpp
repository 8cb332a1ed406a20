#include "cbfed/error.hpp"

#include <sstream>

namespace cbfed {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  if (issues.empty()) return "invalid configuration";
  if (issues.size() == 1) return issues.front();
  std::ostringstream msg;
  msg << issues.size() << " configuration errors:";
  for (const auto& s : issues) msg << "\n  " << s;
  return msg.str();
}

std::string blow_up_message(double time, double norm_h) {
  std::ostringstream msg;
  msg << "solution blew up at t = " << time << " (||y||_H = " << norm_h << ")";
  return msg.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

BlowUpError::BlowUpError(double time, double norm_h)
    : Error(blow_up_message(time, norm_h)), time_(time), norm_h_(norm_h) {}

}  // namespace cbfed
