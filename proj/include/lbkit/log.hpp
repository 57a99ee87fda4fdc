#pragma once

#include <iostream>
#include <sstream>
#include <string>
#include <utility>

namespace lbkit {

/// Tagged console output: every line is prefixed with "[tag] ".
class Logger {
public:
  explicit Logger(std::string tag, std::ostream& os = std::clog)
    : tag_(std::move(tag)), os_(&os) {}

  template <typename... Args>
  void info(Args&&... args) const {
    if (!enabled()) {
      return;
    }
    std::ostringstream line;
    line << '[' << tag_ << "] ";
    (line << ... << std::forward<Args>(args));
    *os_ << line.str() << '\n';
  }

  template <typename... Args>
  void warn(Args&&... args) const {
    info("WARNING: ", std::forward<Args>(args)...);
  }

  const std::string& tag() const noexcept { return tag_; }

  static bool& quiet() {
    static bool flag = false;
    return flag;
  }

private:
  bool enabled() const { return !quiet(); }

  std::string tag_;
  std::ostream* os_;
};

} // namespace lbkit
