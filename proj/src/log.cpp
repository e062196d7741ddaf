#include "qembed/log.hpp"

#include <iostream>
#include <utility>

namespace qembed {

namespace {

WarningSink& sink() {
  static WarningSink s = [](const std::string& m) {
    std::cerr << "qembed: warning: " << m << '\n';
  };
  return s;
}

}  // namespace

void warn(const std::string& message) {
  if (sink()) sink()(message);
}

WarningSink set_warning_sink(WarningSink s) {
  return std::exchange(sink(), std::move(s));
}

}  // namespace qembed
