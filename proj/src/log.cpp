#include "addivortes/log.hpp"

#include <iostream>
#include <mutex>

namespace addivortes {

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s;
  return s;
}
}  // namespace

WarningSink set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  std::swap(sink(), s);
  return s;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex);
  if (sink()) {
    sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace addivortes
