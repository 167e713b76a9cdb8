#include "gbgcn/log.hpp"

#include <iostream>
#include <utility>

namespace gbgcn::log {

namespace {

Sink& warning_sink() {
  static Sink sink = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
  return sink;
}

}  // namespace

Sink set_warning_sink(Sink sink) { return std::exchange(warning_sink(), std::move(sink)); }

void warn(const std::string& message) { warning_sink()(message); }

void info(const std::string& message) { std::cerr << message << '\n'; }

}  // namespace gbgcn::log
