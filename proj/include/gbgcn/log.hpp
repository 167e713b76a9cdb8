#pragma once

#include <functional>
#include <string>

namespace gbgcn::log {

using Sink = std::function<void(const std::string&)>;

// Replaces the warning sink (default: standard error). Returns the previous one.
Sink set_warning_sink(Sink sink);

void warn(const std::string& message);
void info(const std::string& message);

}  // namespace gbgcn::log
