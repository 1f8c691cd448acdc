#pragma once

// Non-fatal diagnostics (rank deficiency, degraded fallbacks). Default sink
// is stderr; tests and the CLI can replace or silence it.

#include <functional>
#include <string>

namespace tr {

using WarnHandler = std::function<void(const std::string&)>;

// Replace the warning sink; returns the previous one. Pass nullptr to silence.
WarnHandler set_warn_handler(WarnHandler h);

void warn(const std::string& message);

}  // namespace tr
