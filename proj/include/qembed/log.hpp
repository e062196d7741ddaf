#pragma once

#include <functional>
#include <string>

namespace qembed {

using WarningSink = std::function<void(const std::string&)>;

// Default sink writes "qembed: warning: ..." to stderr.
void warn(const std::string& message);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace qembed
