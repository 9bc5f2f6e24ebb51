#ifndef ADDIVORTES_LOG_HPP
#define ADDIVORTES_LOG_HPP

#include <functional>
#include <string_view>

namespace addivortes {

using WarningSink = std::function<void(std::string_view)>;

// Warnings go to stderr unless a sink is installed. Returns the old sink.
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace addivortes

#endif
