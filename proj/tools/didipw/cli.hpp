#pragma once

#include <string>
#include <vector>

namespace didipw::cli {

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Returns the process exit code; writes tables under the
// selected output directory and logs to stderr.
int run(const std::vector<std::string>& args);

} // namespace didipw::cli
