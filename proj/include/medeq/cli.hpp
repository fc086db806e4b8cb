#pragma once

#include <string>
#include <vector>

namespace medeq::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kPartialAugmentation = 3,
};

// args[0] is the program name. Verbosity comes from EQUALIZER_LOG
// (error, warn, info, debug; default info).
int parse_and_dispatch(const std::vector<std::string>& args);
int parse_and_dispatch(int argc, const char* const* argv);

}  // namespace medeq::cli
