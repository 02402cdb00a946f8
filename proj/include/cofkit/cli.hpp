#pragma once

#include <string>
#include <vector>

namespace cofkit {

/// Command-line entry point. Returns 0 on success, 2 on usage errors and 1
/// when processing fails.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace cofkit
