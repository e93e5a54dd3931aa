#pragma once
#include <string>
#include <vector>

namespace spe {

// argv-style entry point; args[0] is the program name. Returns the process
// exit code: 0 success, 1 usage or validation error, 2 the tool ran but the
// checked property failed. Identical args and input files produce
// byte-identical output.
int run_cli(std::vector<std::string> args);

}  // namespace spe
