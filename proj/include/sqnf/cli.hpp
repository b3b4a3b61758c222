#pragma once

namespace sqnf {

// argv-style entry point used by the sqnf binary and the CLI tests.
// Exit status: 0 success, 1 runtime failure, 2 usage error.
int cli_main(int argc, char** argv);

}  // namespace sqnf
